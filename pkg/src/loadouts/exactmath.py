"""Exact rational linear algebra and outward-rounded interval arithmetic.

Rationals are plain :class:`fractions.Fraction` values.  Intervals are built on
mpmath's low-level ``libmp`` number tuples so that every operation can pick its
rounding direction explicitly; there is no global precision context.

A *scalar* is either a Fraction (ints are accepted and promoted) or an
:class:`Interval`.  Mixing the two promotes the rational operand to a degenerate
interval at the interval's working precision.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Callable, Sequence, Union

from mpmath.libmp import (
    from_rational,
    fzero,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_mul,
    mpf_neg,
    mpf_sign,
    mpf_sqrt,
    mpf_sub,
    round_ceiling,
    round_floor,
    to_rational,
)

from .errors import DimensionMismatch, IndeterminateSign, InvalidParams, SingularMatrix

DEFAULT_BITS = 128
MAX_BITS = 4096
DET_SIZE_CAP = 16


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def _mpf_min(vals):
    best = vals[0]
    for v in vals[1:]:
        if mpf_cmp(v, best) < 0:
            best = v
    return best


def _mpf_max(vals):
    best = vals[0]
    for v in vals[1:]:
        if mpf_cmp(v, best) > 0:
            best = v
    return best


def _mpf_to_fraction(v) -> Fraction:
    p, q = to_rational(v)
    return Fraction(int(p), int(q))


def _mpf_to_decimal(v) -> str:
    """Exact decimal expansion of a binary floating value."""
    frac = _mpf_to_fraction(v)
    if frac.denominator == 1:
        return str(frac.numerator)
    # denominator is a power of two, so a power of ten clears it
    d = frac.denominator
    shift = d.bit_length() - 1
    digits = abs(frac.numerator) * 5**shift
    sign = "-" if frac < 0 else ""
    s = str(digits).rjust(shift + 1, "0")
    whole, fracpart = s[:-shift], s[-shift:].rstrip("0")
    return f"{sign}{whole}.{fracpart}" if fracpart else f"{sign}{whole}"


class Interval:
    """Closed interval ``[lo, hi]`` with binary endpoints rounded outward."""

    __slots__ = ("_lo", "_hi", "bits")

    def __init__(self, lo, hi, bits: int = DEFAULT_BITS):
        if mpf_cmp(lo, hi) > 0:
            raise ValueError("interval lower endpoint exceeds upper endpoint")
        self._lo = lo
        self._hi = hi
        self.bits = int(bits)

    # construction -----------------------------------------------------
    @classmethod
    def from_rational(cls, value, bits: int = DEFAULT_BITS) -> "Interval":
        q = as_rational(value)
        return cls(
            from_rational(q.numerator, q.denominator, bits, round_floor),
            from_rational(q.numerator, q.denominator, bits, round_ceiling),
            bits,
        )

    @classmethod
    def from_bounds(cls, lo, hi, bits: int = DEFAULT_BITS) -> "Interval":
        lo, hi = as_rational(lo), as_rational(hi)
        return cls(
            from_rational(lo.numerator, lo.denominator, bits, round_floor),
            from_rational(hi.numerator, hi.denominator, bits, round_ceiling),
            bits,
        )

    @classmethod
    def sqrt_of(cls, value, bits: int = DEFAULT_BITS) -> "Interval":
        """Enclosure of the square root of a nonnegative rational."""
        q = as_rational(value)
        if q < 0:
            raise InvalidParams("square root of a negative rational")
        return cls.from_rational(q, bits).sqrt()

    # accessors --------------------------------------------------------
    @property
    def lower(self) -> Fraction:
        return _mpf_to_fraction(self._lo)

    @property
    def upper(self) -> Fraction:
        return _mpf_to_fraction(self._hi)

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, value) -> bool:
        q = as_rational(value)
        return self.lower <= q <= self.upper

    def excludes_zero(self) -> bool:
        return mpf_sign(self._lo) > 0 or mpf_sign(self._hi) < 0

    def is_degenerate_zero(self) -> bool:
        return self._lo == fzero and self._hi == fzero

    def __float__(self) -> float:
        return float((self.lower + self.upper) / 2)

    def __repr__(self) -> str:
        lo = float(self.lower)
        hi = float(self.upper)
        return f"Interval([{lo!r}, {hi!r}], bits={self.bits})"

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Interval | None":
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Interval.from_rational(other, self.bits)
        return None

    def __neg__(self) -> "Interval":
        return Interval(mpf_neg(self._hi), mpf_neg(self._lo), self.bits)

    def __pos__(self) -> "Interval":
        return self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        bits = max(self.bits, o.bits)
        return Interval(
            mpf_add(self._lo, o._lo, bits, round_floor),
            mpf_add(self._hi, o._hi, bits, round_ceiling),
            bits,
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        bits = max(self.bits, o.bits)
        return Interval(
            mpf_sub(self._lo, o._hi, bits, round_floor),
            mpf_sub(self._hi, o._lo, bits, round_ceiling),
            bits,
        )

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        bits = max(self.bits, o.bits)
        pairs = [(a, b) for a in (self._lo, self._hi) for b in (o._lo, o._hi)]
        lo = _mpf_min([mpf_mul(a, b, bits, round_floor) for a, b in pairs])
        hi = _mpf_max([mpf_mul(a, b, bits, round_ceiling) for a, b in pairs])
        return Interval(lo, hi, bits)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.excludes_zero():
            raise IndeterminateSign("division by an interval containing zero", o.bits)
        bits = max(self.bits, o.bits)
        pairs = [(a, b) for a in (self._lo, self._hi) for b in (o._lo, o._hi)]
        lo = _mpf_min([mpf_div(a, b, bits, round_floor) for a, b in pairs])
        hi = _mpf_max([mpf_div(a, b, bits, round_ceiling) for a, b in pairs])
        return Interval(lo, hi, bits)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def sqrt(self) -> "Interval":
        if mpf_sign(self._lo) < 0:
            raise InvalidParams("square root of an interval with negative part")
        return Interval(
            mpf_sqrt(self._lo, self.bits, round_floor),
            mpf_sqrt(self._hi, self.bits, round_ceiling),
            self.bits,
        )

    # serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {"lo": _mpf_to_decimal(self._lo), "hi": _mpf_to_decimal(self._hi), "bits": self.bits}

    @classmethod
    def from_json(cls, obj: dict) -> "Interval":
        return cls.from_bounds(Fraction(obj["lo"]), Fraction(obj["hi"]), int(obj["bits"]))


Scalar = Union[Fraction, Interval]
Matrix = list  # list of rows
Vector = list


def is_interval(x) -> bool:
    return isinstance(x, Interval)


def to_json_scalar(x) -> Union[str, dict]:
    if isinstance(x, Interval):
        return x.to_json()
    q = as_rational(x)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def from_json_scalar(obj) -> Scalar:
    if isinstance(obj, dict):
        return Interval.from_json(obj)
    if isinstance(obj, float):
        raise TypeError("floating-point scalars are not accepted; use 'p/q' strings")
    return as_rational(obj)


def scalar_from_decimal(text: str) -> Fraction:
    """Parse a decimal or rational literal exactly (``"0.125"`` -> 1/8)."""
    return Fraction(text)


# ---------------------------------------------------------------------------
# sign determination


def sign(s, reevaluate: Callable[[int], Interval] | None = None, cap: int = MAX_BITS) -> int:
    """Sign of a scalar as -1, 0 or +1.

    For intervals whose enclosure contains zero, ``reevaluate(bits)`` is called
    with doubled precision until the sign is decided or ``cap`` is exceeded.
    """
    if not isinstance(s, Interval):
        q = as_rational(s)
        return (q > 0) - (q < 0)
    current = s
    while True:
        if mpf_sign(current._lo) > 0:
            return 1
        if mpf_sign(current._hi) < 0:
            return -1
        if current.is_degenerate_zero():
            return 0
        bits = current.bits * 2
        if reevaluate is None or bits > cap:
            raise IndeterminateSign(
                f"enclosure {current!r} straddles zero", current.bits
            )
        current = reevaluate(bits)


# ---------------------------------------------------------------------------
# linear algebra


def _is_nonzero(x) -> bool:
    if isinstance(x, Interval):
        return x.excludes_zero()
    return x != 0


def _check_square(M: Sequence[Sequence]) -> int:
    n = len(M)
    for row in M:
        if len(row) != n:
            raise DimensionMismatch(f"matrix is not square ({n} rows, row of length {len(row)})")
    return n


def _all_rational(rows) -> bool:
    return all(not isinstance(x, Interval) for row in rows for x in row)


def _integer_rows(rows):
    """Scale each row of a rational matrix to integers; returns rows and scale factors."""
    out, scales = [], []
    for row in rows:
        qs = [as_rational(x) for x in row]
        s = lcm(*(q.denominator for q in qs)) if qs else 1
        out.append([q.numerator * (s // q.denominator) for q in qs])
        scales.append(s)
    return out, scales


def _bareiss_forward(rows, ncols, div, nonzero):
    """In-place fraction-free elimination on the first ``ncols`` columns.

    Returns (pivot_columns, sign) where ``sign`` tracks row swaps.  The matrix
    ends in row-echelon form; the last pivot equals the determinant of the
    leading square block when it has full rank.
    """
    nrows = len(rows)
    prev = 1
    r = 0
    swaps = 1
    pivots = []
    for col in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if nonzero(rows[i][col])), None)
        if p is None:
            continue
        if p != r:
            rows[p], rows[r] = rows[r], rows[p]
            swaps = -swaps
        piv = rows[r][col]
        width = len(rows[r])
        for i in range(r + 1, nrows):
            a = rows[i][col]
            for j in range(col + 1, width):
                rows[i][j] = div(rows[i][j] * piv - a * rows[r][j], prev)
            rows[i][col] = 0
        prev = piv
        pivots.append(col)
        r += 1
    return pivots, swaps


def det(M: Sequence[Sequence], cap: int = DET_SIZE_CAP) -> Scalar:
    """Determinant by fraction-free Bareiss elimination.

    Exact for rational input; an enclosure for interval input.
    """
    n = _check_square(M)
    if n > cap:
        raise InvalidParams(f"determinant size {n} exceeds cap {cap}")
    if n == 0:
        return Fraction(1)
    if _all_rational(M):
        rows, scales = _integer_rows(M)
        pivots, swaps = _bareiss_forward(rows, n, lambda a, b: a // b, lambda x: x != 0)
        if len(pivots) < n:
            return Fraction(0)
        scale = 1
        for s in scales:
            scale *= s
        return Fraction(swaps * rows[n - 1][n - 1], scale)
    rows = [[_lift(x) for x in r] for r in M]
    pivots, swaps = _bareiss_forward(rows, n, lambda a, b: a / b, _is_nonzero)
    if len(pivots) < n:
        # no certified pivot: expand by minors instead, which needs no division
        bits = max(x.bits for row in M for x in row if isinstance(x, Interval))
        return _laplace_det([[_lift(x) for x in r] for r in M], bits)
    d = rows[n - 1][n - 1]
    return d if swaps > 0 else -d


def _laplace_det(rows, bits: int) -> "Interval":
    """Cofactor expansion along rows, memoized on the remaining columns."""
    n = len(rows)
    zero = Interval.from_rational(0, bits)

    @lru_cache(maxsize=None)
    def minor(cols: tuple) -> Interval:
        r = n - len(cols)
        if r == n:
            return Interval.from_rational(1, bits)
        acc = zero
        for pos, k in enumerate(cols):
            term = rows[r][k] * minor(cols[:pos] + cols[pos + 1:])
            acc = acc - term if pos % 2 else acc + term
        return acc

    return minor(tuple(range(n)))


def _lift(x):
    return x if isinstance(x, Interval) else as_rational(x)


def _certainly_zero(x) -> bool:
    if isinstance(x, Interval):
        return x.is_degenerate_zero()
    return x == 0


def solve_linear(M: Sequence[Sequence], v: Sequence) -> list:
    """Solve ``M x = v``; exact for rational data, an enclosure otherwise."""
    n = _check_square(M)
    if len(v) != n:
        raise DimensionMismatch(f"right-hand side has length {len(v)}, expected {n}")
    if _all_rational(M) and not any(isinstance(x, Interval) for x in v):
        rows, _ = _integer_rows([list(M[i]) + [v[i]] for i in range(n)])
        pivots, _ = _bareiss_forward(rows, n, lambda a, b: a // b, lambda x: x != 0)
        if len(pivots) < n:
            raise SingularMatrix("matrix is singular")
        x = [Fraction(0)] * n
        for i in range(n - 1, -1, -1):
            acc = Fraction(rows[i][n])
            for j in range(i + 1, n):
                acc -= rows[i][j] * x[j]
            x[i] = acc / rows[i][i]
        return x
    rows = [[_lift(x) for x in list(M[i]) + [v[i]]] for i in range(n)]
    pivots, _ = _bareiss_forward(rows, n, lambda a, b: a / b, _is_nonzero)
    if len(pivots) < n:
        if _all_rational(M):
            raise SingularMatrix("matrix is singular")
        raise IndeterminateSign("cannot certify a nonzero pivot")
    x = [None] * n
    for i in range(n - 1, -1, -1):
        acc = rows[i][n]
        for j in range(i + 1, n):
            acc = acc - rows[i][j] * x[j]
        x[i] = acc / rows[i][i]
    return x


def rank(M: Sequence[Sequence]) -> int:
    """Exact rank of a rational matrix."""
    if not M:
        return 0
    if not _all_rational(M):
        raise TypeError("rank is only defined exactly for rational matrices")
    rows, _ = _integer_rows(M)
    pivots, _ = _bareiss_forward(rows, len(rows[0]), lambda a, b: a // b, lambda x: x != 0)
    return len(pivots)


def transpose(M: Sequence[Sequence]) -> list:
    return [list(col) for col in zip(*M)]


def columns(M: Sequence[Sequence], idx: Sequence[int]) -> list:
    """Submatrix of the 0-based columns ``idx``."""
    return [[row[j] for j in idx] for row in M]


def matvec(M: Sequence[Sequence], x: Sequence) -> list:
    out = []
    for row in M:
        acc = Fraction(0)
        for a, b in zip(row, x):
            acc = acc + a * b
        out.append(acc)
    return out


def dot(u: Sequence, v: Sequence):
    acc = Fraction(0)
    for a, b in zip(u, v):
        acc = acc + a * b
    return acc


def identity(n: int) -> list:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

