"""Explicit designs ``(A, c)`` and their validation.

Columns and subsets are 1-indexed at the public surface (``{1, ..., n}``);
matrices are stored as lists of rows.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import exactmath as em
from .errors import DesignInvalid, InvalidParams

KINDS = ("moment_curve", "exact_m3", "exact_m2", "identity", "user")


@dataclass(frozen=True)
class Design:
    m: int
    n: int
    A: tuple
    c: tuple
    kind: str = "user"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.A) != self.m or any(len(r) != self.n for r in self.A):
            raise InvalidParams(f"A must be {self.m}x{self.n}")
        if len(self.c) != self.n:
            raise InvalidParams(f"c must have length {self.n}")
        if self.kind not in KINDS:
            raise InvalidParams(f"unknown design kind {self.kind!r}")

    @property
    def is_rational(self) -> bool:
        return not any(em.is_interval(x) for x in self.c) and not any(
            em.is_interval(x) for row in self.A for x in row
        )

    @property
    def bits(self) -> Optional[int]:
        return self.params.get("precision_bits")

    def column(self, j: int) -> list:
        """Column ``A_j`` for a 1-based index."""
        return [row[j - 1] for row in self.A]

    def submatrix(self, subset: Sequence[int]) -> list:
        return [[row[j - 1] for j in subset] for row in self.A]

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "kind": self.kind,
            "A": [[em.to_json_scalar(x) for x in row] for row in self.A],
            "c": [em.to_json_scalar(x) for x in self.c],
            "params": _params_to_json(self.params),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Design":
        try:
            m, n = int(obj["m"]), int(obj["n"])
            A = tuple(tuple(em.from_json_scalar(x) for x in row) for row in obj["A"])
            c = tuple(em.from_json_scalar(x) for x in obj["c"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InvalidParams(f"malformed design JSON: {exc}") from exc
        params = _params_from_json(obj.get("params", {}))
        return cls(m, n, A, c, obj.get("kind", "user"), params)


def _params_to_json(params: dict) -> dict:
    out = {}
    for key, val in params.items():
        if isinstance(val, (list, tuple)):
            out[key] = [em.to_json_scalar(v) if isinstance(v, Fraction) else v for v in val]
        elif isinstance(val, Fraction):
            out[key] = em.to_json_scalar(val)
        else:
            out[key] = val
    return out


def _params_from_json(obj: dict) -> dict:
    params = dict(obj)
    if "t" in params:
        params["t"] = [em.as_rational(v) for v in params["t"]]
    if "M" in params:
        params["M"] = em.as_rational(params["M"])
    if "perturb" in params:
        params["perturb"] = em.as_rational(params["perturb"])
    return params


def loads(text: str) -> Design:
    return Design.from_json(json.loads(text))


def dumps(d: Design) -> str:
    return json.dumps(d.to_json())


# ---------------------------------------------------------------------------
# constructors


def moment_curve_entry(t: Fraction, i: int, M: Fraction) -> Fraction:
    """Row ``i`` (1-based) of the flipped moment curve: ``t^i`` or ``M - t^i``."""
    return t**i if i % 2 else M - t**i


def moment_curve_design(n: int, m: int, t: Optional[Sequence] = None, M=None) -> Design:
    if not (isinstance(n, int) and isinstance(m, int)) or not n > m >= 2:
        raise InvalidParams(f"moment-curve design needs n > m >= 2, got n={n}, m={m}")
    if t is None:
        ts = [Fraction(j) for j in range(1, n + 1)]
    else:
        ts = [em.as_rational(v) for v in t]
        if len(ts) != n:
            raise InvalidParams(f"expected {n} t-values, got {len(ts)}")
        if ts[0] <= 0 or any(a >= b for a, b in zip(ts, ts[1:])):
            raise InvalidParams("t-values must be positive and strictly increasing")
    bound = ts[-1] ** m
    if M is None:
        Mq = bound + 1
    else:
        Mq = em.as_rational(M)
        if Mq < bound:
            raise InvalidParams(f"M must be at least t_n^m = {bound}")
    A = tuple(tuple(moment_curve_entry(tj, i, Mq) for tj in ts) for i in range(1, m + 1))
    c = tuple(Fraction(1) for _ in range(n))
    return Design(m, n, A, c, "moment_curve", {"t": ts, "M": Mq})


def exact_design_m3(n: int, bits: int = em.DEFAULT_BITS) -> Design:
    """Three-row design whose costs ``sqrt(2/j)`` are carried as enclosures."""
    if not isinstance(n, int) or n <= 3:
        raise InvalidParams(f"the m=3 construction needs n > 3, got {n}")
    inv = [Fraction(1), Fraction(0)] + [Fraction(1, j) for j in range(3, n + 1)]
    row1 = tuple(inv)
    row2 = (Fraction(0), Fraction(1)) + tuple(inv[2:])
    row3 = tuple(Fraction(1) for _ in range(n))
    c = (Fraction(1), Fraction(1)) + tuple(
        em.Interval.sqrt_of(Fraction(2, j), bits) for j in range(3, n + 1)
    )
    return Design(3, n, (row1, row2, row3), c, "exact_m3", {"precision_bits": bits})


def exact_design_m2(n: int) -> Design:
    if not isinstance(n, int) or n <= 2:
        raise InvalidParams(f"the m=2 construction needs n > 2, got {n}")
    A = (
        tuple(Fraction(j * j) for j in range(1, n + 1)),
        tuple(Fraction(1) for _ in range(n)),
    )
    c = tuple(Fraction(j) for j in range(1, n + 1))
    return Design(2, n, A, c, "exact_m2", {})


def identity_design(n: int) -> Design:
    if not isinstance(n, int) or n < 1:
        raise InvalidParams(f"identity design needs n >= 1, got {n}")
    A = tuple(tuple(r) for r in em.identity(n))
    return Design(n, n, A, tuple(Fraction(1) for _ in range(n)), "identity", {})


def user_design(A: Sequence[Sequence], c: Sequence) -> Design:
    rows = tuple(tuple(em.from_json_scalar(x) if not isinstance(x, (Fraction, em.Interval)) else x
                       for x in row) for row in A)
    cc = tuple(em.from_json_scalar(x) if not isinstance(x, (Fraction, em.Interval)) else x for x in c)
    m = len(rows)
    n = len(cc)
    return Design(m, n, rows, cc, "user", {})


def at_precision(d: Design, bits: int) -> Design:
    """Rebuild an interval design at a higher working precision.

    Only constructions that know how to regenerate their irrational entries
    can be rebuilt; rational designs are returned unchanged.
    """
    if d.is_rational:
        return d
    if d.kind == "exact_m3":
        return exact_design_m3(d.n, bits)
    raise em.IndeterminateSign(f"design of kind {d.kind!r} cannot be re-evaluated", d.bits)


def perturb(d: Design, delta) -> Design:
    """Shift every cost by the rational ``delta``: ``c' = c + delta * (1, ..., 1)``."""
    dq = em.as_rational(delta)
    params = dict(d.params)
    params["perturb"] = params.get("perturb", Fraction(0)) + dq
    return Design(d.m, d.n, d.A, tuple(x + dq for x in d.c), d.kind, params)


def scale_column(d: Design, j: int, lam) -> Design:
    """Multiply column ``A_j`` and cost ``c_j`` by the positive rational ``lam``."""
    lq = em.as_rational(lam)
    if lq <= 0:
        raise InvalidParams("column scale must be positive")
    A = tuple(tuple(x * lq if k == j - 1 else x for k, x in enumerate(row)) for row in d.A)
    c = tuple(x * lq if k == j - 1 else x for k, x in enumerate(d.c))
    return Design(d.m, d.n, A, c, d.kind, dict(d.params))


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    nonnegative: bool
    negative_entries: list
    rank: Optional[int]
    full_row_rank: bool
    distinct_columns: bool
    duplicate_columns: list
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.nonnegative and self.full_row_rank

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "nonnegative": self.nonnegative,
            "negative_entries": self.negative_entries,
            "rank": self.rank,
            "full_row_rank": self.full_row_rank,
            "distinct_columns": self.distinct_columns,
            "duplicate_columns": self.duplicate_columns,
            "notes": self.notes,
        }


def validate(d: Design) -> ValidationReport:
    negatives = []
    notes = []
    for i, row in enumerate(d.A, 1):
        for j, x in enumerate(row, 1):
            if em.is_interval(x):
                if x.upper < 0:
                    negatives.append(["A", i, j])
                elif x.lower < 0:
                    notes.append(f"A[{i}][{j}] enclosure straddles zero")
            elif x < 0:
                negatives.append(["A", i, j])
    for j, x in enumerate(d.c, 1):
        if em.is_interval(x):
            if x.upper < 0:
                negatives.append(["c", j])
            elif x.lower < 0:
                notes.append(f"c[{j}] enclosure straddles zero")
        elif x < 0:
            negatives.append(["c", j])

    rank: Optional[int]
    A_rational = not any(em.is_interval(x) for row in d.A for x in row)
    if A_rational:
        rank = em.rank([list(r) for r in d.A])
        full = rank == d.m
    else:
        rank = None
        full = False
        for cols in itertools.combinations(range(1, d.n + 1), d.m):
            try:
                if em.sign(em.det(d.submatrix(cols))) != 0:
                    full = True
                    rank = d.m
                    break
            except em.IndeterminateSign:
                continue
        if not full:
            notes.append("no m x m minor certified nonzero")

    seen: dict = {}
    dups = []
    for j in range(1, d.n + 1):
        key = tuple(
            (x.lower, x.upper) if em.is_interval(x) else x for x in d.column(j)
        )
        if key in seen:
            dups.append([seen[key], j])
        else:
            seen[key] = j
    return ValidationReport(
        nonnegative=not negatives,
        negative_entries=negatives,
        rank=rank,
        full_row_rank=full,
        distinct_columns=not dups,
        duplicate_columns=dups,
        notes=notes,
    )


def require_valid(d: Design) -> None:
    """Hard check used before loadout enumeration."""
    report = validate(d)
    if not report.ok:
        problems = []
        if not report.nonnegative:
            problems.append(f"negative entries at {report.negative_entries}")
        if not report.full_row_rank:
            problems.append(f"rank {report.rank} < m = {d.m}")
        raise DesignInvalid("; ".join(problems))
