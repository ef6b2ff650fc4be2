"""Face counts of cyclic polytopes and star/dot array combinatorics.

Subsets of ``[n]`` are sorted tuples of 1-based indices.  A subset is read as a
length-``n`` array with a star at every member; maximal runs of stars are
blocks, and a block touching position 1 or ``n`` is a border block.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Optional, Sequence

from .errors import EnumerationTooLarge, InvalidParams

ENUMERATION_CAP = 2_000_000
EXHAUSTIVE_LIMIT = 20


def binom(a: int, b: int) -> int:
    """Binomial coefficient that is zero outside ``0 <= b <= a``."""
    if b < 0 or a < 0 or b > a:
        return 0
    return comb(a, b)


def _check_subset(subset: Iterable[int], n: int) -> tuple:
    s = tuple(sorted(subset))
    if len(set(s)) != len(s) or (s and (s[0] < 1 or s[-1] > n)):
        raise InvalidParams(f"{list(subset)} is not a subset of [1..{n}]")
    return s


# ---------------------------------------------------------------------------
# f-vectors


@dataclass(frozen=True)
class FVector:
    n: int
    m: int
    entries: tuple

    def __getitem__(self, k: int) -> int:
        return self.entries[k]

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "f": [_json_int(x) for x in self.entries]}


def _json_int(x: int):
    return x if abs(x) <= 2**53 else str(x)


def face_count(n: int, m: int, k: int) -> int:
    """Number of ``k``-dimensional faces of C(n, m) by the double binomial sum."""
    half = m // 2
    total = 0
    for ell in range(0, half + 1):
        total += binom(ell, m - k - 1) * binom(n - m + ell - 1, ell)
    for ell in range(half + 1, m + 1):
        total += binom(ell, m - k - 1) * binom(n - ell - 1, m - ell)
    return total


def facet_count(n: int, m: int) -> int:
    """Closed form for the number of facets of C(n, m)."""
    lo, hi = m // 2, (m + 1) // 2
    return binom(n - hi, lo) + binom(n - lo - 1, hi - 1)


def fvector(n: int, m: int) -> FVector:
    if not n > m >= 2:
        raise InvalidParams(f"f-vector of C(n, m) needs n > m >= 2, got n={n}, m={m}")
    entries = tuple(face_count(n, m, k) for k in range(m))
    closed = facet_count(n, m)
    if entries[m - 1] != closed:
        raise ArithmeticError(
            f"facet count mismatch for C({n},{m}): sum gives {entries[m - 1]}, closed form {closed}"
        )
    return FVector(n, m, entries)


# ---------------------------------------------------------------------------
# arrays and blocks


@dataclass(frozen=True)
class StarArray:
    n: int
    stars: tuple

    def __post_init__(self):
        object.__setattr__(self, "stars", _check_subset(self.stars, self.n))

    def __str__(self) -> str:
        members = set(self.stars)
        return "".join("*" if i in members else "." for i in range(1, self.n + 1))


@dataclass(frozen=True)
class Block:
    members: tuple

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def odd(self) -> bool:
        return self.size % 2 == 1


@dataclass(frozen=True)
class BlockDecomposition:
    first_border: tuple
    last_border: tuple
    inner_blocks: tuple  # of Block

    @property
    def odd_inner(self) -> int:
        return sum(1 for b in self.inner_blocks if b.odd)

    @property
    def last_border_odd(self) -> bool:
        return len(self.last_border) % 2 == 1


def _runs(stars: Sequence[int]) -> list:
    runs: list = []
    for s in stars:
        if runs and runs[-1][-1] == s - 1:
            runs[-1].append(s)
        else:
            runs.append([s])
    return runs


def blocks(a: StarArray) -> BlockDecomposition:
    runs = _runs(a.stars)
    first: tuple = ()
    last: tuple = ()
    inner = []
    for run in runs:
        touches_first = run[0] == 1
        touches_last = run[-1] == a.n
        if touches_first:
            first = tuple(run)
        if touches_last:
            last = tuple(run)
        if not touches_first and not touches_last:
            inner.append(Block(tuple(run)))
    return BlockDecomposition(first, last, tuple(inner))


def odd_inner_blocks(subset: Sequence[int], n: int) -> int:
    return blocks(StarArray(n, tuple(subset))).odd_inner


class GapParity(enum.Enum):
    ODD_FACET = 1
    EVEN_FACET = 2
    NOT_FACET = 0

    @property
    def g(self) -> Optional[int]:
        return None if self is GapParity.NOT_FACET else self.value


def gap_parity(subset: Sequence[int], n: int) -> GapParity:
    """Classify by the parity of the number of members larger than each gap."""
    s = _check_subset(subset, n)
    members = set(s)
    parities = set()
    larger = len(s)
    for i in range(1, n + 1):
        if i in members:
            larger -= 1
        else:
            parities.add(larger % 2)
    if parities == {0}:
        return GapParity.EVEN_FACET
    if parities == {1}:
        return GapParity.ODD_FACET
    return GapParity.NOT_FACET


def gale_evenness(subset: Sequence[int], n: int) -> bool:
    """Gale's criterion: any two gaps are separated by an even number of members."""
    s = _check_subset(subset, n)
    members = set(s)
    gaps = [i for i in range(1, n + 1) if i not in members]
    for a, b in zip(gaps, gaps[1:]):
        between = sum(1 for x in s if a < x < b)
        if between % 2:
            return False
    return True


def is_face(subset: Sequence[int], n: int, m: int) -> bool:
    """Shephard's criterion for C(n, m)."""
    s = _check_subset(subset, n)
    k = len(s)
    if k > m:
        raise InvalidParams(f"a face of C({n},{m}) has at most {m} vertices, got {k}")
    if k == 0:
        raise InvalidParams("empty subset")
    return odd_inner_blocks(s, n) <= m - k


# ---------------------------------------------------------------------------
# counting arrays


def _check_counting_args(n: int, k: int, s: int) -> None:
    if not 0 <= s <= k <= n:
        raise InvalidParams(f"need 0 <= s <= k <= n, got n={n}, k={k}, s={s}")


def _parity_match(dec: BlockDecomposition, parity: Optional[str]) -> bool:
    if parity is None:
        return True
    if parity == "odd":
        return dec.last_border_odd
    if parity == "even":
        return not dec.last_border_odd
    raise InvalidParams(f"parity must be 'odd', 'even' or None, got {parity!r}")


def count_arrays_enumerate(n: int, k: int, s: int, parity: Optional[str] = None) -> int:
    _check_counting_args(n, k, s)
    total = 0
    for sub in itertools.combinations(range(1, n + 1), k):
        dec = blocks(StarArray(n, sub))
        if dec.odd_inner == s and _parity_match(dec, parity):
            total += 1
    return total


def count_arrays_dp(n: int, k: int, s: int, parity: Optional[str] = None) -> int:
    """Left-to-right scan over (stars used, odd inner blocks, run state).

    Run state: ``None`` after a dot (or before position 1), ``("first", p)``
    inside the run that started at position 1, ``("inner", p)`` inside any
    other run, with ``p`` the run length parity.
    """
    _check_counting_args(n, k, s)
    if parity not in (None, "odd", "even"):
        raise InvalidParams(f"parity must be 'odd', 'even' or None, got {parity!r}")
    states = {(0, 0, None): 1}
    for pos in range(1, n + 1):
        nxt: dict = {}
        for (j, odd, run), cnt in states.items():
            # dot
            odd2 = odd + 1 if run is not None and run[0] == "inner" and run[1] == 1 else odd
            if odd2 <= s:
                key = (j, odd2, None)
                nxt[key] = nxt.get(key, 0) + cnt
            # star
            if j < k:
                if run is None:
                    run2 = ("first", 1) if pos == 1 else ("inner", 1)
                else:
                    run2 = (run[0], run[1] ^ 1)
                key = (j + 1, odd, run2)
                nxt[key] = nxt.get(key, 0) + cnt
        states = nxt
    total = 0
    for (j, odd, run), cnt in states.items():
        if j != k or odd != s:
            continue
        last_odd = run is not None and run[1] == 1
        if parity is None or (parity == "odd") == last_odd:
            total += cnt
    return total


def count_arrays(n: int, k: int, s: int, parity: Optional[str] = None) -> int:
    """``|A(n, k, s)|``, or its odd/even split by last border block parity."""
    if n <= EXHAUSTIVE_LIMIT:
        return count_arrays_enumerate(n, k, s, parity)
    return count_arrays_dp(n, k, s, parity)


# ---------------------------------------------------------------------------
# enumeration


def _check_cap(n: int, k: int, cap: Optional[int]) -> None:
    limit = ENUMERATION_CAP if cap is None else cap
    if binom(n, k) > limit:
        raise EnumerationTooLarge(f"C({n},{k}) = {binom(n, k)} exceeds enumeration cap {limit}")


def enumerate_faces(n: int, m: int, k: int, cap: Optional[int] = None) -> list:
    if not 1 <= k <= m < n:
        raise InvalidParams(f"need 1 <= k <= m < n, got n={n}, m={m}, k={k}")
    _check_cap(n, k, cap)
    return [sub for sub in itertools.combinations(range(1, n + 1), k) if is_face(sub, n, m)]


def enumerate_facets(n: int, m: int, parity: str = "both", cap: Optional[int] = None) -> list:
    """Facets by gap parity, cross-checked against the block classification.

    ``parity`` is ``"odd"``, ``"even"`` or ``"both"``.
    """
    if not n > m >= 1:
        raise InvalidParams(f"need n > m, got n={n}, m={m}")
    if parity not in ("odd", "even", "both"):
        raise InvalidParams(f"parity must be odd, even or both, got {parity!r}")
    _check_cap(n, m, cap)
    out = []
    for sub in itertools.combinations(range(1, n + 1), m):
        gp = gap_parity(sub, n)
        dec = blocks(StarArray(n, sub))
        if dec.odd_inner == 0:
            by_blocks = GapParity.ODD_FACET if dec.last_border_odd else GapParity.EVEN_FACET
        else:
            by_blocks = GapParity.NOT_FACET
        if gp is not by_blocks:
            raise AssertionError(
                f"gap parity {gp.name} and block classification {by_blocks.name} disagree on {sub}"
            )
        if gp is GapParity.NOT_FACET:
            continue
        if parity == "both" or (parity == "odd") == (gp is GapParity.ODD_FACET):
            out.append(sub)
    return out


def opposite_parity_facets(n: int, m: int, cap: Optional[int] = None) -> list:
    """Facets whose gap parity ``g`` differs from ``m`` mod 2."""
    return enumerate_facets(n, m, "even" if m % 2 else "odd", cap)


def face_count_from_arrays(n: int, m: int, k: int) -> int:
    """``sum_{s <= m-k} |A(n, k, s)|``; terms with ``s > k`` are empty."""
    return sum(count_arrays(n, k, s) for s in range(0, min(m - k, k) + 1))
