"""Cells of the regular subdivision of a design and the loadouts they certify.

A subset ``C`` of columns is a *cell* when some dual vector ``y`` satisfies
``y^T A_j = c_j`` for ``j`` in ``C`` and ``y^T A_j > c_j`` elsewhere; it is an
*inequality cell* when that ``y`` can also be taken strictly positive.

Strict inequalities are decided with the exact simplex solver by maximizing a
common margin ``eps <= 1``.  Outcomes that are not certificates
(:class:`NotACell`, :class:`NonGeneric`, :class:`WrongParity`) are returned as
values rather than raised.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import cyclic
from . import exactmath as em
from . import lpsolver
from .designs import Design, at_precision, require_valid
from .errors import (
    EnumerationTooLarge,
    IndeterminateSign,
    InvalidParams,
    OracleDisagreement,
    SignLemmaViolation,
    SingularMatrix,
)

ENUMERATION_CAP = 2_000_000


@dataclass
class DualCertificate:
    subset: tuple
    y: list
    equality_set: tuple
    strict_margin: Optional[object]  # None when C is every column
    positivity_margin: Optional[object] = None
    method: str = "lp"
    bits: Optional[int] = None

    def to_json(self) -> dict:
        s = em.to_json_scalar
        return {
            "subset": list(self.subset),
            "y": [s(v) for v in self.y],
            "strict_margin": None if self.strict_margin is None else s(self.strict_margin),
            "positivity_margin": None if self.positivity_margin is None else s(self.positivity_margin),
            "method": self.method,
        }


@dataclass
class NotACell:
    subset: tuple
    reason: str

    def to_json(self) -> dict:
        return {"status": "not_a_cell", "subset": list(self.subset), "reason": self.reason}


@dataclass
class NonGeneric:
    """A non-simplicial cell was met; ``witness`` is that cell."""

    subset: tuple
    witness: tuple
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "status": "non_generic",
            "subset": list(self.subset),
            "witness": list(self.witness),
            "reason": self.reason,
        }


@dataclass
class WrongParity:
    subset: tuple
    g: Optional[int]

    def to_json(self) -> dict:
        return {"status": "wrong_parity", "subset": list(self.subset), "g": self.g}


@dataclass
class CellRecord:
    subset: tuple
    simplicial: bool
    maximal: bool
    certificate: DualCertificate

    def to_json(self) -> dict:
        return {
            "subset": list(self.subset),
            "simplicial": self.simplicial,
            "maximal": self.maximal,
            "certificate": self.certificate.to_json(),
        }


CellResult = Union[DualCertificate, NotACell, NonGeneric]


def _normalize(d: Design, C: Sequence[int]) -> tuple:
    s = tuple(sorted(set(C)))
    if not s:
        raise InvalidParams("cell subsets must be nonempty")
    if s[0] < 1 or s[-1] > d.n:
        raise InvalidParams(f"{list(C)} is not a subset of [1..{d.n}]")
    return s


def _margins(d: Design, y: Sequence, C: tuple) -> dict:
    members = set(C)
    return {j: em.dot(y, d.column(j)) - d.c[j - 1] for j in range(1, d.n + 1) if j not in members}


def _min_scalar(vals):
    vals = list(vals)
    if not vals:
        return None
    if any(em.is_interval(v) for v in vals):
        return min(vals, key=lambda v: v.lower)
    return min(vals)


# ---------------------------------------------------------------------------
# simplicial checks


def is_simplicial(d: Design, C: Sequence[int]) -> bool:
    """Whether the columns indexed by ``C`` are linearly independent."""
    C = _normalize(d, C)
    if len(C) > d.m:
        return False
    cols = [d.column(j) for j in C]
    if not any(em.is_interval(x) for col in cols for x in col):
        return em.rank(cols) == len(C)
    # interval columns: look for a certified nonzero maximal minor
    for rows in itertools.combinations(range(d.m), len(C)):
        minor = [[col[i] for i in rows] for col in cols]
        if em.det(minor).excludes_zero():
            return True
    raise IndeterminateSign(f"rank of columns {list(C)} could not be certified", d.bits)


# ---------------------------------------------------------------------------
# strict-feasibility programs


def _margin_lp(d: Design, C: tuple, positive: bool):
    """Maximize eps over y with y^T A_C = c_C, y^T A_j >= c_j + eps off C, eps <= 1.

    Variables are ``(y+, y-, eps+, eps-)``.
    """
    m = d.m
    members = set(C)
    nvar = 2 * m + 2
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for j in range(1, d.n + 1):
        col = d.column(j)
        if j in members:
            A_eq.append(list(col) + [-v for v in col] + [0, 0])
            b_eq.append(d.c[j - 1])
        else:
            A_ub.append([-v for v in col] + list(col) + [1, -1])
            b_ub.append(-d.c[j - 1])
    cap = [0] * (2 * m) + [1, -1]
    A_ub.append(cap)
    b_ub.append(1)
    if positive:
        for i in range(m):
            row = [0] * nvar
            row[i], row[m + i], row[2 * m], row[2 * m + 1] = -1, 1, 1, -1
            A_ub.append(row)
            b_ub.append(0)
    obj = [0] * (2 * m) + [1, -1]
    sol = lpsolver.solve_general(obj, A_ub, b_ub, A_eq, b_eq)
    return sol


def _forced_tight(d: Design, C: tuple, y0: list) -> tuple:
    """Columns off ``C`` that are tight for every dual-feasible y tight on ``C``."""
    m = d.m
    members = set(C)
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for j in range(1, d.n + 1):
        col = d.column(j)
        if j in members:
            A_eq.append(list(col) + [-v for v in col])
            b_eq.append(d.c[j - 1])
        else:
            A_ub.append([-v for v in col] + list(col))
            b_ub.append(-d.c[j - 1])
    tight = []
    for j in range(1, d.n + 1):
        if j in members or em.dot(y0, d.column(j)) != d.c[j - 1]:
            continue
        col = d.column(j)
        sol = lpsolver.solve_general(list(col) + [-v for v in col], A_ub, b_ub, A_eq, b_eq)
        if sol.status == lpsolver.OPTIMAL and sol.objective == d.c[j - 1]:
            tight.append(j)
    return tuple(tight)


def _lp_certificate(d: Design, C: tuple, positive: bool) -> CellResult:
    if not d.is_rational:
        raise InvalidParams(
            "interval designs are certified only for sets of m independent columns"
        )
    sol = _margin_lp(d, C, positive)
    if sol.status == lpsolver.INFEASIBLE:
        return NotACell(C, "no dual vector is tight on the subset")
    if sol.status != lpsolver.OPTIMAL:
        raise ArithmeticError(f"margin program reported {sol.status}")
    m = d.m
    y = [sol.x[i] - sol.x[m + i] for i in range(m)]
    eps = sol.objective
    if eps > 0:
        margins = _margins(d, y, C)
        return DualCertificate(
            C,
            y,
            C,
            _min_scalar(margins.values()),
            min(y) if positive else None,
            "lp",
        )
    if eps < 0 or positive:
        return NotACell(C, f"best common margin is {eps}")
    # eps == 0: every dual-feasible y tight on C is tight on more columns, and that
    # larger tight set is a cell that cannot be simplicial
    extra = _forced_tight(d, C, y)
    return NonGeneric(C, tuple(sorted(C + extra)), "subset lies in a larger non-simplicial cell")


def _full_rank_certificate(d: Design, C: tuple, positive: bool, cap: int) -> CellResult:
    """Direct solve for ``|C| = m`` independent columns, escalating precision for intervals."""
    bits = d.bits or em.DEFAULT_BITS
    cur = d
    while True:
        M = [cur.column(j) for j in C]  # rows of A_C^T
        try:
            y = em.solve_linear(M, [cur.c[j - 1] for j in C])
        except SingularMatrix:
            if d.is_rational:
                return NotACell(C, "columns are linearly dependent")
            y = None
        undecided = y is None
        if y is not None:
            margins = _margins(cur, y, C)
            verdict = _classify(list(margins.values()), list(y) if positive else [])
            if verdict == "fail":
                return NotACell(C, "a strict inequality fails")
            if verdict == "tie":
                if positive:
                    return NotACell(C, "a margin is exactly zero")
                tied = tuple(sorted(C + tuple(j for j, v in margins.items() if v == 0)))
                return NonGeneric(C, tied, "extra columns are tight at the unique dual vector")
            undecided = verdict == "undecided"
            if not undecided:
                return DualCertificate(
                    C,
                    y,
                    C,
                    _min_scalar(margins.values()),
                    _min_scalar(y) if positive else None,
                    "lp" if cur.is_rational else "interval_solve",
                    None if cur.is_rational else bits,
                )
        if cur.is_rational or bits >= cap:
            raise IndeterminateSign(f"certificate for {list(C)} undecided at {bits} bits", bits)
        bits *= 2
        cur = at_precision(d, bits)


def _classify(margins: list, positives: list) -> str:
    """``ok``, ``fail``, ``tie`` (a margin is exactly zero) or ``undecided``."""
    verdict = "ok"
    for v, zero_is_tie in [(v, True) for v in margins] + [(v, False) for v in positives]:
        if em.is_interval(v):
            if v.upper < 0:
                return "fail"
            if not v.excludes_zero():
                verdict = "undecided"
        elif v < 0 or (v == 0 and not zero_is_tie):
            return "fail"
        elif v == 0 and verdict == "ok":
            verdict = "tie"
    return verdict


def cell_certificate(d: Design, C: Sequence[int], cap: int = em.MAX_BITS) -> CellResult:
    """Certificate that ``C`` is a cell, or the reason it is not."""
    C = _normalize(d, C)
    if len(C) == d.m and _independent(d, C):
        return _full_rank_certificate(d, C, False, cap)
    return _lp_certificate(d, C, False)


def inequality_cell_certificate(d: Design, C: Sequence[int], cap: int = em.MAX_BITS) -> CellResult:
    """Certificate with a strictly positive dual vector, or :class:`NotACell`.

    Failure here never proves that a subset is not a loadout.
    """
    C = _normalize(d, C)
    if len(C) > d.m:
        raise InvalidParams(f"an inequality cell has at most m = {d.m} columns")
    if len(C) == d.m and _independent(d, C):
        res = _full_rank_certificate(d, C, True, cap)
    else:
        res = _lp_certificate(d, C, True)
    if isinstance(res, NonGeneric):
        return NotACell(C, res.reason)
    return res


def _independent(d: Design, C: tuple) -> bool:
    try:
        return is_simplicial(d, C)
    except IndeterminateSign:
        return False


# ---------------------------------------------------------------------------
# enumeration


def _check_cap(n: int, m: int, cap: Optional[int]) -> None:
    limit = ENUMERATION_CAP if cap is None else cap
    total = cyclic.binom(n, m)
    if total > limit:
        raise EnumerationTooLarge(f"C({n},{m}) = {total} candidate bases exceed cap {limit}")


def maximal_cells(d: Design, cap: Optional[int] = None) -> Union[list, NonGeneric]:
    """Simplicial maximal cells, i.e. bases whose dual vector is strictly feasible.

    Returns :class:`NonGeneric` if some basis has a dual vector that is feasible
    but tight on an extra column.
    """
    if not d.is_rational:
        raise InvalidParams("enumeration runs on rational designs only")
    require_valid(d)
    _check_cap(d.n, d.m, cap)
    out = []
    for B in itertools.combinations(range(1, d.n + 1), d.m):
        try:
            y = em.solve_linear([d.column(j) for j in B], [d.c[j - 1] for j in B])
        except SingularMatrix:
            continue
        margins = _margins(d, y, B)
        low = min(margins.values()) if margins else None
        if low is not None and low < 0:
            continue
        if low == 0:
            tied = tuple(sorted(B + tuple(j for j, s in margins.items() if s == 0)))
            return NonGeneric(B, tied, "a dual-feasible basis is tight on extra columns")
        cert = DualCertificate(B, y, B, low, None, "lp")
        out.append(CellRecord(B, True, True, cert))
    return out


def enumerate_equality_loadouts(d: Design, k: int, cap: Optional[int] = None) -> Union[list, NonGeneric]:
    """Sorted ``k``-subsets that are simplicial cells."""
    if not 1 <= k <= d.m:
        raise InvalidParams(f"need 1 <= k <= m = {d.m}, got k = {k}")
    cells = maximal_cells(d, cap)
    if isinstance(cells, NonGeneric):
        return cells
    found = set()
    for rec in cells:
        found.update(itertools.combinations(rec.subset, k))
    return sorted(found)


def augmented_design(d: Design) -> Design:
    """``([A | I_m], (c, 0))``: slack columns turn inequality rows into equalities."""
    ident = em.identity(d.m)
    A = tuple(tuple(row) + tuple(ident[i]) for i, row in enumerate(d.A))
    c = tuple(d.c) + tuple(Fraction(0) for _ in range(d.m))
    return Design(d.m, d.n + d.m, A, c, "user", {"augmented_from": d.kind})


@dataclass
class InequalityLoadouts:
    k: int
    loadouts: list
    witnesses: dict = field(default_factory=dict)  # subset -> slack pattern used

    def __len__(self) -> int:
        return len(self.loadouts)

    def __iter__(self):
        return iter(self.loadouts)


def enumerate_inequality_loadouts(
    d: Design, k: int, cap: Optional[int] = None, confirm: bool = True
) -> Union[InequalityLoadouts, NonGeneric]:
    """``k``-loadouts of ``LP(A, c, b)`` through the subdivision of the slack-augmented design.

    With ``confirm`` each subset is also checked by the simplex oracle at
    ``b = A 1_L + 1_T``, where ``T`` are the slack columns of the maximal cell
    that produced it; a mismatch raises :class:`OracleDisagreement`.
    """
    if not 1 <= k <= d.m:
        raise InvalidParams(f"need 1 <= k <= m = {d.m}, got k = {k}")
    if not d.is_rational:
        raise InvalidParams("enumeration runs on rational designs only")
    require_valid(d)
    aug = augmented_design(d)
    cells = maximal_cells(aug, cap)
    if isinstance(cells, NonGeneric):
        real = tuple(j for j in cells.witness if j <= d.n)
        return NonGeneric(real, cells.witness, "augmented design: " + cells.reason)
    witnesses: dict = {}
    for rec in cells:
        real = [j for j in rec.subset if j <= d.n]
        slack = tuple(j - d.n - 1 for j in rec.subset if j > d.n)
        for L in itertools.combinations(real, k):
            witnesses.setdefault(L, slack)
    loadouts = sorted(witnesses)
    if confirm:
        for L in loadouts:
            T = witnesses[L]
            check = lpsolver.verify_loadout(d, L, slack=[Fraction(int(i in T)) for i in range(d.m)])
            if not check.confirmed:
                raise OracleDisagreement(
                    f"{list(L)} comes from a cell but the simplex oracle says: {check.reason}"
                )
    return InequalityLoadouts(k, loadouts, witnesses)


# ---------------------------------------------------------------------------
# moment-curve facet certificates


def expected_cofactor_sign(m: int) -> int:
    return -1 if (m // 2 + m + 1) % 2 else 1


def hyperplane_coefficients(d: Design, C: Sequence[int]) -> tuple:
    """``(alpha, beta)`` with the hyperplane through the columns of ``C`` as ``alpha.y = beta``.

    Expands the bordered determinant with a row of ones on top and a variable
    column ``y`` on the right along that last column.
    """
    C = tuple(sorted(C))
    m = d.m
    if len(C) != m:
        raise InvalidParams(f"need exactly m = {m} columns, got {len(C)}")
    cols = [d.column(j) for j in C]
    bordered = [[Fraction(1)] * m] + [[col[i] for col in cols] for i in range(m)]
    alpha = []
    for k in range(1, m + 1):
        minor = [row for r, row in enumerate(bordered) if r != k]
        sgn = 1 if (k + m) % 2 == 0 else -1
        alpha.append(sgn * em.det(minor))
    beta = (1 if (m + 1) % 2 == 0 else -1) * em.det(bordered[1:])
    return alpha, beta


def certificate_from_facet(d: Design, C: Sequence[int]) -> Union[DualCertificate, WrongParity]:
    """Dual vector ``alpha / beta`` for a facet whose gap parity differs from ``m`` mod 2."""
    if d.kind != "moment_curve":
        raise InvalidParams("facet certificates need a moment-curve design")
    C = _normalize(d, C)
    if len(C) != d.m:
        raise InvalidParams(f"need exactly m = {d.m} columns, got {len(C)}")
    alpha, beta = hyperplane_coefficients(d, C)
    want = expected_cofactor_sign(d.m)
    signs = [em.sign(a) for a in alpha] + [em.sign(beta)]
    if any(s != want for s in signs):
        raise SignLemmaViolation(
            f"cofactor signs {signs} for {list(C)} differ from the expected {want}"
        )
    g = cyclic.gap_parity(C, d.n).g
    if g is None or g % 2 == d.m % 2:
        return WrongParity(C, g)
    y = [a / beta for a in alpha]
    members = set(C)
    for j in C:
        if em.dot(y, d.column(j)) != d.c[j - 1]:
            raise ArithmeticError(f"hyperplane misses column {j}")
    margins = _margins(d, y, C)
    bad = [j for j, s in margins.items() if s <= 0]
    if bad:
        raise SignLemmaViolation(f"facet {list(C)} has non-positive margins at columns {bad}")
    assert all(j not in members for j in margins)
    return DualCertificate(C, y, C, _min_scalar(margins.values()), min(y), "facet_hyperplane")
