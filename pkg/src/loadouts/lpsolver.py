"""Exact rational simplex, optimal-face uniqueness and the loadout oracle.

The solver is a dense two-phase tableau method with Bland's rule over
Fractions.  It handles the general form

    max c^T x   s.t.   A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0

and reports a dual vector with every optimum so callers can check strong
duality and complementary slackness exactly.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import exactmath as em
from .designs import Design
from .errors import DimensionMismatch, InvalidParams, SolverIterationLimit

ITERATION_CAP = 50_000

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPInstance:
    A: tuple
    c: tuple
    b: tuple
    sense: str = "inequality"  # or "equality"

    def __post_init__(self):
        if self.sense not in ("inequality", "equality"):
            raise InvalidParams(f"sense must be inequality or equality, got {self.sense!r}")
        m, n = len(self.A), len(self.c)
        if len(self.b) != m or any(len(r) != n for r in self.A):
            raise DimensionMismatch("LP data dimensions are inconsistent")
        for x in itertools.chain(self.c, self.b, *self.A):
            if em.is_interval(x):
                raise InvalidParams("the simplex solver accepts rational data only")

    @classmethod
    def build(cls, A, c, b, sense="inequality") -> "LPInstance":
        q = em.as_rational
        return cls(
            tuple(tuple(q(x) for x in row) for row in A),
            tuple(q(x) for x in c),
            tuple(q(x) for x in b),
            sense,
        )

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def n(self) -> int:
        return len(self.c)

    def to_json(self) -> dict:
        s = em.to_json_scalar
        return {
            "m": self.m,
            "n": self.n,
            "sense": self.sense,
            "A": [[s(x) for x in row] for row in self.A],
            "c": [s(x) for x in self.c],
            "b": [s(x) for x in self.b],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LPInstance":
        return cls.build(obj["A"], obj["c"], obj["b"], obj.get("sense", "inequality"))


@dataclass
class Solution:
    status: str
    x: Optional[list] = None
    objective: Optional[Fraction] = None
    basis: tuple = ()
    dual: Optional[list] = None
    iterations: int = 0

    @property
    def support(self) -> tuple:
        if self.x is None:
            return ()
        return tuple(j + 1 for j, v in enumerate(self.x) if v != 0)

    def to_json(self) -> dict:
        s = em.to_json_scalar
        return {
            "status": self.status,
            "x": None if self.x is None else [s(v) for v in self.x],
            "objective": None if self.objective is None else s(self.objective),
            "basis": list(self.basis),
            "dual": None if self.dual is None else [s(v) for v in self.dual],
            "support": list(self.support),
        }


# ---------------------------------------------------------------------------
# tableau simplex


class _Tableau:
    """Rows ``T[i] = [a_i1 .. a_iN | rhs]`` with an explicit basis list."""

    def __init__(self, rows, basis, iteration_cap):
        self.T = rows
        self.basis = basis
        self.iterations = 0
        self.cap = iteration_cap

    def pivot(self, r, col):
        T = self.T
        prow = T[r]
        p = prow[col]
        if p != 1:
            T[r] = prow = [v / p for v in prow]
        for i, row in enumerate(T):
            if i != r:
                f = row[col]
                if f:
                    T[i] = [a - f * b for a, b in zip(row, prow)]
        self.basis[r] = col

    def reduced_costs(self, cost, allowed):
        """``c_j - c_B^T B^-1 A_j`` for allowed columns."""
        T, basis = self.T, self.basis
        out = {}
        for j in allowed:
            z = sum((cost[basis[i]] * T[i][j] for i in range(len(T)) if T[i][j]), Fraction(0))
            out[j] = cost[j] - z
        return out

    def run(self, cost, allowed):
        """Maximize ``cost`` over columns in ``allowed`` with Bland's rule."""
        allowed = sorted(allowed)
        while True:
            if self.iterations >= self.cap:
                raise SolverIterationLimit(f"simplex exceeded {self.cap} iterations")
            rc = self.reduced_costs(cost, allowed)
            in_basis = set(self.basis)
            entering = next((j for j in allowed if j not in in_basis and rc[j] > 0), None)
            if entering is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.T):
                a = row[entering]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering)
            self.iterations += 1


def solve_general(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), iteration_cap=ITERATION_CAP) -> Solution:
    """Maximize ``c^T x`` subject to mixed inequality/equality rows and ``x >= 0``.

    The dual vector lists inequality-row multipliers first, then equality rows.
    """
    q = em.as_rational
    n = len(c)
    c = [q(v) for v in c]
    rows_ub = [[q(v) for v in r] for r in A_ub]
    rows_eq = [[q(v) for v in r] for r in A_eq]
    b_ub = [q(v) for v in b_ub]
    b_eq = [q(v) for v in b_eq]
    if len(rows_ub) != len(b_ub) or len(rows_eq) != len(b_eq):
        raise DimensionMismatch("row count does not match right-hand side")
    if any(len(r) != n for r in rows_ub + rows_eq):
        raise DimensionMismatch("row length does not match cost vector")
    m_ub, m_eq = len(rows_ub), len(rows_eq)
    m = m_ub + m_eq

    # columns: x (n) | slacks (m_ub) | artificials (one per row needing one)
    n_slack = m_ub
    flips = []
    needs_art = []
    for i in range(m):
        rhs = b_ub[i] if i < m_ub else b_eq[i - m_ub]
        flips.append(rhs < 0)
        needs_art.append(i >= m_ub or rhs < 0)
    art_cols = {}
    ncols = n + n_slack
    for i in range(m):
        if needs_art[i]:
            art_cols[i] = ncols
            ncols += 1

    T = []
    basis = []
    for i in range(m):
        row = [Fraction(0)] * (ncols + 1)
        src = rows_ub[i] if i < m_ub else rows_eq[i - m_ub]
        rhs = b_ub[i] if i < m_ub else b_eq[i - m_ub]
        sgn = -1 if flips[i] else 1
        for j, v in enumerate(src):
            row[j] = sgn * v
        if i < m_ub:
            row[n + i] = Fraction(sgn)
        row[-1] = sgn * rhs
        if needs_art[i]:
            row[art_cols[i]] = Fraction(1)
            basis.append(art_cols[i])
        else:
            basis.append(n + i)
        T.append(row)

    tab = _Tableau(T, basis, iteration_cap)
    real_cols = list(range(n + n_slack))
    art_set = set(art_cols.values())

    if art_cols:
        phase1 = [Fraction(0)] * ncols
        for col in art_set:
            phase1[col] = Fraction(-1)
        tab.run(phase1, range(ncols))
        infeas = sum((tab.T[i][-1] for i in range(len(tab.T)) if tab.basis[i] in art_set), Fraction(0))
        if infeas > 0:
            return Solution(INFEASIBLE, iterations=tab.iterations)
        # drive artificials out; drop rows that are redundant
        keep_rows = []
        for i in range(len(tab.T)):
            if tab.basis[i] in art_set:
                col = next((j for j in real_cols if tab.T[i][j] != 0), None)
                if col is None:
                    continue
                tab.pivot(i, col)
            keep_rows.append(i)
        dropped = [i for i in range(len(tab.T)) if i not in keep_rows]
        tab.T = [tab.T[i] for i in keep_rows]
        tab.basis = [tab.basis[i] for i in keep_rows]
        row_ids = [i for i in range(m) if i not in _dropped_original_rows(dropped, m)]
    else:
        row_ids = list(range(m))

    cost = [Fraction(0)] * ncols
    for j in range(n):
        cost[j] = c[j]
    status = tab.run(cost, real_cols)
    if status == UNBOUNDED:
        return Solution(UNBOUNDED, iterations=tab.iterations)

    xfull = [Fraction(0)] * ncols
    for i, col in enumerate(tab.basis):
        xfull[col] = tab.T[i][-1]
    x = xfull[:n]
    obj = sum((c[j] * x[j] for j in range(n)), Fraction(0))

    dual = _recover_dual(c, rows_ub, rows_eq, flips, tab.basis, row_ids, n, m_ub)
    return Solution(OPTIMAL, x, obj, tuple(sorted(tab.basis)), dual, tab.iterations)


def _dropped_original_rows(dropped, m):
    # tableau rows are never permuted, so tableau index == original row index
    return set(dropped)


def _recover_dual(c, rows_ub, rows_eq, flips, basis, row_ids, n, m_ub):
    """Solve ``B^T y = c_B`` on the kept rows; dropped rows get multiplier 0."""
    m = len(rows_ub) + len(rows_eq)
    if not row_ids:
        return [Fraction(0)] * m

    def column(j):
        col = []
        for i in row_ids:
            if j < n:
                src = rows_ub[i] if i < m_ub else rows_eq[i - m_ub]
                v = src[j]
            else:
                v = Fraction(int(j - n == i))
            col.append(-v if flips[i] else v)
        return col

    B = [column(j) for j in basis]  # rows of B^T
    cB = [c[j] if j < n else Fraction(0) for j in basis]
    yk = em.solve_linear(B, cB)
    y = [Fraction(0)] * m
    for i, v in zip(row_ids, yk):
        y[i] = -v if flips[i] else v
    return y


def solve(inst: LPInstance, iteration_cap: int = ITERATION_CAP) -> Solution:
    """Exact optimal basic solution of ``LP(A, c, b)`` or ``LP_=(A, c, b)``."""
    if inst.sense == "inequality":
        return solve_general(inst.c, inst.A, inst.b, iteration_cap=iteration_cap)
    return solve_general(inst.c, A_eq=inst.A, b_eq=inst.b, iteration_cap=iteration_cap)


# ---------------------------------------------------------------------------
# optimal face


@dataclass
class UniquenessReport:
    unique: bool
    support: tuple
    witness: Optional[list] = None
    coordinate: Optional[int] = None
    lp_solves: int = 0

    def to_json(self) -> dict:
        return {
            "unique": self.unique,
            "support": list(self.support),
            "witness": None if self.witness is None else [em.to_json_scalar(v) for v in self.witness],
            "coordinate": self.coordinate,
        }


def _face_constraints(inst: LPInstance, objective: Fraction):
    """Constraint blocks describing the optimal face."""
    A = [list(r) for r in inst.A]
    b = list(inst.b)
    if inst.sense == "inequality":
        return A, b, [list(inst.c)], [objective]
    return [], [], A + [list(inst.c)], b + [objective]


def optimal_face_unique(inst: LPInstance, sol: Solution) -> UniquenessReport:
    """Decide uniqueness by maximizing and minimizing each coordinate over the optimal face.

    Coordinates with a strictly positive reduced cost under the reported dual
    are zero on the whole face by complementary slackness and need no solve.
    """
    if sol.status != OPTIMAL:
        raise InvalidParams("uniqueness is only defined at an optimal solution")
    A_ub, b_ub, A_eq, b_eq = _face_constraints(inst, sol.objective)
    n = inst.n
    pinned = set()
    if sol.dual is not None:
        for j in range(n):
            col = [inst.A[i][j] for i in range(inst.m)]
            if em.dot(sol.dual, col) > inst.c[j]:
                pinned.add(j)
    solves = 0
    for j in range(n):
        if j in pinned:
            continue
        for direction in (1, -1):
            obj = [Fraction(0)] * n
            obj[j] = Fraction(direction)
            res = solve_general(obj, A_ub, b_ub, A_eq, b_eq)
            solves += 1
            if res.status == UNBOUNDED:
                witness = _witness_beyond(A_ub, b_ub, A_eq, b_eq, j, sol.x[j] + 1)
                return UniquenessReport(False, sol.support, witness, j + 1, solves)
            if res.status != OPTIMAL:
                raise ArithmeticError("optimal face is empty at a reported optimum")
            if res.x[j] != sol.x[j]:
                return UniquenessReport(False, sol.support, res.x, j + 1, solves)
    return UniquenessReport(True, sol.support, None, None, solves)


def _witness_beyond(A_ub, b_ub, A_eq, b_eq, j, value):
    n = len(A_ub[0]) if A_ub else len(A_eq[0])
    row = [Fraction(0)] * n
    row[j] = Fraction(1)
    res = solve_general([Fraction(0)] * n, A_ub, b_ub, A_eq + [row], b_eq + [value])
    return res.x


# ---------------------------------------------------------------------------
# loadout oracle


@dataclass
class LoadoutCheck:
    confirmed: bool
    subset: tuple
    b: list
    solution: Solution
    uniqueness: Optional[UniquenessReport] = None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "status": "confirmed" if self.confirmed else "refuted",
            "subset": list(self.subset),
            "b": [em.to_json_scalar(v) for v in self.b],
            "solution": self.solution.to_json(),
            "unique": None if self.uniqueness is None else self.uniqueness.unique,
            "witness": None
            if self.uniqueness is None or self.uniqueness.witness is None
            else [em.to_json_scalar(v) for v in self.uniqueness.witness],
            "reason": self.reason,
            "scope": "refutation applies only to the tested resource vector",
        }


def _require_rational(d: Design) -> None:
    if not d.is_rational:
        raise InvalidParams("the simplex oracle accepts rational designs only")


def verify_loadout(
    d: Design,
    L: Sequence[int],
    x_witness: Optional[Sequence] = None,
    slack: Optional[Sequence] = None,
) -> LoadoutCheck:
    """Check that ``L`` is the support of the unique optimum of ``LP(A, c, b)``.

    ``b = A x + slack`` with ``x`` the witness (default: indicator of ``L``) and
    ``slack`` an optional nonnegative vector (default zero).
    """
    _require_rational(d)
    L = tuple(sorted(set(L)))
    if not L or L[0] < 1 or L[-1] > d.n:
        raise InvalidParams(f"{list(L)} is not a nonempty subset of [1..{d.n}]")
    if x_witness is None:
        x = [Fraction(int(j + 1 in L)) for j in range(d.n)]
    else:
        x = [em.as_rational(v) for v in x_witness]
        if len(x) != d.n or any(v < 0 for v in x):
            raise InvalidParams("witness must be a nonnegative vector of length n")
        if tuple(j + 1 for j, v in enumerate(x) if v) != L:
            raise InvalidParams("witness support differs from the subset")
    b = em.matvec(d.A, x)
    if slack is not None:
        s = [em.as_rational(v) for v in slack]
        if len(s) != d.m or any(v < 0 for v in s):
            raise InvalidParams("slack must be a nonnegative vector of length m")
        b = [bi + si for bi, si in zip(b, s)]
    inst = LPInstance(d.A, d.c, tuple(b), "inequality")
    sol = solve(inst)
    if sol.status != OPTIMAL:
        return LoadoutCheck(False, L, b, sol, None, f"LP is {sol.status}")
    rep = optimal_face_unique(inst, sol)
    if not rep.unique:
        return LoadoutCheck(False, L, b, sol, rep, "optimum is not unique")
    if sol.support != L:
        return LoadoutCheck(False, L, b, sol, rep, f"unique optimum has support {list(sol.support)}")
    return LoadoutCheck(True, L, b, sol, rep, "")


def random_witness(L: Sequence[int], n: int, rng: random.Random, denom: int = 16) -> list:
    """Positive rational weights on ``L``, zero elsewhere."""
    members = set(L)
    return [Fraction(rng.randint(1, 4 * denom), denom) if j + 1 in members else Fraction(0) for j in range(n)]


def find_loadout_witness(d: Design, L: Sequence[int]) -> Optional[LoadoutCheck]:
    """Search unit resource vectors ``b = A 1_L + 1_T`` over slack patterns ``T``.

    If ``L`` is a loadout, some slack pattern ``T`` makes ``L`` plus the slack
    columns of ``T`` a simplicial cell of ``([A | I], (c, 0))``; any strictly
    positive weights on that cell then work, so unit weights suffice and the
    search is complete.
    """
    L = tuple(sorted(L))
    for t in range(0, d.m - len(L) + 1):
        for T in itertools.combinations(range(d.m), t):
            slack = [Fraction(int(i in T)) for i in range(d.m)]
            check = verify_loadout(d, L, slack=slack)
            if check.confirmed:
                return check
    return None


def oracle_loadouts(d: Design, k: int) -> list:
    """All ``k``-subsets confirmed by the simplex oracle, in lexicographic order."""
    _require_rational(d)
    return [L for L in itertools.combinations(range(1, d.n + 1), k) if find_loadout_witness(d, L)]


# ---------------------------------------------------------------------------
# brute-force reference


def brute_force_optimum(inst: LPInstance) -> Optional[Fraction]:
    """Best objective over all basic feasible solutions of the slack form.

    Returns ``None`` when there is no basic feasible solution.  Meaningful as a
    reference only for bounded instances.
    """
    m, n = inst.m, inst.n
    if inst.sense == "inequality":
        cols = [[inst.A[i][j] for i in range(m)] for j in range(n)] + [
            [Fraction(int(i == r)) for i in range(m)] for r in range(m)
        ]
        cost = list(inst.c) + [Fraction(0)] * m
    else:
        cols = [[inst.A[i][j] for i in range(m)] for j in range(n)]
        cost = list(inst.c)
    rnk = em.rank([[col[i] for col in cols] for i in range(m)]) if cols else 0
    # any rnk independent rows carry the whole system
    rows = next(
        sel
        for sel in itertools.combinations(range(m), rnk)
        if em.rank([[col[i] for col in cols] for i in sel]) == rnk
    )
    best = None
    for basis in itertools.combinations(range(len(cols)), rnk):
        B = [[cols[j][i] for j in basis] for i in rows]
        if em.det(B) == 0:
            continue
        xb = em.solve_linear(B, [inst.b[i] for i in rows])
        if any(v < 0 for v in xb):
            continue
        full = [Fraction(0)] * len(cols)
        for j, v in zip(basis, xb):
            full[j] = v
        ok = all(
            sum((cols[j][i] * full[j] for j in range(len(cols))), Fraction(0)) == inst.b[i]
            for i in range(m)
        )
        if not ok:
            continue
        val = sum((cost[j] * full[j] for j in range(len(cols))), Fraction(0))
        if best is None or val > best:
            best = val
    return best
