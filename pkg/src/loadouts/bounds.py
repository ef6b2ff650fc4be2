"""Upper and lower bounds on k-loadout counts and the sweep that checks them."""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from . import cells, cyclic, designs, lpsolver
from . import exactmath as em
from .errors import BoundViolation, InvalidParams, LoadoutError

SWEEP_KINDS = ("exact_m2", "exact_m3", "moment_curve")
METHODS = ("cells", "oracle", "both")
EXACT_M3_BITS_CAP = 1024


def _check_nmk(n: int, m: int, k: int) -> None:
    if not all(isinstance(v, int) for v in (n, m, k)) or not n > m >= k >= 2:
        raise InvalidParams(f"need n > m >= k >= 2, got n={n}, m={m}, k={k}")


def upper_bound(n: int, m: int, k: int) -> int:
    """``f_{k-1}(C(n+1, m)) - binom(m, k-1)``."""
    _check_nmk(n, m, k)
    return cyclic.fvector(n + 1, m)[k - 1] - cyclic.binom(m, k - 1)


def moment_curve_bound(n: int, m: int, k: int) -> tuple:
    """Generic moment-curve lower bound as ``(value, case label)``."""
    _check_nmk(n, m, k)
    f = Fraction(cyclic.face_count(n, m, k - 1))
    if 2 * k < m:
        return f, "k<m/2"
    if m % 2 == 1:
        return f / 2, "m odd"
    if 2 * k == m:
        return f / 2, "k=m/2"
    return f / 4, "k>m/2, m even"


def lower_bound(n: int, m: int, k: int) -> tuple:
    """Best construction bound as ``(value, label)``; m = 2, 3 use the exact designs."""
    _check_nmk(n, m, k)
    if m == 2:
        return Fraction(n - 1), "exact m=2"
    if m == 3:
        return (Fraction(2 * n - 5), "exact m=3") if k == 3 else (Fraction(3 * n - 6), "exact m=3")
    return moment_curve_bound(n, m, k)


def render_count(q: Fraction):
    """Integers as ints, other rationals as ``"p/q"``."""
    return q.numerator if q.denominator == 1 else em.to_json_scalar(q)


# ---------------------------------------------------------------------------
# asymptotics


@dataclass
class AsymptoticReport:
    m: int
    k: int
    rows: list  # (n, ratio)
    nondecreasing: bool
    drops: list

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "rows": [{"n": n, "ratio": em.to_json_scalar(r), "approx": float(r)} for n, r in self.rows],
            "nondecreasing": self.nondecreasing,
            "drops": self.drops,
        }


def asymptotic_ratio(n: int, m: int, k: int) -> Fraction:
    return Fraction(cyclic.face_count(n, m, k - 1), cyclic.face_count(n + 1, m, k - 1))


def asymptotic_report(m: int, k: int, n_list: Iterable[int]) -> AsymptoticReport:
    ns = list(n_list)
    if any(n <= m for n in ns):
        raise InvalidParams(f"every n must exceed m = {m}")
    if not 1 <= k <= m:
        raise InvalidParams(f"need 1 <= k <= m, got k = {k}")
    rows = [(n, asymptotic_ratio(n, m, k)) for n in ns]
    drops = [rows[i + 1][0] for i in range(len(rows) - 1) if rows[i + 1][1] < rows[i][1]]
    return AsymptoticReport(m, k, rows, not drops, drops)


# ---------------------------------------------------------------------------
# reports and sweeps


@dataclass
class BoundReport:
    n: int
    m: int
    k: int
    kind: str
    upper: int
    lower: Fraction
    lower_label: str
    lower_exact: Optional[Fraction] = None
    achieved: Optional[int] = None
    achieved_oracle: Optional[int] = None
    tight: Optional[bool] = None
    runtime_ms: int = 0
    status: str = "ok"

    def violations(self) -> list:
        out = []
        if self.lower > self.upper:
            out.append(f"lower {self.lower} exceeds upper {self.upper}")
        for val in (self.achieved, self.achieved_oracle):
            if val is not None and not self.lower <= val <= self.upper:
                out.append(f"achieved {val} outside [{self.lower}, {self.upper}]")
        return out

    def check(self) -> None:
        problems = self.violations()
        if problems:
            raise BoundViolation(f"{self.kind} {self.key}: " + "; ".join(problems))

    @property
    def key(self) -> tuple:
        return (self.n, self.m, self.k)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "kind": self.kind,
            "lower": render_count(self.lower),
            "lower_label": self.lower_label,
            "lower_exact": None if self.lower_exact is None else render_count(self.lower_exact),
            "achieved": self.achieved,
            "achieved_oracle": self.achieved_oracle,
            "upper": self.upper,
            "tight": self.tight,
            "runtime_ms": self.runtime_ms,
            "status": self.status,
        }

    CSV_COLUMNS = ("n", "m", "k", "kind", "lower", "achieved", "upper", "tight", "runtime_ms")

    def csv_row(self) -> list:
        row = self.to_json()
        out = []
        for col in self.CSV_COLUMNS:
            v = row[col]
            out.append("" if v is None else str(v).lower() if isinstance(v, bool) else str(v))
        return out


def exact_m3_cells(n: int) -> list:
    """The three certificate families ``{1,2,3}``, ``{1,j,j+1}``, ``{2,j,j+1}``."""
    fams = [(1, 2, 3)]
    for j in range(3, n):
        fams.append((1, j, j + 1))
        fams.append((2, j, j + 1))
    return fams


def exact_m3_certificates(n: int, bits_cap: int = EXACT_M3_BITS_CAP) -> list:
    d = designs.exact_design_m3(n)
    out = []
    for C in exact_m3_cells(n):
        res = cells.inequality_cell_certificate(d, C, cap=bits_cap)
        if not isinstance(res, cells.DualCertificate):
            raise ArithmeticError(f"{list(C)} failed to certify: {res.reason}")
        out.append(res)
    return out


def count_from_cells(cell_sets: Iterable[tuple], k: int) -> int:
    """Distinct ``k``-subsets of the given cells."""
    found = set()
    for C in cell_sets:
        found.update(itertools.combinations(sorted(C), k))
    return len(found)


def _design_for(kind: str, n: int, m: int, perturb=None):
    if kind == "exact_m2":
        d = designs.exact_design_m2(n)
    elif kind == "exact_m3":
        d = designs.exact_design_m3(n)
    elif kind == "moment_curve":
        d = designs.moment_curve_design(n, m)
    else:
        raise InvalidParams(f"sweep supports kinds {SWEEP_KINDS}, got {kind!r}")
    if perturb is not None:
        d = designs.perturb(d, perturb)
    return d


def bound_row(kind: str, n: int, m: int, k: int, method: str = "both", cap=None, perturb=None) -> BoundReport:
    """One sweep row; library errors and sandwich violations land in ``status``."""
    if kind == "exact_m2":
        m = 2
    elif kind == "exact_m3":
        m = 3
    if method not in METHODS:
        raise InvalidParams(f"method must be one of {METHODS}, got {method!r}")
    start = time.perf_counter()
    upper = upper_bound(n, m, k)
    if kind == "moment_curve":
        lower, label = moment_curve_bound(n, m, k)
        lower_exact = lower_bound(n, m, k)[0] if m <= 3 else None
    else:
        lower, label = lower_bound(n, m, k)
        lower_exact = None
    rep = BoundReport(n, m, k, kind, upper, lower, label, lower_exact)
    try:
        if kind == "exact_m3":
            if method != "cells":
                rep.status = "cells_only"
            certs = exact_m3_certificates(n)
            rep.achieved = count_from_cells((c.subset for c in certs), k)
        else:
            d = _design_for(kind, n, m, perturb)
            if method in ("cells", "both"):
                res = cells.enumerate_inequality_loadouts(d, k, cap=cap)
                if isinstance(res, cells.NonGeneric):
                    rep.status = "non_generic"
                else:
                    rep.achieved = len(res)
            if method in ("oracle", "both"):
                found = lpsolver.oracle_loadouts(d, k)
                rep.achieved_oracle = len(found)
                if rep.achieved is None and rep.status == "ok":
                    rep.achieved = rep.achieved_oracle
                elif rep.achieved is not None and rep.achieved != rep.achieved_oracle:
                    rep.status = "oracle_disagreement"
    except LoadoutError as exc:
        rep.status = f"error:{exc.code}"
    except ArithmeticError as exc:
        rep.status = f"error:{type(exc).__name__}"
    rep.runtime_ms = int(round((time.perf_counter() - start) * 1000))
    if rep.achieved is not None:
        rep.tight = rep.achieved == upper
    if rep.violations():
        rep.status = "bound_violation"
    return rep


def _row_job(args):
    return bound_row(*args)


def sweep(
    kind: str,
    n_range: Iterable[int],
    m: int,
    k_set: Iterable[int],
    method: str = "both",
    jobs: int = 1,
    cap=None,
    perturb=None,
    strict: bool = True,
) -> list:
    """Rows for every ``(n, k)``, ordered by ``(n, m, k)``.

    With ``strict`` a row whose achieved count leaves ``[lower, upper]`` raises
    :class:`BoundViolation` after the whole sweep has run; the rows ride along
    on the exception as ``rows``.
    """
    if kind not in SWEEP_KINDS:
        raise InvalidParams(f"sweep supports kinds {SWEEP_KINDS}, got {kind!r}")
    if kind == "exact_m2":
        m = 2
    elif kind == "exact_m3":
        m = 3
    tasks = [(kind, n, m, k, method, cap, perturb) for n in n_range for k in k_set]
    for _, n, _, k, *_ in tasks:
        _check_nmk(n, m, k)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row_job, tasks))
    else:
        rows = [_row_job(t) for t in tasks]
    rows.sort(key=lambda r: r.key)
    bad = [r for r in rows if r.status == "bound_violation"]
    if strict and bad:
        exc = BoundViolation("; ".join(f"{r.kind} {r.key}: {', '.join(r.violations())}" for r in bad))
        exc.rows = rows
        raise exc
    return rows
