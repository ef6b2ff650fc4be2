"""Acceptance criteria 1-9, one PASS/FAIL line each.

Run with ``pytest -v tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""

import itertools
import random
import time
from fractions import Fraction as F

import pytest

from loadouts import bounds as B
from loadouts import cells
from loadouts import cyclic as cy
from loadouts import designs as D
from loadouts import exactmath as em
from loadouts import lpsolver as lp


def report(number, title, problems, elapsed, limit):
    if limit is not None and elapsed > limit:
        problems = problems + [f"took {elapsed:.1f} s, limit {limit} s"]
    status = "PASS" if not problems else "FAIL"
    line = f"{status} criterion {number}: {title} ({elapsed:.1f} s)"
    for p in problems[:10]:
        line += f"\n    {p}"
    if len(problems) > 10:
        line += f"\n    ... {len(problems) - 10} more"
    return status == "PASS", line


def criterion_1():
    problems = []
    for r in B.sweep("exact_m2", range(3, 13), 2, [2], method="both", strict=False):
        if not (r.achieved == r.achieved_oracle == r.n - 1 == r.upper and r.tight):
            problems.append(f"n={r.n}: achieved {r.achieved}/{r.achieved_oracle}, upper {r.upper}")
    return "exact m=2 tightness, n=3..12", problems, 10


def criterion_2():
    problems = []
    for n in range(4, 10):
        d = D.exact_design_m3(n)
        certs = []
        for C in B.exact_m3_cells(n):
            res = cells.inequality_cell_certificate(d, C, cap=B.EXACT_M3_BITS_CAP)
            if not isinstance(res, cells.DualCertificate):
                problems.append(f"n={n} {C}: {res}")
                continue
            margins = [res.strict_margin, res.positivity_margin]
            if not all(em.sign(v, cap=B.EXACT_M3_BITS_CAP) > 0 for v in margins):
                problems.append(f"n={n} {C}: margins not certified positive")
            certs.append(res)
        for k, want in ((3, 2 * n - 5), (2, 3 * n - 6)):
            got = B.count_from_cells((c.subset for c in certs), k)
            upper = B.upper_bound(n, 3, k)
            if not (got >= want and got == upper):
                problems.append(f"n={n} k={k}: achieved {got}, want >= {want} and = {upper}")
        for r in B.sweep("exact_m3", [n], 3, [2, 3], method="cells", strict=False):
            if not r.tight:
                problems.append(f"sweep row {r.key} not tight")
    return "exact m=3 certificate families, n=4..9", problems, 30


def criterion_3():
    problems = []
    for m in range(2, 7):
        want = cells.expected_cofactor_sign(m)
        for n in range(m + 1, 10):
            d = D.moment_curve_design(n, m)
            for C in cy.opposite_parity_facets(n, m):
                alpha, beta = cells.hyperplane_coefficients(d, C)
                if any(em.sign(v) != want for v in alpha + [beta]):
                    problems.append(f"m={m} n={n} {C}: cofactor sign")
                cert = cells.certificate_from_facet(d, C)
                if not isinstance(cert, cells.DualCertificate):
                    problems.append(f"m={m} n={n} {C}: no certificate")
                    continue
                if m > 4:
                    continue
                for r in range(1, m + 1):
                    for L in itertools.combinations(C, r):
                        if not lp.verify_loadout(d, L).confirmed:
                            problems.append(f"m={m} n={n} {C}: subset {L} refuted")
    return "facet certificates, m=2..6, n<=9", problems, 120


def criterion_4():
    problems = []
    rows = B.sweep("moment_curve", range(5, 10), 4, [2, 3, 4], method="cells", strict=False)
    for r in rows:
        problems += [f"{r.key}: {v}" for v in r.violations()]
    (r6,) = [r for r in rows if r.key == (6, 4, 4)]
    if not (r6.achieved >= 3 and r6.lower == F(9, 4) and r6.upper == 10):
        problems.append(f"(6,4,4): achieved {r6.achieved}, lower {r6.lower}, upper {r6.upper}")
    odd = {(1, 2, 3, 6), (1, 3, 4, 6), (1, 4, 5, 6)}
    if not odd <= set(cells.enumerate_inequality_loadouts(D.moment_curve_design(6, 4), 4)):
        problems.append("(6,4,4): odd facets missing")
    return "lower <= achieved <= upper, m=4, n=5..9, k=2..4", problems, 300


def criterion_5():
    problems = []
    for m in range(2, 7):
        for n in range(m + 1, 13):
            f = cy.fvector(n, m)
            for k in range(1, m + 1):
                by_gale = len(cy.enumerate_faces(n, m, k))
                by_arrays = cy.face_count_from_arrays(n, m, k)
                if not f[k - 1] == by_gale == by_arrays:
                    problems.append(f"n={n} m={m} k={k}: {f[k - 1]} {by_gale} {by_arrays}")
    return "f-vector formula vs enumeration vs arrays, n<=12", problems, 60


def _facets_containing(sub, n, m):
    rest = [i for i in range(1, n + 1) if i not in sub]
    kinds = set()
    for extra in itertools.combinations(rest, m - len(sub)):
        g = cy.gap_parity(tuple(sorted(sub + extra)), n)
        if g is not cy.GapParity.NOT_FACET:
            kinds.add(g)
    return kinds


def criterion_6():
    problems = []
    for n in range(3, 13):
        for m in range(2, min(n, 7)):
            if len(cy.enumerate_facets(n, m)) != cy.facet_count(n, m):
                problems.append(f"facet count n={n} m={m}")
    both = {cy.GapParity.ODD_FACET, cy.GapParity.EVEN_FACET}
    for n in range(3, 11):
        for m in range(2, min(n, 7)):
            for k in range(1, m + 1):
                for sub in itertools.combinations(range(1, n + 1), k):
                    if cy.odd_inner_blocks(sub, n) < m - k and _facets_containing(sub, n, m) != both:
                        problems.append(f"containment n={n} m={m} {sub}")
    for n in range(3, 13):
        for m in range(2, min(n, 7)):
            for k in range(1, m + 1):
                s = m - k
                if s > k:
                    continue  # no arrays at all
                odd, even = cy.count_arrays(n, k, s, "odd"), cy.count_arrays(n, k, s, "even")
                if odd > even:
                    problems.append(f"odd <= even fails at n={n} m={m} k={k}: {odd} > {even}")
                if m % 2 == 0 and 2 * k > m:
                    rest = cy.count_arrays(n, k, s - 1) if s >= 1 else 0
                    if even > 3 * odd + rest:
                        problems.append(
                            f"even <= 3 odd + rest fails at n={n} m={m} k={k}: {even} > 3*{odd} + {rest}"
                        )
    return "facet classification, containment and array parity inequalities", problems, 120


def criterion_7():
    problems = []
    targets = [D.exact_design_m2(n) for n in range(3, 9)]
    targets += [D.identity_design(n) for n in range(1, 6)]
    targets += [D.moment_curve_design(n, m) for m in range(2, 5) for n in range(m + 1, 8)]
    for d in targets:
        for k in range(1, d.m + 1):
            delta = set(cells.enumerate_inequality_loadouts(d, k, confirm=False))
            oracle = set(lp.oracle_loadouts(d, k))
            eq = set(cells.enumerate_equality_loadouts(d, k))
            tag = f"{d.kind} n={d.n} m={d.m} k={k}"
            if delta != oracle:
                problems.append(f"{tag}: cells {sorted(delta ^ oracle)} differ from oracle")
            if not delta <= eq:
                problems.append(f"{tag}: {sorted(delta - eq)} not equality loadouts")
    return "cell route equals simplex oracle", problems, None


def _random_lp(rng):
    m, n = rng.randint(1, 4), rng.randint(1, 5)
    q = lambda lo, hi: F(rng.randint(lo, hi), rng.randint(1, 4))
    A = [[q(0, 6) for _ in range(n)] for _ in range(m)]
    for j in range(n):
        if all(A[i][j] == 0 for i in range(m)):
            A[rng.randrange(m)][j] = q(1, 6)
    c = [q(-3, 6) for _ in range(n)]
    b = [q(0, 8) for _ in range(m)]
    return lp.LPInstance.build(A, c, b, rng.choice(["inequality", "equality"]))


def criterion_8():
    problems = []
    rng = random.Random(20260101)
    for i in range(500):
        inst = _random_lp(rng)
        sol = lp.solve(inst)
        ref = lp.brute_force_optimum(inst)
        if ref is None:
            if sol.status != lp.INFEASIBLE:
                problems.append(f"#{i}: brute force infeasible, simplex {sol.status}")
            continue
        if sol.status != lp.OPTIMAL or sol.objective != ref:
            problems.append(f"#{i}: simplex {sol.status} {sol.objective}, brute force {ref}")
            continue
        if em.dot(sol.dual, inst.b) != sol.objective:
            problems.append(f"#{i}: duality gap {em.dot(sol.dual, inst.b) - sol.objective}")
    return "simplex vs brute force on 500 instances", problems, 60


def criterion_9():
    problems = []
    for m in range(2, 7):
        for k in range(1, m + 1):
            r = B.asymptotic_ratio(200, m, k)
            if not r > F(95, 100):
                problems.append(f"m={m} k={k}: ratio {float(r):.4f} at n=200")
            rep = B.asymptotic_report(m, k, range(20, 201, 20))
            if not rep.nondecreasing:
                problems.append(f"m={m} k={k}: drops at {rep.drops}")
    return "face-count ratio at n=200 and its trend", problems, None


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


def run_criterion(number):
    start = time.perf_counter()
    title, problems, limit = CRITERIA[number - 1]()
    return report(number, title, problems, time.perf_counter() - start, limit)


@pytest.mark.parametrize("number", range(1, 10))
def test_criterion(number, capsys):
    ok, line = run_criterion(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    for i in range(1, 10):
        print(run_criterion(i)[1], flush=True)
