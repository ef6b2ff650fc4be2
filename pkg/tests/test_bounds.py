from fractions import Fraction as F

import pytest

from loadouts import bounds as B
from loadouts import cyclic
from loadouts.errors import BoundViolation, InvalidParams


def test_upper_bound_examples():
    assert B.upper_bound(5, 3, 3) == 5
    assert B.upper_bound(5, 2, 2) == 4
    assert B.upper_bound(6, 4, 4) == 10


def test_lower_bound_examples():
    assert B.lower_bound(6, 4, 4) == (F(9, 4), "k>m/2, m even")
    assert B.lower_bound(8, 5, 2) == (F(cyclic.face_count(8, 5, 1)), "k<m/2")
    assert B.lower_bound(7, 3, 3)[0] == 9
    assert B.lower_bound(7, 3, 2)[0] == 15
    assert B.lower_bound(7, 2, 2)[0] == 6


def test_moment_curve_bound_cases():
    assert B.moment_curve_bound(8, 5, 3)[1] == "m odd"
    assert B.moment_curve_bound(8, 4, 2)[1] == "k=m/2"
    assert B.moment_curve_bound(8, 6, 4)[0] == F(cyclic.face_count(8, 6, 3), 4)


def test_bad_parameters():
    for args in [(4, 4, 2), (6, 3, 1), (6, 3, 4)]:
        with pytest.raises(InvalidParams):
            B.upper_bound(*args)


def test_upper_versus_trivial_bound():
    for n in range(5, 16):
        assert B.upper_bound(n, 2, 2) < cyclic.binom(n, 2)
        assert B.upper_bound(n, 3, 3) < cyclic.binom(n, 3)
    # Neighborly polytopes: every k-subset with k <= m/2 is a face of C(n+1, m).
    for m in range(4, 7):
        for k in range(2, m // 2 + 1):
            for n in range(m + 1, 16):
                u = B.upper_bound(n, m, k)
                assert u == cyclic.binom(n + 1, k) - cyclic.binom(m, k - 1)
                assert u > cyclic.binom(n, k)
    for m in range(2, 7):
        for k in range(2, m + 1):
            for n in range(m + 1, 16):
                assert B.lower_bound(n, m, k)[0] <= B.upper_bound(n, m, k)


def test_small_m_lower_bounds_are_tight():
    for n in range(4, 20):
        assert B.lower_bound(n, 2, 2)[0] == B.upper_bound(n, 2, 2)
        assert B.lower_bound(n, 3, 2)[0] == B.upper_bound(n, 3, 2)
        assert B.lower_bound(n, 3, 3)[0] == B.upper_bound(n, 3, 3)


def test_render_count():
    assert B.render_count(F(9, 4)) == "9/4"
    assert B.render_count(F(6)) == 6


def test_asymptotic_examples():
    rep = B.asymptotic_report(4, 4, [100])
    assert rep.rows[0][1] > F(95, 100)
    for n in range(4, 30):
        assert B.asymptotic_ratio(n, 3, 2) == F(3 * n - 6, 3 * n - 3)
    rep = B.asymptotic_report(5, 3, range(6, 60))
    assert rep.nondecreasing and all(r < 1 for _, r in rep.rows)


def test_asymptotic_report_flags_drops():
    rep = B.asymptotic_report(2, 2, [10, 20])
    assert rep.nondecreasing and rep.drops == []
    rep = B.asymptotic_report(2, 2, [20, 10])
    assert rep.drops == [10]
    with pytest.raises(InvalidParams):
        B.asymptotic_report(4, 2, [4])


def test_sweep_exact_m2():
    rows = B.sweep("exact_m2", range(3, 9), 2, [2])
    for r in rows:
        assert r.achieved == r.achieved_oracle == r.n - 1 == r.upper
        assert r.tight and r.status == "ok"


def test_sweep_exact_m3():
    rows = B.sweep("exact_m3", range(4, 9), 3, [2, 3], method="cells")
    for r in rows:
        want = 3 * r.n - 6 if r.k == 2 else 2 * r.n - 5
        assert r.achieved == want == r.upper and r.tight


def test_exact_m3_oracle_request_is_marked():
    assert B.bound_row("exact_m3", 5, 3, 3).status == "cells_only"


def test_sweep_moment_curve_example():
    (r,) = B.sweep("moment_curve", [6], 4, [4])
    assert r.lower == F(9, 4) and r.upper == 10
    assert r.achieved == r.achieved_oracle == 3
    assert r.status == "ok" and not r.tight


def test_moment_curve_small_m_carries_exact_bound():
    r = B.bound_row("moment_curve", 6, 3, 3, method="cells")
    assert r.lower_label == "m odd" and r.lower_exact == 7
    assert r.to_json()["lower_exact"] == 7


def test_strict_sweep_raises_with_rows():
    # Nine tools on the m=4 moment curve only reach n-3 four-loadouts.
    with pytest.raises(BoundViolation) as info:
        B.sweep("moment_curve", [9], 4, [4], method="cells")
    (r,) = info.value.rows
    assert r.achieved == 6 and r.lower == F(27, 4) and r.status == "bound_violation"
    (r,) = B.sweep("moment_curve", [9], 4, [4], method="cells", strict=False)
    assert r.status == "bound_violation"


def test_sweep_rows_are_ordered_and_parallel_safe():
    serial = B.sweep("exact_m2", [6, 4, 5], 2, [2])
    parallel = B.sweep("exact_m2", [6, 4, 5], 2, [2], jobs=2)
    assert [r.key for r in serial] == [(4, 2, 2), (5, 2, 2), (6, 2, 2)]
    strip = lambda rows: [{**r.to_json(), "runtime_ms": 0} for r in rows]
    assert strip(serial) == strip(parallel)


def test_csv_row():
    r = B.bound_row("moment_curve", 6, 4, 4, method="cells")
    r.runtime_ms = 0
    assert r.csv_row() == ["6", "4", "4", "moment_curve", "9/4", "3", "10", "false", "0"]


def test_unknown_kind():
    with pytest.raises(InvalidParams):
        B.sweep("identity", [4], 2, [2])
