import itertools

import pytest

from loadouts import cyclic as cy
from loadouts.errors import EnumerationTooLarge, InvalidParams


def test_fvector_examples():
    assert cy.fvector(7, 3).entries == (7, 15, 10)
    assert cy.fvector(6, 4)[3] == 9
    for n in range(3, 10):
        assert cy.fvector(n, 2).entries == (n, n)
    with pytest.raises(InvalidParams):
        cy.fvector(4, 4)


@pytest.mark.parametrize("n", range(4, 15))
def test_m3_closed_forms(n):
    f = cy.fvector(n, 3)
    assert f[1] == 3 * n - 6 and f[2] == 2 * n - 4


def test_big_counts_serialize_as_strings():
    f = cy.fvector(2000, 14).to_json()
    assert isinstance(f["f"][-1], str) and int(f["f"][-1]) > 2**53
    assert f["f"][0] == 2000


def test_blocks_examples():
    dec = cy.blocks(cy.StarArray(9, (1, 3, 4, 7, 8, 9)))
    assert dec.first_border == (1,) and dec.last_border == (7, 8, 9)
    assert [b.members for b in dec.inner_blocks] == [(3, 4)] and not dec.inner_blocks[0].odd
    assert dec.last_border_odd
    dec = cy.blocks(cy.StarArray(6, (1, 4, 5, 6)))
    assert dec.first_border == (1,) and dec.inner_blocks == () and dec.last_border == (4, 5, 6)
    dec = cy.blocks(cy.StarArray(5, (2, 3)))
    assert dec.first_border == () and dec.last_border == () and dec.odd_inner == 0
    assert not dec.last_border_odd
    assert str(cy.StarArray(5, (2, 3))) == ".**.."


def test_star_array_validates():
    with pytest.raises(InvalidParams):
        cy.StarArray(4, (0, 2))
    with pytest.raises(InvalidParams):
        cy.StarArray(4, (2, 2))


def test_gap_parity_examples():
    assert cy.gap_parity((1, 4, 5, 6), 6) is cy.GapParity.ODD_FACET
    assert cy.gap_parity((3, 4, 5, 6), 6) is cy.GapParity.EVEN_FACET
    assert cy.gap_parity((1, 2, 4, 6), 6) is cy.GapParity.NOT_FACET
    assert cy.GapParity.ODD_FACET.g == 1 and cy.GapParity.EVEN_FACET.g == 2
    assert cy.GapParity.NOT_FACET.g is None


def test_is_face_examples():
    for j in range(1, 7):
        assert cy.is_face((j,), 6, 4)
    assert not cy.is_face((1, 3, 5), 6, 4)
    assert cy.is_face((1, 2, 3, 6), 6, 4)
    with pytest.raises(InvalidParams):
        cy.is_face((1, 2, 3, 4, 5), 6, 4)


def test_count_arrays_examples():
    assert cy.count_arrays(4, 2, 0) == 4
    assert cy.count_arrays(4, 2, 1) == 2
    with pytest.raises(InvalidParams):
        cy.count_arrays(4, 2, 3)


def test_parity_split_sums():
    for n in range(1, 11):
        for k in range(n + 1):
            for s in range(k + 1):
                assert cy.count_arrays(n, k, s, "odd") + cy.count_arrays(n, k, s, "even") == cy.count_arrays(n, k, s)


def _histogram(n, k):
    """(odd inner blocks, last border odd) -> count, by a direct scan of every k-subset."""
    hist = {}
    for sub in itertools.combinations(range(1, n + 1), k):
        odd_inner = 0
        last_odd = False
        start = prev = None
        for x in sub + (None,):
            if x is not None and prev is not None and x == prev + 1:
                prev = x
                continue
            if start is not None:
                size = prev - start + 1
                if prev == n:
                    last_odd = size % 2 == 1
                elif start != 1:
                    odd_inner += size % 2
            start = prev = x
        key = (odd_inner, last_odd)
        hist[key] = hist.get(key, 0) + 1
    return hist


@pytest.mark.parametrize("n", range(1, 21))
def test_dp_matches_enumeration(n):
    ks = range(n + 1) if n <= 16 else (0, 1, 2, 3, n // 2, n - 2, n - 1, n)
    for k in ks:
        hist = _histogram(n, k)
        for s in range(k + 1):
            odd = hist.get((s, True), 0)
            even = hist.get((s, False), 0)
            assert cy.count_arrays_dp(n, k, s, "odd") == odd
            assert cy.count_arrays_dp(n, k, s, "even") == even
            assert cy.count_arrays_dp(n, k, s) == odd + even
        if n <= 12:
            for s in range(k + 1):
                assert cy.count_arrays_enumerate(n, k, s) == hist.get((s, True), 0) + hist.get((s, False), 0)


def test_dp_used_beyond_limit():
    # n = 30 is past the exhaustive range; compare with a binomial identity
    assert sum(cy.count_arrays(30, 5, s) for s in range(6)) == cy.binom(30, 5)


def test_enumerate_faces_examples():
    assert cy.enumerate_faces(6, 4, 4) == [
        (1, 2, 3, 4), (1, 2, 3, 6), (1, 2, 4, 5), (1, 2, 5, 6), (1, 3, 4, 6),
        (1, 4, 5, 6), (2, 3, 4, 5), (2, 3, 5, 6), (3, 4, 5, 6),
    ]
    assert cy.enumerate_faces(8, 3, 1) == [(j,) for j in range(1, 9)]
    assert len(cy.enumerate_faces(7, 3, 2)) == 15
    with pytest.raises(EnumerationTooLarge):
        cy.enumerate_faces(30, 6, 6, cap=1000)


def test_enumerate_facets_examples():
    assert cy.enumerate_facets(6, 4, "odd") == [(1, 2, 3, 6), (1, 3, 4, 6), (1, 4, 5, 6)]
    assert len(cy.enumerate_facets(6, 4, "even")) == 6
    assert cy.opposite_parity_facets(6, 4) == cy.enumerate_facets(6, 4, "odd")
    for n in range(5, 11):
        for m in range(2, min(n, 7)):
            assert len(cy.enumerate_facets(n, m)) == cy.facet_count(n, m)


def test_gale_and_gap_parity_agree():
    for n in range(4, 11):
        for m in range(2, n):
            for sub in itertools.combinations(range(1, n + 1), m):
                facet = cy.gap_parity(sub, n) is not cy.GapParity.NOT_FACET
                assert facet == cy.gale_evenness(sub, n)


def test_odd_arrays_never_outnumber_even():
    for n in range(3, 11):
        for m in range(2, min(n, 7)):
            for k in range(1, m + 1):
                s = m - k
                if s > k:
                    continue
                assert cy.count_arrays(n, k, s, "odd") <= cy.count_arrays(n, k, s, "even")


def test_ratio_of_face_counts_below_one():
    for m in range(2, 7):
        for k in range(m):
            for n in range(m + 1, 40):
                assert cy.face_count(n, m, k) < cy.face_count(n + 1, m, k)
