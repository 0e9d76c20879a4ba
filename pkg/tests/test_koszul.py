import random

import pytest
from hypothesis import given

from conftest import polys
from expsum.ff import make_field
from expsum.ideals import milnor_sum
from expsum.koszul import (NonIsolatedCriticalLocus, check_vanishing, filtered_basis, form_weight,
                           graded_piece_dims, h_top_dimension, monomials_of_degree, page_table, phi,
                           regular_sequence_check, spectral_page, wedge_dx, weighted_basis)
from expsum.mpoly import MultiPoly, PolyError, homogeneous_parts, parse

F3, F5, F7 = make_field(3), make_field(5), make_field(7)


def P(text, n, F=F7):
    return parse(text, n, F)


def random_form(rng, F, n, k, max_deg=3):
    out = {}
    for _ in range(4):
        S = tuple(sorted(rng.sample(range(n), k)))
        m = tuple(rng.randrange(max_deg + 1) for _ in range(n))
        out[(S, m)] = rng.randrange(1, F.p)
    return out


def weight(n, delta, key):
    S, m = key
    return form_weight(n, delta, len(S), sum(m))


# --- the differential


def test_phi_examples():
    f = P("x1*x2", 2)
    assert phi(f, {((), (0, 0)): 1}) == {((0,), (0, 1)): 1, ((1,), (1, 0)): 1}
    assert phi(f, {((0, 1), (2, 1)): 3}) == {}
    assert wedge_dx(0, (1,)) == (1, (0, 1))
    assert wedge_dx(1, (0,)) == (-1, (0, 1))
    assert wedge_dx(0, (0,)) is None


def test_phi_squares_to_zero():
    rng = random.Random(1)
    for _ in range(40):
        F = rng.choice([F3, F5, F7])
        n = rng.randint(2, 4)
        f = MultiPoly(n, F, {tuple(rng.randrange(3) for _ in range(n)): rng.randrange(1, F.p) for _ in range(4)})
        k = rng.randrange(n)
        w = random_form(rng, F, n, k)
        assert phi(f, phi(f, w)) == {}


def test_filtration_compatibility():
    rng = random.Random(2)
    for _ in range(30):
        n = rng.randint(2, 3)
        f = MultiPoly(n, F7, {tuple(rng.randrange(4) for _ in range(n)): rng.randrange(1, 7) for _ in range(5)})
        if f.degree < 1:
            continue
        dec = homogeneous_parts(f)
        delta = dec.delta
        k = rng.randrange(n)
        S = tuple(sorted(rng.sample(range(n), k)))
        m = tuple(rng.randrange(3) for _ in range(n))
        w = {(S, m): 1}
        w0 = weight(n, delta, (S, m))
        for j, part in enumerate(dec.parts):
            for key in phi(part, w):
                assert weight(n, delta, key) == w0 - (delta - j)


def test_weighted_basis_counts():
    n, delta = 2, 3
    # weight 4 at k = 0 means coefficient degree 0; at k = 2 coefficient degree 4
    assert weighted_basis(n, delta, 0, 4) == [((), (0, 0))]
    assert len(weighted_basis(n, delta, 2, 4)) == len(monomials_of_degree(2, 4))
    assert weighted_basis(n, delta, 0, 3) == []
    assert len(filtered_basis(n, delta, 1, 3)) == 2 * (1 + 2)


# --- E_1 and regular sequences


def test_graded_piece_examples():
    fd = P("x1^2 + x2^2", 2, F3)
    assert sum(graded_piece_dims(fd, r, 2 - r) for r in range(0, 6)) == 1
    assert any(graded_piece_dims(P("x1^2", 2), r, 1 - r) for r in range(0, 6))
    xy = P("x1*x2", 2)
    for r in range(0, 6):
        for k in (0, 1):
            assert graded_piece_dims(xy, r, k - r) == 0
    with pytest.raises(PolyError):
        graded_piece_dims(P("x1 + x2^2", 2), 1, 0)


def test_regular_sequence_examples():
    assert regular_sequence_check(P("x1^2 + x2^2", 2, F3)) == (True, 1)
    assert regular_sequence_check(P("x1^2", 2)) == (False, None)
    assert regular_sequence_check(P("x1^3 + x2^3", 2)) == (True, 4)
    assert regular_sequence_check(P("x1^3", 1, F3)) == (False, None)
    with pytest.raises(PolyError):
        regular_sequence_check(P("x1 + 1", 1))


@pytest.mark.parametrize("text,n,F,expected", [
    ("x1^2 + x2^2", 2, F7, 1), ("x1^3 + x2^3", 2, F7, 4), ("x1*x2", 2, F7, 1),
    ("x1^2 + x2^2 + x3^2", 3, F5, 1), ("x1^3 + x2^3 + x3^3", 3, F7, 8),
])
def test_top_degree_sum_is_koszul_count(text, n, F, expected):
    fd = parse(text, n, F)
    delta = fd.degree
    assert regular_sequence_check(fd)[0]
    dims = [graded_piece_dims(fd, r, n - r) for r in range(0, n * delta + 3)]
    assert sum(dims) == expected == (delta - 1) ** n
    # nothing survives past the socle weight
    assert all(d == 0 for d in dims[n * (delta - 1) + 1:])


# --- higher pages


def _all_cells(f, t, r_max):
    return {(r, k - r): spectral_page(f, t, r, k - r) for r in range(r_max + 1) for k in range(f.n + 1)}


@pytest.mark.parametrize("text,n,F", [
    ("x1*x2 + x1 + x2", 2, F3), ("x1^3 + x1", 1, F7), ("x1^2*x2 + x2^2 + x1", 2, F5),
    ("x1^3 - x1", 1, F3), ("x1^2 + x1*x2", 2, F3),
])
def test_page_one_matches_koszul_path(text, n, F):
    f = parse(text, n, F)
    top = homogeneous_parts(f).top
    for (r, s), d in _all_cells(f, 1, 6).items():
        assert d == graded_piece_dims(top, r, s, f.degree)


def test_page_monotonicity_random():
    rng = random.Random(4)
    for _ in range(12):
        F = rng.choice([F3, F5])
        n = rng.randint(1, 2)
        f = MultiPoly(n, F, {tuple(rng.randrange(4) for _ in range(n)): rng.randrange(1, F.p) for _ in range(4)})
        if f.degree < 1:
            continue
        prev = _all_cells(f, 1, 5)
        for t in (2, 3):
            cur = _all_cells(f, t, 5)
            for cell, d in cur.items():
                assert 0 <= d <= prev[cell]
            prev = cur


@given(polys(F3, 2, max_deg=3))
def test_page_monotonicity_property(f):
    if f.degree < 1:
        return
    one = _all_cells(f, 1, 4)
    two = _all_cells(f, 2, 4)
    assert all(two[c] <= one[c] for c in one)


def test_second_page_of_product_form():
    f = P("x1*x2 + x1 + x2", 2, F3)
    for r in range(0, 4):
        for k in (0, 1):
            assert spectral_page(f, 2, r, k - r) == 0


def test_vanishing_verdicts():
    assert check_vanishing(P("x1^3 + x2^3 + x1", 2), 1).verified
    v = check_vanishing(P("x1*x2 + x1 + x2", 2, F3), 2, r_bound=3)
    assert v.verified and v.to_json()["verdict"] == "verified-to-bound"
    for p in (3, 5):
        F = make_field(p)
        bad = check_vanishing(parse(f"x1^{p} - x1", 1, F), 1)
        assert not bad.verified and bad.cell is not None and bad.witness
        r, s = bad.cell
        assert r + s != 1
        assert spectral_page(parse(f"x1^{p} - x1", 1, F), 1, r, s) == bad.dim


def test_vanishing_single_degree_mode():
    f = P("x1^3 - x1", 1, F3)
    assert not check_vanishing(f, 1, mode=0).verified
    v = check_vanishing(P("x1^2 + x2^2", 2), 1, mode=1)
    assert v.verified and v.degrees == [1]


@pytest.mark.parametrize("text,n,F,e", [
    ("x1*x2 + x1 + x2", 2, F3, 1), ("x1*x2 + x1 + x2", 2, F3, 2), ("x1^3 + x1", 1, F7, 1),
    ("x1^3 + x2^3 + x1*x2", 2, F7, 1),
])
def test_top_degree_total_matches_milnor(text, n, F, e):
    f = parse(text, n, F)
    bound = n * f.degree + 2
    v = check_vanishing(f, e, r_bound=bound, collect_top=True)
    assert v.verified
    assert sum(v.top_dims.values()) == h_top_dimension(f) == milnor_sum(f)


def test_h_top_dimension():
    assert h_top_dimension(P("x1*x2 + x1 + x2", 2, F3)) == 1
    assert h_top_dimension(P("x1", 1)) == 0
    assert h_top_dimension(P("x1^3 + x1", 1)) == 2
    with pytest.raises(NonIsolatedCriticalLocus):
        h_top_dimension(P("x1^2*x2", 2))


def test_page_table_json_and_guards():
    tab = page_table(P("x1^3 - x1", 1, F3), 1, 3, witnesses=True)
    js = tab.to_json()
    assert "0,0" in js["cells"] and js["witnesses"]
    with pytest.raises(PolyError):
        spectral_page(P("1", 1), 1, 0, 0)
    with pytest.raises(ValueError):
        spectral_page(P("x1", 1), 0, 0, 0)
