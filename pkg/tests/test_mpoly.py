import itertools
import random

import pytest
from hypothesis import given, strategies as st

from conftest import polys
from expsum.ff import FieldElement, enumerate_field, extension, make_field
from expsum.mpoly import (GREVLEX, LEX, MultiPoly, ParseError, PolyError, evaluate, format_poly,
                          gradient, homogeneous_parts, parse, partial_derivative, substitute)

F3 = make_field(3)
F5 = make_field(5)
F7 = make_field(7)
F9 = make_field(3, 2)


def naive_eval(f, point):
    F = point[0].field
    acc = F.zero
    emb = extension(f.field, F.a // f.field.a).embed_table
    for m, c in f.terms.items():
        t = FieldElement(F, emb[c])
        for x, e in zip(point, m):
            for _ in range(e):
                t = t * x
        acc = acc + t
    return acc


def test_parse_examples():
    f = parse("x1^3 + x1*x2 + 1", 2, F3)
    assert len(f.terms) == 3 and f.degree == 3
    assert parse("3*x1", 1, F3).is_zero()
    g = parse("x1^2 - x2", 2, F5)
    assert g.coeff((0, 1)).code == 4


def test_parse_grammar_features():
    assert parse("2(x1+1)^2", 1, F7) == parse("2*x1^2 + 4*x1 + 2", 1, F7)
    assert parse("x1**2", 1, F7) == parse("x1^2", 1, F7)
    assert parse("-(x1 - x2)", 2, F7) == parse("x2 - x1", 2, F7)
    assert parse("g^2", 1, F9) == parse("2", 1, F9)
    assert parse("0", 3, F7).is_zero()


@pytest.mark.parametrize("text,pos", [("x1 +", 4), ("x1 ^ x2", 5), ("x1 $ 2", 3), ("(x1", 3)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as exc:
        parse(text, 2, F7)
    assert exc.value.pos == pos


def test_parse_rejects_out_of_range_variable():
    with pytest.raises(PolyError):
        parse("x3", 2, F7)
    with pytest.raises(PolyError):
        parse("x0", 2, F7)
    with pytest.raises(PolyError):
        parse("x1^99999999999", 1, F7)


@given(polys(F7, 3))
def test_parse_print_roundtrip(f):
    assert parse(format_poly(f), 3, F7) == f


@given(polys(F9, 2))
def test_parse_print_roundtrip_extension(f):
    assert parse(format_poly(f), 2, F9) == f


def test_canonical_printing():
    f = parse("x2 + x1^2 + 3 + x1*x2", 2, F7)
    assert format_poly(f) == "x1^2 + x1*x2 + x2 + 3"
    assert format_poly(parse("0", 1, F7)) == "0"


def test_homogeneous_parts_examples():
    d = homogeneous_parts(parse("x1^3 + x1*x2 + 1", 2, F3))
    assert (d.delta, d.delta_prime) == (3, 2)
    assert d.parts[3] == parse("x1^3", 2, F3)
    assert d.parts[2] == parse("x1*x2", 2, F3)
    assert d.parts[1].is_zero()
    assert d.parts[0] == parse("1", 2, F3)
    h = homogeneous_parts(parse("x1^2 + x1*x2", 2, F3))
    assert h.delta_prime is None and h.second is None
    c = homogeneous_parts(parse("x1*x2 + x1 + x2", 2, F3))
    assert (c.delta, c.delta_prime) == (2, 1)
    assert c.second == parse("x1 + x2", 2, F3)
    with pytest.raises(PolyError):
        homogeneous_parts(MultiPoly.zero(2, F3))


@given(polys(F5, 3))
def test_homogeneous_parts_reconstruct(f):
    if f.is_zero():
        return
    d = homogeneous_parts(f)
    total = MultiPoly.zero(3, F5)
    for j, part in enumerate(d.parts):
        assert part.is_zero() or (part.is_homogeneous() and part.degree == j)
        total = total + part
    assert total == f
    if d.delta_prime is not None:
        assert 1 <= d.delta_prime < d.delta


def test_derivative_examples():
    for p in [2, 3, 5, 7]:
        F = make_field(p)
        assert partial_derivative(parse(f"x1^{p} - x1", 1, F), 1) == parse("-1", 1, F)
    assert partial_derivative(parse("x1^3 + x1", 1, F7), 1) == parse("3*x1^2 + 1", 1, F7)
    assert partial_derivative(parse("x1*x2", 2, F7), 1) == parse("x2", 2, F7)
    with pytest.raises(PolyError):
        partial_derivative(parse("x1", 1, F7), 2)


@given(polys(F7, 3, max_deg=4))
def test_euler_relation(f):
    if f.is_zero():
        return
    n = f.n
    for j, part in enumerate(homogeneous_parts(f).parts):
        lhs = MultiPoly.zero(n, F7)
        for i, g in enumerate(gradient(part), start=1):
            lhs = lhs + MultiPoly.var(n, F7, i) * g
        assert lhs == part.scale(j % 7)


def test_euler_relation_degenerates_when_p_divides_degree():
    f = parse("x1^3 + x1*x2^2 + 2*x2^3", 2, F3)
    lhs = sum((MultiPoly.var(2, F3, i + 1) * g for i, g in enumerate(gradient(f))), MultiPoly.zero(2, F3))
    assert lhs.is_zero()


@given(polys(F5, 3, max_deg=4))
def test_derivatives_commute(f):
    for i, j in itertools.combinations(range(1, 4), 2):
        assert partial_derivative(partial_derivative(f, i), j) == partial_derivative(partial_derivative(f, j), i)


def test_evaluate_examples():
    one = parse("1", 2, F3)
    assert evaluate(one, (F3.element(2), F3.element(0))) == F3.one
    f = parse("x1*x2 + x1 + x2", 2, F3)
    assert evaluate(f, (F3.one, F3.one)) == F3.zero
    with pytest.raises(PolyError):
        evaluate(f, (F3.one,))


@given(polys(F3, 2), polys(F3, 2), st.data())
def test_evaluate_is_homomorphism_over_extension(f, g, data):
    K = extension(F3, 2).field
    pt = tuple(K.element(data.draw(st.integers(0, K.q - 1))) for _ in range(2))
    assert evaluate(f + g, pt) == evaluate(f, pt) + evaluate(g, pt)
    assert evaluate(f * g, pt) == evaluate(f, pt) * evaluate(g, pt)
    assert evaluate(f, pt) == naive_eval(f, pt)


def test_evaluate_matches_naive_on_random_points():
    rng = random.Random(7)
    for Fq, i in [(F5, 1), (F9, 1), (F9, 2), (make_field(2, 2), 3)]:
        K = extension(Fq, i).field
        for _ in range(20):
            terms = {tuple(rng.randrange(4) for _ in range(3)): rng.randrange(1, Fq.q) for _ in range(5)}
            f = MultiPoly(3, Fq, terms)
            pt = tuple(K.element(rng.randrange(K.q)) for _ in range(3))
            assert evaluate(f, pt) == naive_eval(f, pt)


def test_ring_axioms_and_orders():
    a = parse("x1 + 2*x2^2", 2, F7)
    b = parse("x1*x2 - 3", 2, F7)
    c = parse("x2 + 1", 2, F7)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == MultiPoly.zero(2, F7)
    assert (a + b) ** 2 == a * a + b * a.scale(2) + b * b
    assert a.leading(GREVLEX)[0] == (0, 2)
    assert a.leading(LEX)[0] == (1, 0)


def test_substitute_composes():
    f = parse("x1*x2", 2, F3)
    u = parse("x1 + 1", 2, F3)
    v = parse("x2 + 1", 2, F3)
    assert substitute(f, [u, v]) == parse("x1*x2 + x1 + x2 + 1", 2, F3)


def test_mismatched_rings():
    with pytest.raises(PolyError):
        parse("x1", 1, F3) + parse("x1", 2, F3)
    with pytest.raises(PolyError):
        MultiPoly(2, F3, {(1,): 1})


def test_all_points_of_small_field_evaluate_consistently():
    f = parse("x1^3 + 2*x1", 1, F3)
    # x^3 = x on F_3, so f = 3x = 0 pointwise
    assert all(evaluate(f, (x,)) == F3.zero for x in enumerate_field(F3))
