from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from expsum.padic import PadicRing, padic_ring, vp

PRIMES = [2, 3, 5, 7]


def elements(R):
    return st.lists(st.integers(-R.mod, R.mod), min_size=R.e, max_size=R.e).map(R)


rings = st.sampled_from([padic_ring(p, N) for p in PRIMES for N in (1, 3, 5)])


def test_vp():
    assert vp(0, 3) is None
    assert vp(54, 3) == 3
    assert vp(-8, 2) == 3
    assert vp(7, 5) == 0


def test_uniformiser():
    for p in PRIMES:
        R = padic_ring(p, 4)
        assert R.pi ** (p - 1) == R(-p)
        assert R.pi.valuation() == Fraction(1, p - 1)
        assert R.pi_power(3 * (p - 1) + 1) == R(-p) ** 3 * R.pi
        assert R.pi ** (4 * (p - 1)) == R.zero
    with pytest.raises(ValueError):
        PadicRing(3, 0)


@given(rings.flatmap(lambda R: st.tuples(elements(R), elements(R), elements(R))))
def test_ring_axioms(xyz):
    x, y, z = xyz
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x - x == x.ring.zero
    assert x ** 3 == x * x * x


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6))
def test_two_adic_case_is_integers_mod_power(a, b):
    R = padic_ring(2, 6)
    assert R(a) * R(b) == R(a * b)
    assert R.pi == R(-2)


@given(rings.flatmap(elements))
def test_inverse_of_units(x):
    if not x.is_unit():
        with pytest.raises(ZeroDivisionError):
            x.inverse()
        return
    assert x * x.inverse() == x.ring.one


@given(rings.flatmap(lambda R: st.tuples(elements(R), elements(R))))
def test_valuation_is_additive_when_visible(xy):
    x, y = xy
    vx, vy = x.valuation(), y.valuation()
    vxy = (x * y).valuation()
    if vx is None or vy is None:
        return
    N = x.ring.N
    if vx + vy < N:
        assert vxy == vx + vy
    s = (x + y).valuation()
    if s is not None:
        assert s >= min(vx, vy)


def test_divisibility():
    R = padic_ring(3, 4)
    x = R(9) * R.pi
    assert x.divisible_by_p_power(2) and not x.divisible_by_p_power(3)
    assert x.valuation() == Fraction(5, 2)
    assert R(81).is_zero() and R(81).valuation() is None
