import itertools

import pytest
from hypothesis import settings, strategies as st

from expsum.ff import make_field
from expsum.mpoly import MultiPoly

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def brute_sum_counts(f, field, points_field=None):
    """Trace-value histogram by naive evaluation over every point."""
    from expsum.ff import absolute_trace, enumerate_field
    from expsum.mpoly import evaluate

    K = points_field or field
    counts = [0] * field.p
    for pt in itertools.product(list(enumerate_field(K)), repeat=f.n):
        counts[absolute_trace(evaluate(f, pt))] += 1
    return counts


@st.composite
def polys(draw, field, n, max_deg=3, max_terms=4):
    k = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(k):
        mono = tuple(draw(st.lists(st.integers(0, max_deg), min_size=n, max_size=n)))
        if sum(mono) > max_deg:
            continue
        c = draw(st.integers(1, field.q - 1))
        terms[mono] = c
    return MultiPoly(n, field, terms)


@pytest.fixture
def F3():
    return make_field(3)


@pytest.fixture
def F7():
    return make_field(7)
