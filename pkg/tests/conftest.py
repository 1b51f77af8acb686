import pytest
from hypothesis import HealthCheck, settings, strategies as st

from frobsplit.fpoly import FpPoly, PolyRing

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

PRIMES = (2, 3, 5, 7)


@st.composite
def polys(draw, ring, max_deg=4, max_terms=5):
    """Random FpPoly in ``ring`` with exponents bounded per variable."""
    exps = st.tuples(*[st.integers(0, max_deg) for _ in range(ring.nvars)])
    terms = draw(st.dictionaries(exps, st.integers(0, ring.p - 1), max_size=max_terms))
    return FpPoly(ring, terms)


@pytest.fixture
def r2xy():
    return PolyRing(2, ("x", "y"))
