import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from magtrans.fields import PhysicalConstants
from magtrans.poly import Poly, monomials_up_to

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)
positive_rationals = st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4)


def polys(nvars: int = 6, max_degree: int = 2, max_terms: int = 4):
    """Strategy for small polynomials in the first ``nvars`` variables."""
    term = st.tuples(st.sampled_from(monomials_up_to(max_degree, nvars)), rationals)
    return st.lists(term, max_size=max_terms).map(lambda ts: Poly(dict(ts)))


@pytest.fixture
def unit():
    return PhysicalConstants(1, 1, 1, 1)


@pytest.fixture
def odd_consts():
    return PhysicalConstants(Fraction(2), Fraction(3), Fraction(5, 2), Fraction(1, 3))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
