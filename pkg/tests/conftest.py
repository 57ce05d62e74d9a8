from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from richlines.exact import canonicalize

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(bound=20, den=8):
    return st.builds(Fraction, st.integers(-bound * den, bound * den), st.integers(1, den))


def points3(bound=20, den=8):
    return st.tuples(rationals(bound, den), rationals(bound, den), rationals(bound, den))


def points2(bound=5, den=1):
    return st.tuples(rationals(bound, den), rationals(bound, den))


@st.composite
def lines3(draw, bound=20, den=8):
    base = draw(points3(bound, den))
    d = draw(points3(bound, den).filter(any))
    return canonicalize(base, d)
