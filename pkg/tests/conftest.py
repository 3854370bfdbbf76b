import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from kendall_walk import (Dirac1, GammaStep, LackOfMemory, ParetoMix, StableLimit,
                          Uniform01)

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ALPHAS = (0.5, 1.0, 2.0)

alphas = st.sampled_from(ALPHAS)
positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)
epochs = st.integers(min_value=1, max_value=12)


def named(alpha):
    return [Dirac1(alpha), ParetoMix(alpha, p=0.5), LackOfMemory(alpha),
            StableLimit(alpha, m=1.0), Uniform01(alpha), GammaStep(alpha, a=2.0, b=1.0)]


ALL_FAMILIES = [d for a in ALPHAS for d in named(a)]


@st.composite
def families(draw):
    return draw(st.sampled_from(ALL_FAMILIES))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
