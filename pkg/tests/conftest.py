from __future__ import annotations

import os
import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from urysohn_retractions.fraisse.sampling import random_metric, random_triple  # noqa: E402
from urysohn_retractions.fraisse.stage import AmbientStage, grow  # noqa: E402
from urysohn_retractions.metric import FiniteMetricSpace  # noqa: E402
from urysohn_retractions.scalar import Scalar  # noqa: E402

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def fractions(max_num: int = 12, max_den: int = 8, signed: bool = True):
    lo = -max_num if signed else 0
    return st.builds(Fraction, st.integers(lo, max_num), st.integers(1, max_den))


def scalars(max_num: int = 12, max_den: int = 8):
    return st.builds(Scalar, fractions(max_num, max_den), fractions(max_num, max_den))


@st.composite
def metric_spaces(draw, min_points: int = 1, max_points: int = 6, denom: int = 8):
    n = draw(st.integers(min_points, max_points))
    rng = random.Random(draw(st.integers(0, 2**32)))
    d = random_metric(rng, n, denom=denom, top=2)
    return FiniteMetricSpace([f"p{k}" for k in range(n)], d)


@st.composite
def triples(draw, min_points: int = 1, max_points: int = 5, denom: int = 4):
    n = draw(st.integers(min_points, max_points))
    rng = random.Random(draw(st.integers(0, 2**32)))
    return random_triple(rng, n, denom=denom)


@pytest.fixture(scope="session")
def generations() -> list[AmbientStage]:
    return grow(AmbientStage.initial())


@pytest.fixture(scope="session")
def gen3(generations) -> AmbientStage:
    return generations[3]
