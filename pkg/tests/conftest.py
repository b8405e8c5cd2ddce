import math

import numpy as np
import pytest
from hypothesis import strategies as st

from o2hopf.pressure_law import PressureLaw
from o2hopf.spectral import Rejection, check_admissible


@pytest.fixture
def ref_cfg():
    return check_admissible(1, 0.0, 1.0, 16)


@pytest.fixture
def ref_law():
    return PressureLaw.polynomial([0.0, 1.0, 1.0])


def random_config(rng, k0s=(1, 2, 3)):
    """Random accepted configuration with a_c in [-0.3, 0.5] and sp1 above the threshold."""
    while True:
        k0 = int(rng.choice(k0s)) * int(rng.choice([1, -1]))
        a_c = float(rng.uniform(-0.3, 0.5))
        sp1 = a_c**2 * abs(k0) ** 6 + float(rng.uniform(0.1, 5.0))
        cfg = check_admissible(k0, a_c, sp1)
        if not isinstance(cfg, Rejection):
            return cfg


def random_law(rng, sp1):
    return PressureLaw.polynomial([0.0, sp1, float(rng.normal()), float(rng.normal())])


seeds = st.integers(min_value=0, max_value=2**32 - 1)
