import math

import numpy as np
import pytest

from adrdesign import load_config, preset
from adrdesign.adr import fov_cap


@pytest.fixture(scope="session")
def run_default():
    return load_config(None)


@pytest.fixture(scope="session")
def ctx10(run_default):
    """Default context: 10 mW transmit power."""
    return run_default.context()


@pytest.fixture(scope="session")
def ctx16():
    """Compact-design study context: the VCSEL driven at the 16 mW eye-safety cap."""
    return load_config(None, overrides={("beam", "pt_mw"): 16.0}).context()


@pytest.fixture
def rng():
    return np.random.default_rng(20250808)


def random_design_points(rng, cfg, n, fov_lo_deg=3.0, b_lo=0.3e9, b_hi=15e9,
                         margin=0.98):
    """Random valid (B, FOV) pairs for a configuration."""
    cap = fov_cap(cfg.n_tier)
    b = np.exp(rng.uniform(math.log(b_lo), math.log(b_hi), n))
    fov = rng.uniform(math.radians(fov_lo_deg), margin * cap, n)
    return b, fov


@pytest.fixture(scope="session")
def presets():
    return {name: preset(name) for name in
            ("config1", "config2", "config3", "config4", "config5", "config6")}
