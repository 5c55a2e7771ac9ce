import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fivefactor.corrcheck import CorrTriple  # noqa: E402
from fivefactor.curves import PricingParams  # noqa: E402
from fivefactor.moments import ModelParams, State  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]


def cappar_model(**over):
    kw = dict(
        kappa=0.09, r_bar=0.0275, sigma_r=0.01, alpha=0.06, x_bar=0.045, sigma_x=0.007,
        beta=0.05, pi_bar=0.015, sigma_pi=0.005, sigma_S=0.15, sigma_I=0.005,
        corr=CorrTriple(0.0, 0.8, -0.25),
    )
    kw.update(over)
    return ModelParams(**kw)


@pytest.fixture
def model():
    return cappar_model()


@pytest.fixture
def pricing():
    return PricingParams(a=0.03, b=0.065, h=-0.001, k=0.05, l=0.02)


@pytest.fixture
def s0():
    return State(r=0.005, S=1.0, x=0.03, I=1.0, pi=0.0)


@pytest.fixture
def configs_dir():
    return ROOT / "configs"
