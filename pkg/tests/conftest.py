import pytest

from app.core.config import settings
from app.core.fixtures import DEFAULT_DESIGN
from app.models.design import BandSpec, ChebyshevPrototype, ImpedancePlan, SnakeParams
from app.services.config_parser import parse_config
from app.services.prototype import reduced_couplings
from app.services.synthesis import realize_network
from app.services.tls_imd import DEBYE, ImdDriveMap, TlsBathParams

DESIGN_G = (1.0, 0.5899, 0.6681, 0.3753, 0.9045)


@pytest.fixture(autouse=True)
def no_redis(monkeypatch):
    monkeypatch.setattr(settings, "REDIS_URL", "")
    monkeypatch.setattr(settings, "SWEEP_WORKERS", 1)


@pytest.fixture
def prototype():
    return ChebyshevPrototype(order=3, g=DESIGN_G)


@pytest.fixture
def band():
    return BandSpec(f0=4.9e9, fractional_bandwidth=0.135)


@pytest.fixture
def plan():
    return ImpedancePlan(z1=4.42, z2=20, z3=50, z0=50)


@pytest.fixture
def snake():
    return SnakeParams(n_total=40, ic=16e-6, l1s=2.6e-12, l2s=8e-12, lb=50e-12)


@pytest.fixture
def components(prototype, band, plan):
    """Untrimmed synthesized network."""
    return realize_network(prototype, band, plan)


@pytest.fixture
def couplings(prototype, band):
    return reduced_couplings(prototype, band)


@pytest.fixture
def design_config():
    return parse_config(DEFAULT_DESIGN)


@pytest.fixture
def drive_map():
    return ImdDriveMap(gain=100, w=0.085, g1=0.5899, g4=0.9045, z1=4.4, z0=50, f0=4.6e9, k3=2.1e9)


@pytest.fixture
def bath():
    return TlsBathParams(t1=2e-6, t2=4e-6, qi=250, dipole=DEBYE, t_diel=100e-9)
