import sys
from pathlib import Path

# Add the project root to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

import pytest

from topsocle import database
from topsocle.algebra.coeff_ring import make_ring
from topsocle.cohomology.top_lc import HypersurfaceF

EXAMPLE12_GENERATORS = [(4, 0), (3, 1), (1, 3), (0, 4)]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full preset sweeps and large families")


@pytest.fixture
def uv_ring():
    return make_ring()


@pytest.fixture
def rational_ring():
    return make_ring(characteristic=0)


@pytest.fixture
def hartshorne(uv_ring):
    return HypersurfaceF.parse(uv_ring, "u*x + v*y")


@pytest.fixture
def semigroup_ring():
    return make_ring("semigroup", ("u", "v"), ("x", "y", "z"), EXAMPLE12_GENERATORS, (4, 2, 2))


@pytest.fixture
def example12(semigroup_ring):
    return HypersurfaceF.parse(semigroup_ring, "u^4*x^2 + v^8*y*z")


@pytest.fixture
def unit_f(uv_ring):
    return HypersurfaceF.parse(uv_ring, "x + u*y")


@pytest.fixture
def golden_db(tmp_path):
    database.configure(f"sqlite:///{tmp_path / 'goldens.db'}")
    database.init_db()
    yield
    database.drop_tables()
