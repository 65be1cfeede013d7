import pytest

from config import TestingConfig
from stablesim import create_app, db
from stablesim.grids import SpatialGrid, TimeGrid, lattice_grid
from stablesim.sampling import SeededRng, StableSpec
from stablesim.subordinators import SubordinatorSpec, generate_ensemble

# Small run: panel times (multiples of 0.25 up to 3) sit on the grid
SMALL_CONFIG = """
[run]
process = ifsm
alpha = 1.5
seed = 42
n_paths = 40
n_replicates = 150

[subordinator]
kind = fbm
hurst = 0.5

[grid]
t_max = 4
n_steps = 16
cells_per_half = 40

[experiments]
run = feasibility, signkernel, charmatch
"""

# Settings that let desk-scale experiments run on test-sized samples
SMALL_SETTINGS = {
    'MIN_SELFSIM_REPLICATES': 100,
    'BINNED_CHECK_PATHS': 500,
    'MAX_FIELD_ENTRIES': 5_000_000,
}


@pytest.fixture
def app(tmp_path):
    class _TestConfig(TestingConfig):
        CACHE_DIR = str(tmp_path / 'cache')

    app = create_app(_TestConfig)
    with app.app_context():
        yield app
        db.session.remove()
        db.drop_all()


@pytest.fixture
def cli_runner(app):
    return app.test_cli_runner()


@pytest.fixture
def rng():
    return SeededRng(12345)


@pytest.fixture
def spec():
    return StableSpec(1.5)


@pytest.fixture
def small_grid():
    return TimeGrid(4.0, 16)


@pytest.fixture
def fbm_ensemble(small_grid, rng):
    return generate_ensemble(SubordinatorSpec.fbm(0.5), small_grid, 200, rng.stream(1))


@pytest.fixture
def wide_window():
    # Wide enough that no FBM path on [0, 4] in these tests leaves it
    return SpatialGrid.from_half_width(12.0, 240)


@pytest.fixture
def lattice_ensemble(rng):
    return generate_ensemble(SubordinatorSpec.fbm(0.5), lattice_grid(41), 3000, rng.stream(2))


@pytest.fixture
def small_config_text():
    return SMALL_CONFIG
