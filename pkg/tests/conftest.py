import pytest

from ferrohyst import MemoryState, PreisachDensity, RGrid
from ferrohyst.scenarios import load_config, run_scenario


@pytest.fixture(scope="session")
def density():
    return PreisachDensity.projection()


@pytest.fixture(scope="session")
def grid():
    return RGrid.uniform(m=400, cutoff=4.0)


@pytest.fixture()
def virgin(grid):
    return MemoryState.virgin(grid)


def random_piecewise_monotone(rng, max_segments=50, amplitude=2.0):
    """Random sample sequence; every consecutive pair is one monotone segment."""
    n = int(rng.integers(2, max_segments + 1))
    return rng.uniform(-amplitude, amplitude, n)


@pytest.fixture(scope="session")
def scenario_runs(tmp_path_factory):
    """All built-in point scenarios, run once and shared across tests."""
    out = {}
    for name in ("bipolar-linear", "bipolar-quartic", "stress-linear", "stress-quartic"):
        out_dir = tmp_path_factory.mktemp(name)
        config = load_config(name, out_dir=str(out_dir))
        out[name] = run_scenario(config)
        out[name]["config"] = config
    return out


def field_period_slices(config):
    """Sample index ranges of each full period of a field scenario."""
    spp = config.get_int("drive", "samples_per_period")
    periods = config.get_int("drive", "periods")
    return [slice(k * spp + 1, (k + 1) * spp + 1) for k in range(periods)], spp
