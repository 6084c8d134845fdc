import numpy as np
import pytest
from hypothesis import settings

from fracgcg.atoms import AtomFamily
from fracgcg.spectral import Field, Grid, Spectrum, forward

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def order_family():
    return AtomFamily.adaptive_order(eta=2.0)


@pytest.fixture
def aniso_family():
    return AtomFamily.adaptive_aniso(gamma=0.25, zeta=1e-3, omega=1e-3)


def random_field(rng, grid, zero_mean=False):
    v = Field(grid, rng.standard_normal(grid.shape))
    if zero_mean:
        v = Field(grid, v.values - v.values.mean())
    return v


def random_spectrum(rng, grid, zero_mean=False):
    spec = forward(random_field(rng, grid, zero_mean))
    if zero_mean:
        c = spec.coeffs.copy()
        c.flat[0] = 0.0
        spec = Spectrum(grid, c)
    return spec


GRID1 = Grid(1, 64)
GRID2 = Grid(2, 16)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[str, str] = {}


def record_acceptance(name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[name] = f"{name}: {'PASS' if ok else 'FAIL'} {detail}"
    print(ACCEPTANCE_LINES[name])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for name in sorted(ACCEPTANCE_LINES, key=lambda k: int(k[1:])):
            terminalreporter.write_line(ACCEPTANCE_LINES[name])
