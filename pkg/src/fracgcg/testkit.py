"""Phantoms, noise, image metrics and brute-force oracles.

Noise uses NumPy's ``default_rng`` (PCG64 bit generator, ``Generator.normal``);
the seed-to-stream mapping is fixed by NumPy's stream-compatibility policy for
``Generator`` methods.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .atoms import AtomFamily
from .errors import BadPeriod, GridMismatch, GridTooSmall
from .insertion import dual_value
from .spectral import Field, Grid, Spectrum, inverse
from .weights import QuadProblem

__all__ = [
    "Phantom",
    "two_mode_signal",
    "grid_phantom",
    "diagonal_phantom",
    "add_gaussian_noise",
    "psnr",
    "mse",
    "dense_grid_oracle",
    "active_set_oracle",
    "PSNR_IDENTICAL",
    "RNG_ALGORITHM",
]

RNG_ALGORITHM = f"numpy.random.default_rng / PCG64 (numpy {np.__version__})"
PSNR_IDENTICAL = math.inf


def two_mode_signal(grid: Grid) -> Field:
    """Clean 1D test signal with modes 3 and 20 in ratio 8:2.

    ``v(x) = (1/2pi) sum_m a(m) e^{imx}`` with ``a(+-3) = 8``,
    ``a(+-20) = 2``, giving coefficients ``8/2pi`` and ``2/2pi``.
    """
    if grid.q != 1:
        raise ValueError("two-mode signal lives on a 1D grid")
    if grid.n < 64:
        raise GridTooSmall(f"need n >= 64 to resolve mode 20, got {grid.n}")
    c = np.zeros(grid.n, dtype=complex)
    for m, amp in ((3, 8.0), (20, 2.0)):
        c[m] = c[-m] = amp / (2.0 * math.pi)
    return inverse(Spectrum(grid, c))


def grid_phantom(grid: Grid, period: int = 16, thickness: int = 2) -> Field:
    """Binary lattice of horizontal and vertical lines.

    A sample is 1 when either index modulo ``period`` is below ``thickness``.
    """
    if grid.q != 2:
        raise ValueError("grid phantom lives on a 2D grid")
    if period < 1 or grid.n % period:
        raise BadPeriod(f"period {period} must divide n={grid.n}")
    if not 0 <= thickness <= period:
        raise BadPeriod(f"thickness {thickness} must lie in [0, {period}]")
    idx = np.arange(grid.n) % period < thickness
    return Field(grid, (idx[:, None] | idx[None, :]).astype(float))


def diagonal_phantom(grid: Grid, angle: float = math.pi / 4, frequency: float = 6.0) -> Field:
    """Binary stripes whose normal points along ``angle``.

    The wave vector is rounded to integers so the pattern is periodic.
    """
    if grid.q != 2:
        raise ValueError("diagonal phantom lives on a 2D grid")
    a = int(round(frequency * math.cos(angle)))
    b = int(round(frequency * math.sin(angle)))
    if a == 0 and b == 0:
        raise BadPeriod("stripe frequency rounds to zero")
    # integer phase index keeps the pattern exactly periodic
    i = np.arange(grid.n)
    k = (a * i[:, None] + b * i[None, :]) % grid.n
    return Field(grid, (np.cos(2.0 * math.pi * k / grid.n) >= 0).astype(float))


@dataclass(frozen=True)
class Phantom:
    kind: str  # "TwoMode1D" | "Grid2D" | "Diagonal2D"
    grid: Grid
    params: dict = field(default_factory=dict)

    def field(self) -> Field:
        if self.kind == "TwoMode1D":
            return two_mode_signal(self.grid)
        if self.kind == "Grid2D":
            return grid_phantom(self.grid, **self.params)
        if self.kind == "Diagonal2D":
            return diagonal_phantom(self.grid, **self.params)
        raise ValueError(f"unknown phantom kind {self.kind!r}")


def add_gaussian_noise(v: Field, std: float, seed: int) -> Field:
    if std < 0:
        raise ValueError("noise std must be nonnegative")
    if std == 0:
        return Field(v.grid, v.values.copy())
    rng = np.random.default_rng(seed)
    return Field(v.grid, v.values + rng.normal(0.0, std, size=v.grid.shape))


def mse(reference: Field, test: Field) -> float:
    if reference.grid != test.grid:
        raise GridMismatch(f"grids differ: {reference.grid} vs {test.grid}")
    return float(np.mean((reference.values - test.values) ** 2))


def psnr(reference: Field, test: Field, peak: float = 1.0) -> float:
    """``10 log10(peak^2 / MSE)`` in dB; :data:`PSNR_IDENTICAL` when MSE is 0."""
    if not peak > 0:
        raise ValueError("peak must be positive")
    err = mse(reference, test)
    if err == 0.0:
        return PSNR_IDENTICAL
    return 10.0 * math.log10(peak**2 / err)


def dense_grid_oracle(family: AtomFamily, w: Spectrum, alpha: float, grid_points: int = 4096):
    """Exhaustive ``max_s g(s)`` over a uniform grid; first maximiser wins."""
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    s = np.linspace(family.s_lo, family.s_hi, grid_points)
    vals = np.array([dual_value(family, w, si, alpha) for si in s])
    i = int(np.argmax(vals))
    return float(s[i]), float(vals[i])


def active_set_oracle(prob: QuadProblem):
    """Minimise ``prob`` over ``c >= 0`` by trying every support set.

    Exponential in the problem size; meant for tiny instances.
    """
    n = prob.size
    r = prob.lin - prob.penalty
    best_c, best_val = np.zeros(n), prob.objective(np.zeros(n))
    for k in range(1, n + 1):
        for sup in itertools.combinations(range(n), k):
            idx = list(sup)
            G = prob.gram[np.ix_(idx, idx)]
            z = np.linalg.lstsq(G, r[idx], rcond=None)[0]
            if np.any(z < 0):
                continue
            c = np.zeros(n)
            c[idx] = z
            val = prob.objective(c)
            if val < best_val:
                best_c, best_val = c, val
    return best_c, best_val
