"""Discrete Fourier analysis on the periodic torus T^q, q in {1, 2}.

Conventions
-----------
Grid points are ``x_j = 2*pi*j/n`` along each axis. Coefficients follow the
continuum normalisation

    v_hat(m) = n**-q * sum_j v_j exp(-i m.x_j),     v(x_j) = sum_m v_hat(m) exp(i m.x_j)

and the inner product is the trapezoid quadrature

    <v, w> = (2*pi)**q * n**-q * sum_j v_j w_j = (2*pi)**q * sum_m v_hat(m) conj(w_hat(m)).

Every other module measures energies, dual pairings and the stopping
threshold with this one inner product.

Spectra are stored in FFT order (numpy's ``fft`` layout). The integer
frequency attached to each slot is given by :func:`frequencies`, which maps the
Nyquist slot to ``+n/2``; :meth:`Spectrum.centered` returns the array
reordered to ``-n/2+1, ..., n/2`` along each axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GridMismatch, InvalidGrid, NonHermitian

__all__ = [
    "Grid",
    "Field",
    "Spectrum",
    "frequencies",
    "forward",
    "inverse",
    "inner",
    "norm",
    "project_zero_mean",
    "hermitian_defect",
]

HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``n`` samples per axis on the ``q``-torus."""

    q: int
    n: int

    def __post_init__(self):
        if self.q not in (1, 2):
            raise InvalidGrid(f"dimension q must be 1 or 2, got {self.q}")
        if self.n < 8 or self.n % 2:
            raise InvalidGrid(f"samples per axis must be even and >= 8, got {self.n}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.q

    @property
    def size(self) -> int:
        return self.n**self.q

    @property
    def h(self) -> float:
        return 2.0 * np.pi / self.n

    @property
    def cell_volume(self) -> float:
        """Quadrature weight ``(2 pi)^q / n^q`` of a single sample."""
        return self.h**self.q

    def points(self) -> tuple[np.ndarray, ...]:
        """Grid coordinates, one broadcastable array per axis (``ij`` indexing)."""
        x = self.h * np.arange(self.n)
        if self.q == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))


@lru_cache(maxsize=32)
def _axis_freqs(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)
    k[n // 2] = n // 2
    k.setflags(write=False)
    return k


def frequencies(grid: Grid) -> tuple[np.ndarray, ...]:
    """Integer frequency of every FFT slot, one full-shape array per axis."""
    k = _axis_freqs(grid.n)
    if grid.q == 1:
        return (k,)
    return tuple(np.meshgrid(k, k, indexing="ij"))


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples of a function on the torus."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            if vals.size != self.grid.size:
                raise GridMismatch(
                    f"{vals.size} samples do not fit grid of shape {self.grid.shape}"
                )
            vals = vals.reshape(self.grid.shape)
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    def __add__(self, other: "Field") -> "Field":
        _check_same(self.grid, other.grid)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _check_same(self.grid, other.grid)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "Field":
        return Field(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def mean(self) -> float:
        return float(self.values.mean())


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients of a real field, stored in FFT order."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != self.grid.shape:
            raise GridMismatch(f"coefficient shape {c.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("spectrum coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    def coeff(self, *m: int) -> complex:
        """Coefficient of the integer frequency ``m`` (aliased modulo ``n``)."""
        if len(m) != self.grid.q:
            raise ValueError(f"expected {self.grid.q} frequency components")
        return complex(self.coeffs[tuple(int(mi) % self.grid.n for mi in m)])

    def centered(self) -> np.ndarray:
        """Coefficients ordered by frequency ``-n/2+1, ..., n/2`` on each axis."""
        axes = tuple(range(self.grid.q))
        return np.roll(np.fft.fftshift(self.coeffs, axes=axes), -1, axis=axes)

    @classmethod
    def from_centered(cls, grid: Grid, centered: np.ndarray) -> "Spectrum":
        axes = tuple(range(grid.q))
        c = np.fft.ifftshift(np.roll(np.asarray(centered, dtype=complex), 1, axis=axes), axes=axes)
        return cls(grid, c)

    def __mul__(self, scalar: float) -> "Spectrum":
        return Spectrum(self.grid, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __add__(self, other: "Spectrum") -> "Spectrum":
        _check_same(self.grid, other.grid)
        return Spectrum(self.grid, self.coeffs + other.coeffs)

    def power(self) -> np.ndarray:
        return self.coeffs.real**2 + self.coeffs.imag**2


def _check_same(a: Grid, b: Grid) -> None:
    if a != b:
        raise GridMismatch(f"grids differ: {a} vs {b}")


def _conj_partner(c: np.ndarray) -> np.ndarray:
    """Array whose slot ``k`` holds ``conj(c[-k mod n])``."""
    out = c
    for ax in range(c.ndim):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return np.conj(out)


def hermitian_defect(spec: Spectrum) -> float:
    """Largest violation of ``c(-m) = conj(c(m))``, relative to ``max |c|``."""
    scale = np.abs(spec.coeffs).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(spec.coeffs - _conj_partner(spec.coeffs)).max() / scale)


def forward(v: Field) -> Spectrum:
    c = np.fft.fftn(v.values) / v.grid.size
    # exact symmetrisation removes FFT roundoff asymmetry
    c = 0.5 * (c + _conj_partner(c))
    return Spectrum(v.grid, c)


def inverse(spec: Spectrum) -> Field:
    defect = hermitian_defect(spec)
    if defect > HERMITIAN_RTOL:
        raise NonHermitian(f"spectrum violates Hermitian symmetry (relative defect {defect:.2e})")
    vals = np.fft.ifftn(spec.coeffs).real * spec.grid.size
    return Field(spec.grid, vals)


def inner(v: Field, w: Field) -> float:
    _check_same(v.grid, w.grid)
    return float(v.grid.cell_volume * np.vdot(v.values.ravel(), w.values.ravel()))


def norm(v: Field) -> float:
    return float(np.sqrt(max(inner(v, v), 0.0)))


def project_zero_mean(v: Field) -> Field:
    return Field(v.grid, v.values - v.values.mean())
