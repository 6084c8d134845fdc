"""Parametrised Fourier-weight seminorms and their extremal atoms.

A family fixes a parameter interval ``[s_lo, s_hi]`` and a nonnegative
frequency weight ``f_s(m)``; the seminorm is

    J(v, s) = sqrt( sum_m f_s(m) |v_hat(m)|^2 ).

Two families are provided:

* ``AdaptiveOrder1D`` on T^1: ``f_s(m) = |m|^{4s} / s^{2 eta}`` for ``m != 0``;
  the zero mode is excluded (mean-free space), so any field with a nonzero
  mean has ``J = +inf``.
* ``AdaptiveAniso2D`` on T^2: ``f_s(m) = (|m.(cos s, sin s)| + zeta |m| + omega)^{4 gamma}``.

On a 2D grid the Nyquist slots stand for several integer frequencies
(``+n/2`` and ``-n/2``). Their weight is the largest over those aliases,
which keeps ``f_s`` symmetric under ``m -> -m`` slot-wise so every atom stays
a real field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache

import numpy as np

from .errors import InfiniteSeminorm, ParamOutOfRange, ZeroInput
from .spectral import Field, Grid, Spectrum, frequencies, inverse

__all__ = [
    "INFINITE",
    "FamilyKind",
    "AtomFamily",
    "Atom",
    "weight",
    "weight_array",
    "seminorm",
    "normalize_to_extremal",
]

# +inf sentinel for seminorm values; never enters a sum
INFINITE = math.inf

# a zero-mean spectrum may carry FFT roundoff in its constant mode
_MEAN_RTOL = 1e-12


class FamilyKind(str, Enum):
    ADAPTIVE_ORDER_1D = "AdaptiveOrder1D"
    ADAPTIVE_ANISO_2D = "AdaptiveAniso2D"


@dataclass(frozen=True)
class AtomFamily:
    kind: FamilyKind
    s_lo: float
    s_hi: float
    eta: float = 2.0
    gamma: float = 0.25
    zeta: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        if not self.s_lo < self.s_hi:
            raise ParamOutOfRange(f"empty parameter interval [{self.s_lo}, {self.s_hi}]")
        if self.kind is FamilyKind.ADAPTIVE_ORDER_1D:
            if not (0.0 < self.s_lo and self.s_hi <= 1.0):
                raise ParamOutOfRange("adaptive-order interval must lie in (0, 1]")
            if not self.eta > 0:
                raise ParamOutOfRange(f"eta must be positive, got {self.eta}")
        else:
            if self.s_lo != 0.0 or not math.isclose(self.s_hi, math.pi):
                raise ParamOutOfRange("adaptive-anisotropy interval must be [0, pi]")
            if not 0.0 < self.gamma <= 1.0:
                raise ParamOutOfRange(f"gamma must lie in (0, 1], got {self.gamma}")
            if self.zeta < 0:
                raise ParamOutOfRange(f"zeta must be nonnegative, got {self.zeta}")
            if not self.omega > 0:
                raise ParamOutOfRange(f"omega must be positive, got {self.omega}")

    @classmethod
    def adaptive_order(cls, eta: float = 2.0, s_min: float = 1e-3, s_max: float = 1.0) -> "AtomFamily":
        return cls(FamilyKind.ADAPTIVE_ORDER_1D, s_min, s_max, eta=eta)

    @classmethod
    def adaptive_aniso(cls, gamma: float = 0.25, zeta: float = 1e-3, omega: float = 1e-3) -> "AtomFamily":
        return cls(FamilyKind.ADAPTIVE_ANISO_2D, 0.0, math.pi, gamma=gamma, zeta=zeta, omega=omega)

    @property
    def q(self) -> int:
        return 1 if self.kind is FamilyKind.ADAPTIVE_ORDER_1D else 2

    @property
    def zero_mean(self) -> bool:
        return self.kind is FamilyKind.ADAPTIVE_ORDER_1D

    def check_s(self, s: float) -> float:
        s = float(s)
        if not (self.s_lo <= s <= self.s_hi) or math.isnan(s):
            raise ParamOutOfRange(f"s={s} outside [{self.s_lo}, {self.s_hi}]")
        return s

    def params(self) -> dict:
        if self.zero_mean:
            return {"kind": self.kind.value, "s_lo": self.s_lo, "s_hi": self.s_hi, "eta": self.eta}
        return {
            "kind": self.kind.value,
            "s_lo": self.s_lo,
            "s_hi": self.s_hi,
            "gamma": self.gamma,
            "zeta": self.zeta,
            "omega": self.omega,
        }

    @classmethod
    def from_params(cls, d: dict) -> "AtomFamily":
        return cls(**{k: v for k, v in d.items()})


@dataclass(frozen=True)
class ModeTable:
    """Per-grid frequency data shared by the weight evaluations."""

    absm: np.ndarray  # |m| per slot
    m1: np.ndarray  # (R, ...) alias representatives, first axis
    m2: np.ndarray | None


@lru_cache(maxsize=16)
def mode_table(grid: Grid) -> ModeTable:
    freqs = frequencies(grid)
    if grid.q == 1:
        (k,) = freqs
        absm = np.abs(k).astype(float)
        return ModeTable(absm, k[None].astype(float), None)
    k1, k2 = (f.astype(float) for f in freqs)
    half = grid.n // 2
    # four sign choices for the Nyquist component(s); duplicates elsewhere
    a1 = np.where(k1 == half, -k1, k1)
    a2 = np.where(k2 == half, -k2, k2)
    m1 = np.stack([k1, a1, k1, a1])
    m2 = np.stack([k2, k2, a2, a2])
    absm = np.hypot(k1, k2)
    return ModeTable(absm, m1, m2)


def _order_log_weight(absm, s: float, eta: float):
    # log f_s(m) = 4 s log|m| - 2 eta log s; log domain avoids s**(2 eta) underflow
    with np.errstate(divide="ignore"):
        return 4.0 * s * np.log(absm) - 2.0 * eta * math.log(s)


def _aniso_weight(m1, m2, absm, s: float, family: AtomFamily):
    base = np.abs(m1 * math.cos(s) + m2 * math.sin(s))
    if base.ndim > np.ndim(absm):
        base = base.max(axis=0)
    return (base + family.zeta * absm + family.omega) ** (4.0 * family.gamma)


def weight(family: AtomFamily, s: float, m) -> float:
    """Weight ``f_s(m)`` of a single integer frequency ``m``.

    Returns :data:`INFINITE` for ``m = 0`` in the mean-free order family.
    """
    s = family.check_s(s)
    m = np.atleast_1d(np.asarray(m, dtype=float))
    if m.shape != (family.q,):
        raise ValueError(f"frequency must have {family.q} components")
    if family.zero_mean:
        am = abs(m[0])
        if am == 0:
            return INFINITE
        return float(math.exp(_order_log_weight(am, s, family.eta)))
    return float(_aniso_weight(m[0], m[1], math.hypot(m[0], m[1]), s, family))


def weight_array(family: AtomFamily, grid: Grid, s: float) -> np.ndarray:
    """``f_s`` on every slot of ``grid`` in FFT layout (``inf`` on an excluded mode)."""
    if grid.q != family.q:
        raise ValueError(f"{family.kind.value} needs a {family.q}D grid")
    s = family.check_s(s)
    tab = mode_table(grid)
    if family.zero_mean:
        w = np.exp(_order_log_weight(tab.absm, s, family.eta))
        w[0] = INFINITE
        return w
    return _aniso_weight(tab.m1, tab.m2, tab.absm, s, family)


def _has_mean(spec: Spectrum) -> bool:
    c0 = abs(spec.coeffs.flat[0])
    return c0 > _MEAN_RTOL * max(np.abs(spec.coeffs).max(), 1e-300)


def seminorm(family: AtomFamily, v: Spectrum, s: float) -> float:
    f = weight_array(family, v.grid, s)
    p = v.power()
    if family.zero_mean:
        if _has_mean(v):
            return INFINITE
        return float(math.sqrt(np.dot(f.ravel()[1:], p.ravel()[1:])))
    return float(math.sqrt(np.dot(f.ravel(), p.ravel())))


@dataclass(frozen=True, eq=False)
class Atom:
    """Extremal point ``v`` of ``{alpha J(., s) <= 1}`` paired with ``s``."""

    spec: Spectrum
    s: float
    family: AtomFamily = field(repr=False)
    j_value: float
    alpha: float

    @cached_property
    def as_field(self) -> Field:
        return inverse(self.spec)

    @property
    def grid(self) -> Grid:
        return self.spec.grid

    @property
    def penalty(self) -> float:
        """``alpha * J``; 1 up to roundoff for an extremal atom."""
        return self.alpha * self.j_value


def normalize_to_extremal(family: AtomFamily, w: Spectrum, s: float, alpha: float) -> Atom:
    """Rescale ``w`` onto the sphere ``alpha J(., s) = 1``."""
    if not alpha > 0:
        raise ParamOutOfRange(f"alpha must be positive, got {alpha}")
    j = seminorm(family, w, s)
    if j == INFINITE:
        raise InfiniteSeminorm(f"J(w, {s}) is infinite (nonzero mean on a mean-free family)")
    if j == 0.0:
        raise ZeroInput("cannot normalise a spectrum with zero seminorm")
    coeffs = w.coeffs / (alpha * j)
    if family.zero_mean:
        coeffs = coeffs.copy()
        coeffs.flat[0] = 0.0
    spec = Spectrum(w.grid, coeffs)
    return Atom(spec, float(s), family, seminorm(family, spec, s), float(alpha))
