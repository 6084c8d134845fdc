"""Insertion step of the conditional gradient method.

For a fixed parameter ``s`` the linear maximisation

    max <w, v>   subject to   alpha J(v, s) = 1

has the closed-form solution ``v_hat = w_hat / (A f_s)`` with
``A = alpha sqrt(sum |w_hat|^2 / f_s)``, and its value is

    g(s) = (2 pi)^q / alpha * sqrt( sum_m |w_hat(m)|^2 / f_s(m) ).

The remaining maximisation over ``s`` is one-dimensional and handled by a
deterministic multi-start search (:func:`search_parameter`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .atoms import Atom, AtomFamily, mode_table, seminorm, weight_array
from .errors import ConfigInvalid, ZeroResidual
from .spectral import Spectrum

__all__ = [
    "SearchConfig",
    "ResidualSweep",
    "inner_maximizer",
    "dual_value",
    "search_parameter",
]

# ties in g within this relative gap resolve to the smallest s
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    n_starts: int = 16
    local_tol: float = 1e-6
    coarse_grid: int = 64
    seed: int = 0
    # extra coarse points at directions orthogonal to the residual's
    # frequencies with |m|_inf <= kink_order (2D only); None means all of them
    kink_order: int | None = None

    def __post_init__(self):
        if self.n_starts < 1:
            raise ConfigInvalid("n_starts must be >= 1")
        if self.coarse_grid < 2:
            raise ConfigInvalid("coarse_grid must be >= 2")
        if not self.local_tol > 0:
            raise ConfigInvalid("local_tol must be positive")
        if self.kink_order is not None and self.kink_order < 0:
            raise ConfigInvalid("kink_order must be >= 0")


def _residual_power(family: AtomFamily, w: Spectrum) -> np.ndarray:
    p = w.power()
    if family.zero_mean:
        p = p.copy()
        p.flat[0] = 0.0
    return p


class ResidualSweep:
    """Evaluates ``g(s)`` for one residual at many ``s`` through the kernels."""

    def __init__(self, family: AtomFamily, w: Spectrum, alpha: float):
        if w.grid.q != family.q:
            raise ValueError(f"{family.kind.value} needs a {family.q}D grid")
        self.family = family
        self.alpha = float(alpha)
        self.prefactor = (2.0 * math.pi) ** family.q / self.alpha
        tab = mode_table(w.grid)
        p = _residual_power(family, w).ravel()
        keep = p > 0.0
        self.is_zero = not keep.any()
        if family.zero_mean:
            self._power = np.ascontiguousarray(p[keep])
            self._log_absm = np.ascontiguousarray(np.log(tab.absm.ravel()[keep]))
            return
        absm = tab.absm.ravel()
        m1 = tab.m1.reshape(4, -1)
        m2 = tab.m2.reshape(4, -1)
        aliased = (m1 != m1[0]).any(axis=0) | (m2 != m2[0]).any(axis=0)
        self._groups = []
        self._m = (m1[0][keep], m2[0][keep])
        for sel, reps in ((keep & ~aliased, 1), (keep & aliased, 4)):
            if sel.any():
                self._groups.append(
                    (
                        np.ascontiguousarray(p[sel]),
                        np.ascontiguousarray(m1[:reps, sel]),
                        np.ascontiguousarray(m2[:reps, sel]),
                        np.ascontiguousarray(absm[sel]),
                    )
                )

    def power_sums(self, s) -> np.ndarray:
        """``sum_m |w_hat|^2 / f_s(m)`` for each entry of ``s``."""
        s = np.ascontiguousarray(np.atleast_1d(s), dtype=float)
        if self.is_zero:
            return np.zeros(s.shape[0])
        fam = self.family
        if fam.zero_mean:
            sums = kernels.order_sums(self._power, self._log_absm, s)
            return np.exp(2.0 * fam.eta * np.log(s)) * sums
        out = np.zeros(s.shape[0])
        expo = 4.0 * fam.gamma
        for power, m1, m2, absm in self._groups:
            out += kernels.aniso_sums(power, m1, m2, absm, s, fam.zeta, fam.omega, expo)
        return out

    def kink_angles(self, order: int | None = None) -> np.ndarray:
        """Directions ``s`` orthogonal to the frequencies present in the residual.

        With small ``omega`` and ``zeta`` the weight nearly vanishes there, so
        ``g`` has narrow peaks at these angles.
        """
        if self.family.zero_mean or self.is_zero:
            return np.zeros(0)
        m1, m2 = self._m
        sel = (m1 != 0) | (m2 != 0)
        if order is not None:
            sel &= np.maximum(np.abs(m1), np.abs(m2)) <= order
        ang = np.mod(np.arctan2(-m1[sel], m2[sel]), math.pi)
        return np.unique(np.r_[ang, 0.0, math.pi])

    def values(self, s) -> np.ndarray:
        return self.prefactor * np.sqrt(self.power_sums(s))


def dual_value(family: AtomFamily, w: Spectrum, s: float, alpha: float) -> float:
    """Optimal value ``g(s)`` of the linear maximisation at fixed ``s``."""
    f = weight_array(family, w.grid, s)
    p = _residual_power(family, w)
    mask = np.isfinite(f)
    total = float(np.sum(p[mask] / f[mask]))
    return (2.0 * math.pi) ** family.q / alpha * math.sqrt(total)


def inner_maximizer(family: AtomFamily, w: Spectrum, s: float, alpha: float) -> tuple[Atom, float]:
    """Closed-form maximiser of ``<w, v>`` over the extremal sphere at ``s``.

    Returns the atom and its pairing with ``w``.
    """
    f = weight_array(family, w.grid, s)
    c = w.coeffs.copy()
    if family.zero_mean:
        c.flat[0] = 0.0
    mask = np.isfinite(f)
    filtered = np.zeros_like(c)
    filtered[mask] = c[mask] / f[mask]
    total = float(np.sum((c[mask].real ** 2 + c[mask].imag ** 2) / f[mask]))
    if total == 0.0:
        raise ZeroResidual("residual has no component the family can pair with")
    root = math.sqrt(total)
    spec = Spectrum(w.grid, filtered / (alpha * root))
    atom = Atom(spec, float(s), family, seminorm(family, spec, s), float(alpha))
    return atom, (2.0 * math.pi) ** family.q / alpha * root


def _coarse_points(sweep: ResidualSweep, cfg: SearchConfig) -> np.ndarray:
    family = sweep.family
    lo, hi = family.s_lo, family.s_hi
    pts = np.linspace(lo, hi, cfg.coarse_grid)
    if cfg.coarse_grid > 2:
        rng = np.random.default_rng(cfg.seed)
        spacing = (hi - lo) / (cfg.coarse_grid - 1)
        pts[1:-1] += rng.uniform(-0.25, 0.25, cfg.coarse_grid - 2) * spacing
    if cfg.kink_order != 0:
        pts = np.concatenate([pts, sweep.kink_angles(cfg.kink_order)])
    return np.unique(np.clip(pts, lo, hi))


def _best(cands: list[tuple[float, float]]) -> tuple[float, float]:
    top = max(v for v, _ in cands)
    gap = TIE_RTOL * abs(top)
    return min((s, v) for v, s in cands if v >= top - gap)


def search_parameter(
    family: AtomFamily, w: Spectrum, alpha: float, cfg: SearchConfig | None = None
) -> tuple[float, Atom, float]:
    """Maximise ``g(s)`` over the family's interval.

    Evaluates ``g`` on a jittered coarse grid, refines the ``n_starts`` best
    local maxima with bounded Brent iterations inside their neighbouring grid
    cells, and returns ``(s_star, atom, dual_value)``.
    """
    cfg = cfg or SearchConfig()
    sweep = ResidualSweep(family, w, alpha)
    if sweep.is_zero:
        raise ZeroResidual("residual is zero")
    pts = _coarse_points(sweep, cfg)
    vals = sweep.values(pts)

    n = len(pts)
    left = np.r_[-np.inf, vals[:-1]]
    right = np.r_[vals[1:], -np.inf]
    peaks = np.flatnonzero((vals >= left) & (vals >= right))
    # stable sort keeps the smaller s first among equal peaks
    peaks = peaks[np.argsort(-vals[peaks], kind="stable")][: cfg.n_starts]

    cands = [(float(vals[i]), float(pts[i])) for i in peaks]
    for i in peaks:
        a = pts[max(i - 1, 0)]
        b = pts[min(i + 1, n - 1)]
        if b - a <= cfg.local_tol:
            continue
        res = minimize_scalar(
            lambda t: -sweep.values(t)[0],
            bounds=(a, b),
            method="bounded",
            options={"xatol": cfg.local_tol},
        )
        cands.append((float(-res.fun), float(res.x)))

    s_star, _ = _best(cands)
    atom, value = inner_maximizer(family, w, s_star, alpha)
    return s_star, atom, value
