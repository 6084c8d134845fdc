import math

import numpy as np
import pytest

from fracgcg.atoms import AtomFamily, FamilyKind, seminorm, weight_array
from fracgcg.errors import ConfigInvalid, ZeroResidual
from fracgcg.insertion import ResidualSweep, SearchConfig, dual_value, inner_maximizer, search_parameter
from fracgcg.spectral import Field, Grid, Spectrum, forward, inner
from fracgcg.testkit import dense_grid_oracle

from conftest import random_spectrum


def _dual_oracle(family, w, s, alpha):
    """Re-summation of g(s) mode by mode, in plain Python."""
    f = weight_array(family, w.grid, s).ravel()
    c = w.coeffs.ravel()
    total = 0.0
    for fi, ci in zip(f.tolist(), c.tolist()):
        if math.isinf(fi):
            continue
        total += (ci.real * ci.real + ci.imag * ci.imag) / fi
    return (2 * math.pi) ** family.q / alpha * math.sqrt(total)


def _pairing(w: Spectrum, u_coeffs):
    """<w, u> for a batch of spectra via Parseval."""
    q = w.grid.q
    axes = tuple(range(1, 1 + q))
    return (2 * math.pi) ** q * np.sum(w.coeffs[None] * np.conj(u_coeffs), axis=axes).real


def _sphere_probes(rng, family, grid, s, alpha, n, centre=None):
    """``n`` random spectra rescaled to alpha J(., s) = 1."""
    vals = rng.standard_normal((n,) + grid.shape)
    coeffs = np.fft.fftn(vals, axes=tuple(range(1, 1 + grid.q))) / grid.size
    if centre is not None:
        scale = np.sqrt(np.sum(np.abs(centre) ** 2))
        coeffs = centre[None] + 0.05 * scale * coeffs / np.sqrt(np.mean(np.abs(coeffs) ** 2) * grid.size)
    f = weight_array(family, grid, s)
    if family.zero_mean:
        coeffs[(slice(None),) + (0,) * grid.q] = 0.0
        f = np.where(np.isinf(f), 0.0, f)
    axes = tuple(range(1, 1 + grid.q))
    j = np.sqrt(np.sum(f[None] * np.abs(coeffs) ** 2, axis=axes))
    return coeffs / (alpha * j).reshape((-1,) + (1,) * grid.q)


def test_single_mode_maximizer():
    g = Grid(1, 64)
    (x,) = g.points()
    fam = AtomFamily.adaptive_order(2.0)
    w_field = Field(g, 2 * np.cos(3 * x))
    w = forward(w_field)
    atom, val = inner_maximizer(fam, w, 0.5, 1e-2)
    # coefficients 1 at m = +-3 and f = 144 there, so A = alpha sqrt(2 / 144)
    A = 1e-2 * math.sqrt(2 / 144)
    assert atom.spec.coeff(3) == pytest.approx(1 / (A * 144), rel=1e-12)
    assert np.abs(atom.as_field.values - 100 / (12 * math.sqrt(2)) * 2 * np.cos(3 * x)).max() < 1e-10
    assert 100 / (12 * math.sqrt(2)) * 2 == pytest.approx(11.785, abs=1e-3)
    assert atom.penalty == pytest.approx(1.0, abs=1e-12)
    assert val == pytest.approx(inner(w_field, atom.as_field), rel=1e-10)


def test_dual_value_examples():
    g = Grid(1, 64)
    (x,) = g.points()
    fam = AtomFamily.adaptive_order(2.0)
    w = forward(Field(g, 2 * np.cos(x)))
    for s in (1e-3, 0.2, 0.5, 1.0):
        assert dual_value(fam, w, s, 1.0) == pytest.approx(2 * math.pi * math.sqrt(2) * s**2, rel=1e-12)
    assert dual_value(fam, forward(Field.zeros(g)), 0.5, 1.0) == 0.0


@pytest.mark.parametrize("q", [1, 2])
def test_dual_value_matches_resummation(rng, q):
    fam = AtomFamily.adaptive_order(2.0) if q == 1 else AtomFamily.adaptive_aniso()
    g = Grid(1, 128) if q == 1 else Grid(2, 16)
    for _ in range(10):
        w = random_spectrum(rng, g, zero_mean=(q == 1))
        s = rng.uniform(fam.s_lo, fam.s_hi)
        alpha = 10 ** rng.uniform(-3, 1)
        ref = _dual_oracle(fam, w, s, alpha)
        assert dual_value(fam, w, s, alpha) == pytest.approx(ref, rel=1e-12)
        assert inner_maximizer(fam, w, s, alpha)[1] == pytest.approx(ref, rel=1e-12)
        assert ResidualSweep(fam, w, alpha).values([s])[0] == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("q", [1, 2])
def test_closed_form_beats_sphere_probes(rng, q):
    fam = AtomFamily.adaptive_order(2.0) if q == 1 else AtomFamily.adaptive_aniso()
    g = Grid(1, 64) if q == 1 else Grid(2, 16)
    for _ in range(5):
        w = random_spectrum(rng, g, zero_mean=(q == 1))
        s = rng.uniform(fam.s_lo, fam.s_hi)
        alpha = 0.1
        atom, val = inner_maximizer(fam, w, s, alpha)
        assert abs(alpha * seminorm(fam, atom.spec, s) - 1) < 1e-10
        assert val == pytest.approx(inner(Field(g, np.fft.ifftn(w.coeffs * g.size).real), atom.as_field), rel=1e-10)
        probes = np.concatenate(
            [
                _sphere_probes(rng, fam, g, s, alpha, 500),
                _sphere_probes(rng, fam, g, s, alpha, 500, centre=atom.spec.coeffs),
            ]
        )
        assert np.max(_pairing(w, probes)) <= val + 1e-9 * abs(val)


def test_zero_residual():
    fam = AtomFamily.adaptive_order(2.0)
    g = Grid(1, 32)
    with pytest.raises(ZeroResidual):
        inner_maximizer(fam, forward(Field.zeros(g)), 0.5, 1.0)
    with pytest.raises(ZeroResidual):
        search_parameter(fam, forward(Field(g, np.full(32, 3.0))), 1.0)


def test_search_monotone_order_goes_to_right_end():
    g = Grid(1, 64)
    (x,) = g.points()
    fam = AtomFamily.adaptive_order(2.0)
    s, atom, val = search_parameter(fam, forward(Field(g, 2 * np.cos(x))), 1.0)
    assert s == pytest.approx(1.0, abs=1e-6)
    assert val == pytest.approx(2 * math.pi * math.sqrt(2), rel=1e-9)
    assert dense_grid_oracle(fam, forward(Field(g, 2 * np.cos(x))), 1.0)[0] == 1.0


def test_search_single_2d_mode_goes_to_zero():
    g = Grid(2, 16)
    x, y = g.points()
    fam = AtomFamily.adaptive_aniso()
    w = forward(Field(g, np.cos(y) + 0 * x))
    s, atom, val = search_parameter(fam, w, 1.0)
    assert s == pytest.approx(0.0, abs=1e-9)
    # atom is a multiple of cos(y)
    ratio = atom.as_field.values / np.cos(y + 0 * x)
    ok = np.abs(np.cos(y + 0 * x)) > 0.1
    assert np.ptp(ratio[ok]) < 1e-10 * np.abs(ratio[ok]).max()
    grid_vals = [dual_value(fam, w, t, 1.0) for t in np.linspace(0, math.pi, 50)]
    assert val >= max(grid_vals) - 1e-12


@pytest.mark.parametrize("q", [1, 2])
def test_search_vs_dense_grid(rng, q):
    fam = AtomFamily.adaptive_order(2.0) if q == 1 else AtomFamily.adaptive_aniso()
    g = Grid(1, 128) if q == 1 else Grid(2, 16)
    for _ in range(5):
        w = random_spectrum(rng, g, zero_mean=(q == 1))
        s, atom, val = search_parameter(fam, w, 0.5)
        s_ref, v_ref = dense_grid_oracle(fam, w, 0.5)
        assert fam.s_lo <= s <= fam.s_hi
        assert val >= v_ref * (1 - 1e-6)


def test_search_deterministic_and_scale_equivariant(rng):
    for fam, g in ((AtomFamily.adaptive_order(2.0), Grid(1, 64)), (AtomFamily.adaptive_aniso(), Grid(2, 16))):
        w = random_spectrum(rng, g, zero_mean=fam.zero_mean)
        s1, a1, v1 = search_parameter(fam, w, 0.3)
        s2, a2, v2 = search_parameter(fam, w, 0.3)
        assert s1 == s2 and v1 == v2 and np.array_equal(a1.spec.coeffs, a2.spec.coeffs)
        s3, a3, v3 = search_parameter(fam, w * 7.5, 0.3)
        assert s3 == pytest.approx(s1, abs=1e-9)
        assert v3 == pytest.approx(7.5 * v1, rel=1e-9)
        assert np.abs(a3.spec.coeffs - a1.spec.coeffs).max() <= 1e-8 * np.abs(a1.spec.coeffs).max()


def test_tie_break_smallest_s():
    # a constant residual has only m = 0, where f = omega^{4 gamma} for every s,
    # so g is flat and the smallest s must win
    g = Grid(2, 16)
    fam = AtomFamily(FamilyKind.ADAPTIVE_ANISO_2D, 0.0, math.pi, gamma=0.25, zeta=0.0, omega=1.0)
    c = np.zeros(g.shape, complex)
    c[0, 0] = 1.0
    s, _, _ = search_parameter(fam, Spectrum(g, c), 1.0)
    assert s == 0.0


def test_search_config_validation():
    with pytest.raises(ConfigInvalid):
        SearchConfig(n_starts=0)
    with pytest.raises(ConfigInvalid):
        SearchConfig(coarse_grid=1)
    with pytest.raises(ConfigInvalid):
        SearchConfig(local_tol=0)
