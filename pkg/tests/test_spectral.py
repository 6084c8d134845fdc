import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fracgcg.errors import GridMismatch, InvalidGrid, NonHermitian
from fracgcg.spectral import (
    Field,
    Grid,
    Spectrum,
    forward,
    frequencies,
    hermitian_defect,
    inner,
    inverse,
    project_zero_mean,
)

from conftest import random_field


def test_grid_invariants():
    g = Grid(2, 16)
    assert g.size == 256 and g.shape == (16, 16)
    assert g.h == pytest.approx(2 * math.pi / 16)
    for bad in [(1, 7), (1, 6), (3, 16), (2, 15)]:
        with pytest.raises(InvalidGrid):
            Grid(*bad)


def test_frequencies_put_nyquist_positive():
    (k,) = frequencies(Grid(1, 8))
    assert k.tolist() == [0, 1, 2, 3, 4, -3, -2, -1]


def test_forward_constant():
    g = Grid(1, 32)
    c = forward(Field(g, np.ones(32))).coeffs
    assert c[0] == pytest.approx(1.0)
    assert np.abs(c[1:]).max() < 1e-15


def test_forward_cosine_euler():
    g = Grid(1, 32)
    (x,) = g.points()
    S = forward(Field(g, 2 * np.cos(3 * x)))
    assert S.coeff(3) == pytest.approx(1.0)
    assert S.coeff(-3) == pytest.approx(1.0)
    others = np.delete(np.abs(S.coeffs), [3, 32 - 3])
    assert others.max() < 1e-14


def test_inverse_examples():
    g = Grid(1, 16)
    c = np.zeros(16, complex)
    c[0] = 2.5
    assert np.allclose(inverse(Spectrum(g, c)).values, 2.5)
    c = np.zeros(16, complex)
    c[1] = c[-1] = 0.5
    (x,) = g.points()
    assert np.allclose(inverse(Spectrum(g, c)).values, np.cos(x), atol=1e-15)


def test_inverse_rejects_non_hermitian():
    g = Grid(1, 16)
    c = np.zeros(16, complex)
    c[2] = 1.0
    with pytest.raises(NonHermitian):
        inverse(Spectrum(g, c))


@pytest.mark.parametrize("grid", [Grid(1, 64), Grid(2, 16)])
def test_roundtrip_and_hermitian(rng, grid):
    v = random_field(rng, grid)
    S = forward(v)
    assert hermitian_defect(S) < 1e-15
    back = inverse(S)
    assert np.abs(back.values - v.values).max() <= 1e-12 * np.abs(v.values).max()


@pytest.mark.parametrize("grid", [Grid(1, 32), Grid(2, 8)])
def test_forward_of_random_hermitian_spectrum(rng, grid):
    v = random_field(rng, grid)
    S = forward(v)
    again = forward(inverse(S))
    assert np.abs(again.coeffs - S.coeffs).max() < 1e-14


def test_centered_roundtrip(rng):
    g = Grid(2, 8)
    S = forward(random_field(rng, g))
    C = S.centered()
    # centred index 0 is frequency -n/2+1, so frequency 0 sits at n/2-1
    assert C[3, 3] == S.coeff(0, 0)
    assert C[3 + 2, 3 - 1] == S.coeff(2, -1)
    assert np.array_equal(Spectrum.from_centered(g, C).coeffs, S.coeffs)


def test_inner_examples():
    g = Grid(1, 64)
    (x,) = g.points()
    one = Field(g, np.ones(64))
    assert inner(one, one) == pytest.approx(2 * math.pi)
    assert abs(inner(Field(g, np.cos(x)), Field(g, np.sin(x)))) < 1e-14
    with pytest.raises(GridMismatch):
        inner(one, Field(Grid(1, 32), np.ones(32)))


@pytest.mark.parametrize("grid", [Grid(1, 64), Grid(2, 16)])
def test_parseval_against_spectral_sum(rng, grid):
    for _ in range(20):
        v, w = random_field(rng, grid), random_field(rng, grid)
        vh, wh = forward(v).coeffs, forward(w).coeffs
        spectral = (2 * math.pi) ** grid.q * np.sum(vh * np.conj(wh)).real
        scale = math.sqrt(inner(v, v) * inner(w, w))
        assert abs(inner(v, w) - spectral) <= 1e-10 * scale


@given(arrays(np.float64, 32, elements=st.floats(-1e3, 1e3)), arrays(np.float64, 32, elements=st.floats(-1e3, 1e3)))
def test_inner_symmetric_bilinear(a, b):
    g = Grid(1, 32)
    v, w = Field(g, a), Field(g, b)
    assert inner(v, w) == pytest.approx(inner(w, v), rel=1e-12, abs=1e-9)
    assert inner(v * 3.0, w) == pytest.approx(3.0 * inner(v, w), rel=1e-12, abs=1e-9)


@given(arrays(np.float64, (8, 8), elements=st.floats(-1e3, 1e3)))
def test_roundtrip_property(a):
    g = Grid(2, 8)
    v = Field(g, a)
    back = inverse(forward(v))
    assert np.abs(back.values - a).max() <= 1e-12 * max(np.abs(a).max(), 1e-300) + 1e-300


def test_project_zero_mean(rng):
    g = Grid(1, 32)
    (x,) = g.points()
    assert np.allclose(project_zero_mean(Field(g, np.full(32, 5.0))).values, 0.0)
    assert np.allclose(project_zero_mean(Field(g, np.cos(x) + 2)).values, np.cos(x), atol=1e-15)
    v = project_zero_mean(random_field(rng, Grid(2, 16)))
    assert abs(v.values.mean()) < 1e-14
    assert abs(forward(v).coeff(0, 0)) < 1e-14
    assert np.array_equal(project_zero_mean(v).values, v.values - v.values.mean())


def test_field_rejects_nonfinite():
    with pytest.raises(ValueError):
        Field(Grid(1, 8), [0, 1, 2, np.nan, 0, 0, 0, 0])
