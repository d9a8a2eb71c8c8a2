import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phi4sq.grid import (Field, GridSpec, GridMismatchError,
                         HermitianSymmetryError, SpectralField, apply_symbol,
                         delta_field, inner, inverse_transform,
                         point_evaluator, spectral_pair, transform)

RNG = np.random.default_rng(1234)


@pytest.fixture(scope="module")
def grid():
    return GridSpec(8, np.pi)


def random_field(grid, seed=0):
    return Field(grid, np.random.default_rng(seed).standard_normal(grid.shape))


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(7, 1.0)
    with pytest.raises(ValueError):
        GridSpec(4, 1.0)
    with pytest.raises(ValueError):
        GridSpec(8, -1.0)


@given(st.integers(0, 2 ** 31), st.sampled_from([8, 10, 16]))
@settings(max_examples=25, deadline=None)
def test_roundtrip(seed, n):
    g = GridSpec(n, 2.5)
    f = Field(g, np.random.default_rng(seed).standard_normal(g.shape))
    back = inverse_transform(transform(f))
    assert np.max(np.abs(back.values - f.values)) < 1e-12 * np.max(np.abs(f.values))


def test_constant_field_zero_mode(grid):
    f = Field(grid, np.full(grid.shape, 3.7))
    S = transform(f)
    nz = np.argwhere(np.abs(S.coeffs) > 1e-9)
    assert nz.tolist() == [[0, 0, 0]]
    assert S.coeffs[0, 0, 0] == pytest.approx(3.7 * grid.volume)


def test_cosine_two_modes_direct_dft(grid):
    # oracle: explicit DFT sum over the grid
    x = grid.axis
    f = Field(grid, np.cos(x)[:, None, None] * np.ones(grid.shape))
    S = transform(f)
    k = grid.k_axis
    expect = np.zeros(grid.shape, dtype=complex)
    for a in range(grid.n):
        for b in range(grid.n):
            for c in range(grid.n):
                phase = np.exp(-1j * (k[a] * x[:, None, None]
                                      + k[b] * x[None, :, None]
                                      + k[c] * x[None, None, :]))
                expect[a, b, c] = grid.spacing ** 3 * np.sum(f.values * phase)
    assert np.max(np.abs(S.coeffs - expect)) < 1e-9
    nz = np.argwhere(np.abs(S.coeffs) > 1e-9)
    assert sorted(map(tuple, nz)) == [(1, 0, 0), (7, 0, 0)]


def test_hermitian_symmetry_enforced(grid):
    S = transform(random_field(grid))
    assert S.hermitian_defect() < 1e-13
    bad = S.coeffs.copy()
    bad[1, 2, 3] += 10.0 * np.max(np.abs(bad))
    with pytest.raises(HermitianSymmetryError):
        inverse_transform(SpectralField(grid, bad))


def test_parseval(grid):
    f, g = random_field(grid, 1), random_field(grid, 2)
    lhs = inner(f, g)
    rhs = spectral_pair(grid, np.fft.rfftn(f.values), np.fft.rfftn(g.values))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_symbol_identity_and_composition(grid):
    f = random_field(grid, 3)
    one = grid.symbol(lambda k2: np.ones_like(k2))
    assert np.allclose(apply_symbol(f, one).values, f.values, atol=1e-13)
    m1 = grid.symbol(lambda k2: 1.0 / (1.0 + k2))
    m2 = grid.symbol(lambda k2: np.exp(-0.3 * k2))
    a = apply_symbol(apply_symbol(f, m1), m2)
    b = apply_symbol(f, m1 * m2)
    assert np.max(np.abs(a.values - b.values)) < 1e-13


def test_heat_symbol_on_constant(grid):
    m0sq, t = 5.0, 0.7
    f = Field(grid, np.full(grid.shape, 2.0))
    heat = grid.symbol(lambda k2: np.exp(-t * (k2 + m0sq)))
    out = apply_symbol(f, heat)
    assert np.allclose(out.values, 2.0 * np.exp(-t * m0sq), rtol=1e-12)


def test_translation_covariance(grid):
    f = random_field(grid, 4)
    m = grid.symbol(lambda k2: 1.0 / (2.0 * (k2 + 1.0)))
    shifted = Field(grid, np.roll(f.values, 1, axis=0))
    a = apply_symbol(shifted, m).values
    b = np.roll(apply_symbol(f, m).values, 1, axis=0)
    assert np.max(np.abs(a - b)) < 1e-13


def test_delta_field(grid):
    x0 = (grid.axis[2], grid.axis[5], grid.axis[1])
    d = delta_field(grid, x0)
    g = random_field(grid, 5)
    assert inner(d, g) == pytest.approx(g.values[2, 5, 1], rel=1e-12)
    assert np.sum(d.values) * grid.spacing ** 3 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        delta_field(grid, (0.123456, 0.0, 0.0))


def test_resolvent_kernel_matches_lattice_sum(grid):
    m0sq = 5.0
    d0 = delta_field(grid, (0.0, 0.0, 0.0))
    sym = grid.symbol(lambda k2: 1.0 / (2.0 * (k2 + m0sq)))
    out = apply_symbol(d0, sym)
    target = np.sum(1.0 / (2.0 * (grid.k2_full + m0sq))) / grid.volume
    i0 = grid.index_of((0.0, 0.0, 0.0))
    assert out.values[i0] == pytest.approx(target, rel=1e-12)


def test_point_evaluator(grid):
    f = random_field(grid, 6)
    E = point_evaluator(grid, (grid.axis[3], grid.axis[0], grid.axis[7]))
    val = float(np.sum((np.fft.rfftn(f.values) * E).real))
    assert val == pytest.approx(f.values[3, 0, 7], rel=1e-12)


def test_grid_mismatch_errors(grid):
    other = GridSpec(10, np.pi)
    f = random_field(grid, 7)
    g = Field(other, np.zeros(other.shape))
    with pytest.raises(GridMismatchError):
        inner(f, g)
    with pytest.raises(GridMismatchError):
        apply_symbol(f, other.symbol(lambda k2: k2))
