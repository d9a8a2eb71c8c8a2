import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phi4sq.grid import Field, GridSpec
from phi4sq.lp import (BesovParams, Weight, besov_norm, build_partition,
                       chi_profile, lp_block, low_freq_sum, paraproduct,
                       phi_profile)


@pytest.fixture(scope="module")
def grid():
    return GridSpec(16, 4.0)


@pytest.fixture(scope="module")
def part(grid):
    return build_partition(grid)


def rnd(grid, seed):
    return Field(grid, np.random.default_rng(seed).standard_normal(grid.shape))


def test_profile_supports():
    r = np.linspace(0, 4, 400)
    chi = chi_profile(r)
    phi = phi_profile(r)
    assert np.all(chi[r <= 0.75] == 1.0)
    assert np.all(chi[r >= 4 / 3] == 0.0)
    assert np.all(phi[r <= 0.75] == 0.0)
    assert np.all(phi[r >= 8 / 3] == 0.0)
    assert np.all((0.0 <= phi) & (phi <= 1.0))
    assert 0.0 < chi_profile(1.0) < 1.0


@given(st.floats(0.0, 200.0))
@settings(max_examples=200, deadline=None)
def test_partition_of_unity_profiles(r):
    total = chi_profile(r) + sum(phi_profile(2.0 ** -j * r) for j in range(12))
    assert total == pytest.approx(1.0, abs=1e-12)


@given(st.floats(0.01, 100.0),
       st.integers(0, 8), st.integers(0, 8))
@settings(max_examples=200, deadline=None)
def test_block_disjointness_profiles(r, i, j):
    if abs(i - j) >= 2:
        assert phi_profile(2.0 ** -i * r) * phi_profile(2.0 ** -j * r) == 0.0


def test_partition_exact_on_lattice(part):
    total = np.sum(part.symbols, axis=0)
    assert np.max(np.abs(total - 1.0)) < 1e-12


def test_constant_lives_in_lowest_block(grid, part):
    f = Field(grid, np.full(grid.shape, 1.3))
    low = lp_block(f, -1, part)
    assert np.allclose(low.values, 1.3, atol=1e-13)
    for j in range(0, part.j_max + 1):
        assert np.max(np.abs(lp_block(f, j, part).values)) < 1e-13


def test_pure_mode_block_support(grid, part):
    # mode with |k| outside [3/4, 8/3] * 2^j is annihilated by block j
    x = grid.axis
    kmag = np.pi / grid.L  # smallest nonzero momentum
    f = Field(grid, np.cos(kmag * x)[:, None, None] * np.ones(grid.shape))
    for j in part.indices:
        sym = part.symbol(j)
        out = lp_block(f, j, part)
        if j >= 0 and not (0.75 <= 2.0 ** -j * kmag <= 8.0 / 3.0):
            assert np.max(np.abs(out.values)) < 1e-13


def test_block_reconstruction(grid, part):
    f = rnd(grid, 0)
    rec = sum(lp_block(f, j, part).values for j in part.indices)
    assert np.max(np.abs(rec - f.values)) < 1e-12 * np.max(np.abs(f.values))


def test_block_orthogonality(grid, part):
    f = rnd(grid, 1)
    for i in part.indices:
        for j in part.indices:
            if abs(i - j) >= 2:
                out = lp_block(lp_block(f, i, part), j, part)
                assert np.max(np.abs(out.values)) < 1e-12


def test_block_index_range(grid, part):
    with pytest.raises(ValueError):
        lp_block(rnd(grid, 2), part.j_max + 1, part)


def test_low_freq_sum(grid, part):
    f = rnd(grid, 3)
    s2 = low_freq_sum(f, 2, part)
    expect = sum(lp_block(f, j, part).values for j in (-1, 0, 1))
    assert np.max(np.abs(s2.values - expect)) < 1e-13
    s_none = low_freq_sum(f, -1, part)
    assert np.max(np.abs(s_none.values)) == 0.0


def test_bony_reconstruction(grid, part):
    f, g = rnd(grid, 4), rnd(grid, 5)
    lt, res, gt = paraproduct(f, g, part)
    prod = f.values * g.values
    err = np.max(np.abs(lt.values + res.values + gt.values - prod))
    assert err < 1e-11 * np.max(np.abs(prod))


def test_paraproduct_zero_and_constant(grid, part):
    z = Field(grid, np.zeros(grid.shape))
    g = rnd(grid, 6)
    lt, res, gt = paraproduct(z, g, part)
    assert np.max(np.abs(lt.values)) == 0.0
    assert np.max(np.abs(res.values)) == 0.0
    assert np.max(np.abs(gt.values)) == 0.0
    c = Field(grid, np.full(grid.shape, 2.0))
    lt, _, _ = paraproduct(c, g, part)
    expect = 2.0 * (g.values - lp_block(g, -1, part).values
                    - lp_block(g, 0, part).values)
    assert np.max(np.abs(lt.values - expect)) < 1e-12


def test_paraproduct_bilinear(grid, part):
    f1, f2, g = rnd(grid, 7), rnd(grid, 8), rnd(grid, 9)
    a = paraproduct(f1 + f2, g, part)
    b1 = paraproduct(f1, g, part)
    b2 = paraproduct(f2, g, part)
    for x, y, z in zip(a, b1, b2):
        assert np.max(np.abs(x.values - y.values - z.values)) < 1e-11


def test_weight_table(grid):
    w = Weight(sigma=3.1)
    t = w.table(grid)
    assert np.all((0 < t) & (t <= 1))
    assert t[grid.index_of((0, 0, 0))] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        Weight(sigma=3.1, a=-1.0)


def test_besov_constant_formula(grid, part):
    c = 2.5
    w = Weight(sigma=4.0)
    params = BesovParams(s=0.75, p=2.0, r=math.inf, weight=w)
    f = Field(grid, np.full(grid.shape, c))
    got = besov_norm(f, params, part)
    lp = (np.sum(w.table(grid)) * grid.spacing ** 3) ** 0.5
    assert got == pytest.approx(2.0 ** -0.75 * c * lp, rel=1e-10)
    zero = Field(grid, np.zeros(grid.shape))
    assert besov_norm(zero, params, part) == 0.0


def test_besov_monotone_in_regularity(grid, part):
    w = Weight(sigma=3.1)
    rng = np.random.default_rng(11)
    for seed in range(50):
        f = Field(grid, rng.standard_normal(grid.shape))
        hi = besov_norm(f, BesovParams(s=1.0, p=2, r=math.inf, weight=w), part)
        lo = besov_norm(f, BesovParams(s=-0.5, p=2, r=math.inf, weight=w), part)
        assert hi >= lo * (1.0 - 1e-12)


def test_besov_sup_bound(grid, part):
    # s=0, p=r=inf, flat weight: sup_j |block| bounds |f|_inf / block count
    f = rnd(grid, 12)
    params = BesovParams(s=0.0, p=math.inf, r=math.inf, weight=Weight(0.0))
    norm = besov_norm(f, params, part)
    n_blocks = part.j_max + 2
    assert norm >= np.max(np.abs(f.values)) / n_blocks


def test_partition_too_small():
    with pytest.raises(ValueError):
        GridSpec(6, 1.0)
