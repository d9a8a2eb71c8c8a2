import math

import numpy as np
import pytest

from phi4sq.cutoffs import CutoffPair, bump_profile, localized_low_pass, low_pass
from phi4sq.grid import Field, GridSpec, inner
from phi4sq.lp import build_partition, lp_block


@pytest.fixture(scope="module")
def grid():
    return GridSpec(16, 4.0)


def rnd(grid, seed):
    return Field(grid, np.random.default_rng(seed).standard_normal(grid.shape))


def test_profile_plateau_support():
    assert bump_profile(0.5) == 1.0
    assert bump_profile(1.0) == 1.0
    assert bump_profile(2.5) == 0.0
    assert 0.0 < bump_profile(1.5) < 1.0
    r = np.linspace(-3, 3, 101)
    assert np.allclose(bump_profile(np.abs(r)), bump_profile(np.abs(-r)))


def test_cutoff_invariants(grid):
    with pytest.raises(ValueError):
        CutoffPair(grid, 1, 2.0)  # 2M = L
    with pytest.raises(ValueError):
        CutoffPair(grid, -1, 1.0)
    cut = CutoffPair(grid, 1, 1.5)
    r = np.sqrt(grid.radius2)
    assert np.all(cut.mask[r <= 1.5] == 1.0)
    assert np.all(cut.mask[r >= 3.0] == 0.0)


def test_pure_mode_pass_and_kill(grid):
    cut = CutoffPair(grid, 1, 1.5)
    x = grid.axis
    k_lo = np.pi / grid.L * 2  # |k| = pi/2 < 2
    f_lo = Field(grid, np.cos(k_lo * x)[:, None, None] * np.ones(grid.shape))
    out = low_pass(f_lo, cut)
    assert np.max(np.abs(out.values - f_lo.values)) < 1e-13
    k_hi = np.pi / grid.L * 6  # 4.71 >= 4
    f_hi = Field(grid, np.cos(k_hi * x)[:, None, None] * np.ones(grid.shape))
    out = low_pass(f_hi, cut)
    assert np.max(np.abs(out.values)) < 1e-13


def test_annihilation_identity(grid):
    # block of the smoothed field vanishes when 2^N <= (sqrt3/8) 2^j
    part = build_partition(grid)
    f = rnd(grid, 0)
    pairs = [(n, j) for n in (0, 1) for j in part.indices
             if 2.0 ** n <= (math.sqrt(3.0) / 8.0) * 2.0 ** j]
    assert pairs, "expected at least one annihilation pair on this grid"
    for n, j in pairs:
        cut = CutoffPair(grid, n, 1.5)
        out = lp_block(low_pass(f, cut), j, part)
        assert np.max(np.abs(out.values)) < 1e-12


def test_duality(grid):
    cut = CutoffPair(grid, 1, 1.5)
    rng = np.random.default_rng(1)
    for _ in range(50):
        f = Field(grid, rng.standard_normal(grid.shape))
        g = Field(grid, rng.standard_normal(grid.shape))
        lhs = inner(localized_low_pass(f, cut), g)
        rhs = inner(f, localized_low_pass(g, cut, adjoint=True))
        assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), 1.0)


def test_low_pass_self_adjoint(grid):
    cut = CutoffPair(grid, 1, 1.5)
    f, g = rnd(grid, 2), rnd(grid, 3)
    assert inner(low_pass(f, cut), g) == pytest.approx(
        inner(f, low_pass(g, cut)), rel=1e-12)


def test_mask_support_localization(grid):
    cut = CutoffPair(grid, 3, 1.5)
    f = rnd(grid, 4)
    out = localized_low_pass(f, cut)
    r = np.sqrt(grid.radius2)
    assert np.all(out.values[r >= 3.0] == 0.0)


def test_level_product_plateau(grid):
    # applying two smoothings preserves modes below the smaller plateau
    x = grid.axis
    k = np.pi / grid.L * 2
    f = Field(grid, np.cos(k * x)[:, None, None] * np.ones(grid.shape))
    a = low_pass(low_pass(f, CutoffPair(grid, 1, 1.5)), CutoffPair(grid, 2, 1.5))
    assert np.max(np.abs(a.values - f.values)) < 1e-13


def test_monotone_exhaustion(grid):
    f = rnd(grid, 5)
    errs = []
    for n in (0, 1, 2, 3, 4):
        cut = CutoffPair(grid, n, 1.5)
        errs.append(np.linalg.norm(low_pass(f, cut).values - f.values))
    assert all(a >= b - 1e-12 for a, b in zip(errs, errs[1:]))
    # once the plateau covers the lattice the smoothing is the identity
    full = CutoffPair(grid, 4, 1.5)
    assert full.covers_lattice()
    assert errs[-1] < 1e-12
