import math
import warnings

import numpy as np
import pytest

from phi4sq.cutoffs import CutoffPair
from phi4sq.grid import Field, GridSpec, delta_field, inner, point_evaluator
from phi4sq.ou import (ModelParams, OrnsteinUhlenbeck, OuState, covariance_op,
                       heat, ou_step, resolvent, sample_gff, stream)


@pytest.fixture(scope="module")
def setup():
    g = GridSpec(12, 3.0)
    cut = CutoffPair(g, 1, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = ModelParams(grid=g, cut=cut, mass_sq=5.0)
    return g, cut, p


def test_params_validation(setup):
    g, cut, _ = setup
    with pytest.raises(ValueError):
        ModelParams(grid=g, cut=cut, mass_sq=-1.0)
    with pytest.raises(ValueError):
        ModelParams(grid=g, cut=cut, mass_sq=5.0, coupling=-0.1)
    with pytest.warns(UserWarning):
        ModelParams(grid=g, cut=cut, mass_sq=4.0, sigma=3.1)
    with pytest.warns(UserWarning):
        ModelParams(grid=g, cut=cut, mass_sq=5.0, sigma=2.0)


def test_stream_reproducible():
    a = stream(42, 3).standard_normal(5)
    b = stream(42, 3).standard_normal(5)
    c = stream(42, 4).standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_gff_moments(setup):
    g, cut, p = setup
    ou = OrnsteinUhlenbeck(p)
    rng = stream(7, 0)
    ev = point_evaluator(g, (0.0, 0.0, 0.0))
    n = 4000
    vals = np.empty(n)
    for i in range(n):
        vals[i] = float(np.sum((ou.sample_spectrum(rng) * ev).real))
    target = float(np.sum(1.0 / (2.0 * (g.k2_full + p.mass_sq))) / g.volume)
    mean_err = vals.std(ddof=1) / math.sqrt(n)
    assert abs(vals.mean()) < 4 * mean_err
    var = vals.var(ddof=1)
    var_err = var * math.sqrt(2.0 / n)
    assert abs(var - target) < 4 * var_err


def test_gff_smeared_covariance(setup):
    g, cut, p = setup
    rng = stream(8, 0)
    f = delta_field(g, (0.0, 0.0, 0.0))
    h = delta_field(g, (g.spacing, 0.0, 0.0))
    n = 4000
    prods = np.empty(n)
    for i in range(n):
        phi = sample_gff(p, rng)
        prods[i] = inner(f, phi) * inner(h, phi)
    target = inner(f, resolvent(h, p))
    err = prods.std(ddof=1) / math.sqrt(n)
    assert abs(prods.mean() - target) < 4 * err


def test_ou_step_preserves_stationary_law(setup):
    g, cut, p = setup
    ou = OrnsteinUhlenbeck(p)
    rng = stream(9, 0)
    # per-mode variance after an exact step from stationarity is unchanged
    decay, gain = ou.transition(0.3)
    v_stat = g.n ** 3 / (g.spacing ** 3 * 2.0 * ou.omega)
    v_next = decay ** 2 * v_stat + gain ** 2 * g.n ** 3 / g.spacing ** 3
    assert np.max(np.abs(v_next - v_stat) / v_stat) < 1e-12


def test_ou_two_time_zero_mode(setup):
    g, cut, p = setup
    rng = stream(10, 0)
    lag = 0.25
    n = 6000
    n3 = g.n ** 3
    vals = np.empty(n)
    ou = OrnsteinUhlenbeck(p)
    for i in range(n):
        zh = ou.sample_spectrum(rng)
        m0 = zh[0, 0, 0].real / n3
        zh = ou.step_spectrum(zh, lag, rng)
        vals[i] = m0 * (zh[0, 0, 0].real / n3)
    target = math.exp(-p.mass_sq * lag) / (2 * p.mass_sq * g.volume)
    err = vals.std(ddof=1) / math.sqrt(n)
    assert abs(vals.mean() - target) < 4 * err


def test_ou_mixing(setup):
    g, cut, p = setup
    rng = stream(11, 0)
    st0 = OuState(0.0, sample_gff(p, rng))
    st1 = ou_step(st0, 10.0, rng, p)
    corr = inner(st0.z, st1.z) / math.sqrt(inner(st0.z, st0.z) * inner(st1.z, st1.z))
    assert abs(corr) < 0.05


def test_ou_step_rejects_bad_dt(setup):
    g, cut, p = setup
    st = OuState(0.0, sample_gff(p, stream(12, 0)))
    with pytest.raises(ValueError):
        ou_step(st, -0.1, stream(12, 1), p)


def test_covariance_op(setup):
    g, cut, p = setup
    f = delta_field(g, (0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        covariance_op(f, -1.0, cut, p)
    # full-lattice smoothing reduces the lag-0 operator to the resolvent
    full = CutoffPair(g, 5, 1.0)
    assert full.covers_lattice()
    a = covariance_op(f, 0.0, full, p)
    b = resolvent(f, p)
    assert np.max(np.abs(a.values - b.values)) < 1e-12 * np.max(np.abs(b.values))
    # symbol domination: |V(t) f|_2 <= exp(-m0^2 t) |V(0) f|_2
    t = 0.6
    va = covariance_op(f, t, cut, p)
    vb = covariance_op(f, 0.0, cut, p)
    na = math.sqrt(inner(va, va))
    nb = math.sqrt(inner(vb, vb))
    assert na <= math.exp(-p.mass_sq * t) * nb + 1e-14


def test_covariance_mc_identity(setup):
    # E[<f, PZ_t><g, PZ_s>] = <cov_op(lag) f, g> by exact-step Monte Carlo
    g, cut, p = setup
    rng = stream(13, 0)
    ou = OrnsteinUhlenbeck(p)
    f = delta_field(g, (0.0, 0.0, 0.0))
    h = delta_field(g, (0.0, g.spacing, 0.0))
    psi = cut.smoothing_symbol
    c_pair = g.spacing ** 6 / g.volume
    fh = np.conj(np.fft.rfftn(f.values)) * g.half_weights * psi
    hh = np.conj(np.fft.rfftn(h.values)) * g.half_weights * psi
    lag, n = 0.15, 5000
    vals = np.empty(n)
    for i in range(n):
        zh = ou.sample_spectrum(rng)
        a = c_pair * float(np.sum((zh * hh).real))
        zh = ou.step_spectrum(zh, lag, rng)
        b = c_pair * float(np.sum((zh * fh).real))
        vals[i] = a * b
    target = inner(covariance_op(f, lag, cut, p), h)
    err = vals.std(ddof=1) / math.sqrt(n)
    assert abs(vals.mean() - target) < 4 * err


def test_heat_flow(setup):
    g, cut, p = setup
    f = Field(g, np.full(g.shape, 3.0))
    out = heat(f, 0.5, p)
    assert np.allclose(out.values, 3.0 * math.exp(-0.5 * p.mass_sq), rtol=1e-12)
    with pytest.raises(ValueError):
        heat(f, -0.5, p)
