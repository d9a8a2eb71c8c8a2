import math
import warnings

import numpy as np
import pytest

from phi4sq.cutoffs import CutoffPair
from phi4sq.diagnostics import (apply_octahedral, besov_support_estimate,
                                block_probe_values, cumulants,
                                limit_contraction, octahedral_elements,
                                quartic_contraction, rp_gram,
                                rp_gram_gaussian, symmetry_test)
from phi4sq.grid import Field, GridSpec, delta_field, inner
from phi4sq.lp import Weight
from phi4sq.observables import gaussian_bump, rp_family
from phi4sq.ou import ModelParams, sample_gff, stream
from phi4sq.quadrature import QuadratureSpec


@pytest.fixture(scope="module")
def setup():
    g = GridSpec(12, 3.0)
    cut = CutoffPair(g, 1, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = ModelParams(grid=g, cut=cut, mass_sq=5.0)
    return g, cut, p


def test_cumulants_gaussian():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(20000) * 2.0 + 1.0
    k1, e1 = cumulants(x, 1)
    k2, e2 = cumulants(x, 2)
    k3, e3 = cumulants(x, 3)
    k4, e4 = cumulants(x, 4)
    assert abs(k1 - 1.0) < 4 * e1
    assert abs(k2 - 4.0) < 4 * e2
    assert abs(k3) < 4 * e3
    assert abs(k4) < 4 * e4


def test_cumulants_chi_square_oracle():
    # chi^2_k cumulants: k, 2k, 8k, 48k
    rng = np.random.default_rng(1)
    k = 3.0
    x = rng.chisquare(df=k, size=30000)
    for order, target in [(1, k), (2, 2 * k), (3, 8 * k), (4, 48 * k)]:
        val, err = cumulants(x, order)
        assert abs(val - target) < 4 * err, (order, val, target, err)


def test_cumulants_validation():
    with pytest.raises(ValueError):
        cumulants(np.ones(1000), 5)
    with pytest.raises(ValueError):
        cumulants(np.ones(50), 4)


def test_octahedral_group_properties(setup):
    g, cut, p = setup
    els = octahedral_elements()
    assert len(els) == 48
    rng = np.random.default_rng(2)
    a = rng.standard_normal(g.shape)
    b = rng.standard_normal(g.shape)
    # inner products are preserved and the identity acts trivially
    assert np.array_equal(apply_octahedral(a, (0, 1, 2), (1, 1, 1)), a)
    for perm, signs in els[:10]:
        ta = apply_octahedral(a, perm, signs)
        tb = apply_octahedral(b, perm, signs)
        assert np.sum(a * b) == pytest.approx(np.sum(ta * tb), rel=1e-12)


def test_octahedral_point_mapping(setup):
    # (theta f)(x) = f(theta x) checked on grid deltas
    g, cut, p = setup
    idx = (2, 5, 9)
    x0 = tuple(g.axis[i] for i in idx)
    d = delta_field(g, x0)
    perm, signs = (1, 2, 0), (-1, 1, -1)
    td = apply_octahedral(d.values, perm, signs)
    nz = np.argwhere(td != 0)
    assert len(nz) == 1
    i1, i2, i3 = nz[0]
    y = (g.axis[i1], g.axis[i2], g.axis[i3])
    # theta y must equal x0: (theta y)_a = signs_a * y_{perm_a}
    ty = tuple(signs[a] * y[perm[a]] for a in range(3))
    wrapped = tuple((c + g.L) % (2 * g.L) - g.L for c in ty)
    assert wrapped == pytest.approx(x0)


def test_symmetry_gaussian_ensemble(setup):
    g, cut, p = setup
    rng = stream(3, 0)
    ens = [sample_gff(p, rng) for _ in range(96)]
    fam = {"bump": gaussian_bump(g, (g.L / 4, 0, 0), 0.4)}
    rep = symmetry_test(ens, fam, max_order=4)
    assert rep.passed
    ident = [r for r in rep.rows
             if r["perm"] == (0, 1, 2) and r["signs"] == (1, 1, 1)]
    assert all(r["diff"] == 0.0 for r in ident)


def test_rp_support_enforced(setup):
    g, cut, p = setup
    bad = gaussian_bump(g, (0.0, 0.0, 0.0), 0.5)  # straddles x1 = 0
    rng = stream(4, 0)
    ens = [sample_gff(p, rng) for _ in range(8)]
    with pytest.raises(ValueError):
        rp_gram(ens, [bad])


def test_rp_gaussian_matches_closed_form(setup):
    g, cut, p = setup
    fs = rp_family(g, 2, width=0.4)
    rng = stream(5, 0)
    ens = [sample_gff(p, rng) for _ in range(400)]
    gram, min_eig, err, ok = rp_gram(ens, fs)
    closed = rp_gram_gaussian(fs, p)
    assert np.max(np.abs(gram - closed)) < 4.0 / math.sqrt(len(ens))
    assert ok
    # closed form is positive semidefinite
    assert np.linalg.eigvalsh(closed).min() > -1e-12
    # single functional: real diagonal entry
    g1, m1, e1, ok1 = rp_gram(ens, fs[:1])
    assert abs(g1[0, 0].imag) < 1e-12
    assert ok1


def test_besov_support_estimate(setup):
    g, cut, p = setup
    zero = [Field(g, np.zeros(g.shape))] * 4
    v, e = besov_support_estimate(zero, 0.1, 2.0, Weight(3.1))
    assert v == 0.0
    rng = stream(6, 0)
    ens = [sample_gff(p, rng) for _ in range(32)]
    v, e = besov_support_estimate(ens, 0.1, 2.0, Weight(3.1))
    assert math.isfinite(v) and v > 0 and e > 0
    with pytest.raises(ValueError):
        besov_support_estimate([], 0.1, 2.0, Weight(3.1))


def test_contraction_zero_input(setup):
    g, cut, p = setup
    zero = Field(g, np.zeros(g.shape))
    quad = QuadratureSpec(t_max=4.0)
    assert quartic_contraction(zero, p, cut, quad) == 0.0
    assert limit_contraction(zero, p.mass_sq, quad) == 0.0


def test_contraction_isserlis_mc(setup):
    # brute-force Monte Carlo of the four-point contraction at a single
    # time against the tau-integrand of the deterministic quadrature:
    # E[<f,u>^3 <q, :u^3:>] = 6 <q, (cov f)^3> at lag 0
    g, cut, p = setup
    from phi4sq.grid import point_evaluator
    from phi4sq.ou import OrnsteinUhlenbeck, covariance_op
    ou = OrnsteinUhlenbeck(p)
    f = gaussian_bump(g, (0.0, 0.0, 0.0), 0.5)
    q = gaussian_bump(g, (0.3, 0.0, 0.0), 0.5)
    rng = stream(7, 0)
    psi = cut.smoothing_symbol
    c_pair = g.spacing ** 6 / g.volume
    fh = np.conj(np.fft.rfftn(f.values)) * g.half_weights * psi
    c1 = float(np.sum(g.half_weights * psi ** 2 / (2 * (g.k2 + p.mass_sq)))
               / g.volume)
    n = 20000
    vals = np.empty(n)
    qv = q.values
    for i in range(n):
        zh = ou.sample_spectrum(rng)
        a = c_pair * float(np.sum((zh * fh).real))
        u = np.fft.irfftn(zh * psi, s=g.shape, axes=(0, 1, 2))
        w3 = u ** 3 - 3 * c1 * u
        vals[i] = a ** 3 * float(np.sum(qv * w3) * g.spacing ** 3)
    vf = covariance_op(f, 0.0, cut, p)
    target = 6.0 * inner(q, Field(g, vf.values ** 3))
    err = vals.std(ddof=1) / math.sqrt(n)
    assert abs(vals.mean() - target) < 4 * err


def test_block_probe_scaling_small_mass():
    # dyadic probes of the contraction integral scale like 2^j once the
    # scaled mass term is negligible
    g = GridSpec(32, 4.0)
    quad = QuadratureSpec(t_max=20.0 / 0.05)
    vals = block_probe_values(g, 0.05, (0.0, 0.0, 0.0), [0, 1, 2], quad)
    incs = np.diff(np.log2(vals))
    assert np.all(np.abs(incs - 1.0) < 0.2), incs
