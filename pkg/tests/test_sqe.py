import math
import warnings

import numpy as np
import pytest

from phi4sq.cutoffs import CutoffPair
from phi4sq.grid import Field, GridSpec, inner
from phi4sq.mcmc import interaction_energy
from phi4sq.ou import ModelParams, OrnsteinUhlenbeck, OuState, ou_step, sample_gff, stream
from phi4sq.quadrature import QuadratureSpec
from phi4sq.sqe import (BlowupError, Schedule, make_state, nonlinear_drift,
                        run_trajectory, sqe_step)
from phi4sq.wick import build_constants


@pytest.fixture(scope="module")
def setup():
    g = GridSpec(12, 3.0)
    cut = CutoffPair(g, 1, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = ModelParams(grid=g, cut=cut, mass_sq=5.0, coupling=0.5)
        p0 = ModelParams(grid=g, cut=cut, mass_sq=5.0, coupling=0.0)
    consts = build_constants(p, cut, QuadratureSpec(t_max=4.0))
    return g, cut, p, p0, consts


def test_drift_trivial_cases(setup):
    g, cut, p, p0, consts = setup
    zero = Field(g, np.zeros(g.shape))
    assert np.max(np.abs(nonlinear_drift(zero, cut, consts, 0.5).values)) == 0.0
    f = sample_gff(p, stream(1, 0))
    assert np.max(np.abs(nonlinear_drift(f, cut, consts, 0.0).values)) == 0.0


def test_drift_is_negative_energy_gradient(setup):
    # centered finite differences of the interaction energy
    g, cut, p, p0, consts = setup
    rng = stream(2, 0)
    lam = p.coupling
    eps = 1e-4
    for trial in range(20):
        x = sample_gff(p, rng)
        eta = sample_gff(p, rng)
        lhs = inner(nonlinear_drift(x, cut, consts, lam), eta)
        up = interaction_energy(x + eps * eta, cut, consts, lam)
        dn = interaction_energy(x - eps * eta, cut, consts, lam)
        rhs = -(up - dn) / (2 * eps)
        assert lhs == pytest.approx(rhs, rel=5e-6, abs=1e-10)


def test_spectral_confinement(setup):
    # drift has no support on modes beyond the smoothing support
    g, cut, p, p0, consts = setup
    x = sample_gff(p, stream(3, 0))
    d = nonlinear_drift(x, cut, consts, p.coupling)
    dhat = np.fft.rfftn(d.values)
    dead = np.sqrt(g.k2) >= cut.support_edge
    assert np.max(np.abs(dhat[dead])) < 1e-10 * np.max(np.abs(dhat))


def test_zero_coupling_matches_exact_ou(setup):
    g, cut, p, p0, consts = setup
    x0 = sample_gff(p0, stream(4, 0))
    st = make_state(x0, "direct", p0, cut, consts, stream(4, 1))
    ou_state = OuState(0.0, x0.copy())
    r1 = stream(4, 2)
    r2 = stream(4, 2)
    for _ in range(10):
        st = sqe_step(st, 0.01, r1, p0, cut, consts)
        ou_state = ou_step(ou_state, 0.01, r2, p0)
    assert np.array_equal(st.x.values, ou_state.z.values)


def test_dpd_reconstruction_identity(setup):
    g, cut, p, p0, consts = setup
    x0 = sample_gff(p, stream(5, 0))
    st = make_state(x0, "dpd", p, cut, consts, stream(5, 1),
                    tree_burn=1.0, dt=0.01)
    assert st.reconstruction_defect(p.coupling) < 1e-10
    rng = stream(5, 2)
    for _ in range(20):
        st = sqe_step(st, 0.01, rng, p, cut, consts)
    assert st.reconstruction_defect(p.coupling) < 1e-10
    assert np.all(np.isfinite(st.x.values))


def test_dpd_and_direct_agree_weakly(setup):
    # one short trajectory each from the same initial point stays within a
    # loose envelope of the other (they share the continuum dynamics)
    g, cut, p, p0, consts = setup
    x0 = sample_gff(p, stream(6, 0))
    n_rep, T, dt = 12, 0.5, 0.01
    f = sample_gff(p, stream(6, 1))
    va, vb = [], []
    for r in range(n_rep):
        sa = make_state(x0, "direct", p, cut, consts, stream(6, 100 + r))
        rng_a = stream(6, 200 + r)
        for _ in range(int(T / dt)):
            sa = sqe_step(sa, dt, rng_a, p, cut, consts)
        va.append(inner(f, sa.x))
        sb = make_state(x0, "dpd", p, cut, consts, stream(6, 300 + r),
                        tree_burn=1.0, dt=dt)
        rng_b = stream(6, 400 + r)
        for _ in range(int(T / dt)):
            sb = sqe_step(sb, dt, rng_b, p, cut, consts)
        vb.append(inner(f, sb.x))
    va, vb = np.array(va), np.array(vb)
    sig = math.hypot(va.std(ddof=1), vb.std(ddof=1)) / math.sqrt(n_rep)
    assert abs(va.mean() - vb.mean()) < 4 * sig


def test_blowup_guard(setup):
    g, cut, p, p0, consts = setup
    huge = Field(g, np.full(g.shape, 10.0))
    st = make_state(huge, "direct", p, cut, consts, stream(7, 0))
    with pytest.raises(BlowupError):
        sqe_step(st, 0.01, stream(7, 1), p, cut, consts, guard=5.0)


def test_step_rejects_bad_dt(setup):
    g, cut, p, p0, consts = setup
    st = make_state(sample_gff(p, stream(8, 0)), "direct", p, cut, consts,
                    stream(8, 1))
    with pytest.raises(ValueError):
        sqe_step(st, 0.0, stream(8, 2), p, cut, consts)
    with pytest.raises(ValueError):
        make_state(sample_gff(p, stream(8, 3)), "bogus", p, cut, consts,
                   stream(8, 4))


def test_run_trajectory(setup):
    g, cut, p, p0, consts = setup
    x0 = sample_gff(p, stream(9, 0))
    # zero-length schedule returns the initial state
    rows, st = run_trajectory(x0, p, cut, consts, Schedule(dt=0.01, T=0.0),
                              stream(9, 1))
    assert np.array_equal(st.x.values, x0.values)
    assert rows == []
    # observers stream (t, id, value) rows at thinned steps
    f = sample_gff(p, stream(9, 2))
    rows, st = run_trajectory(x0, p, cut, consts,
                              Schedule(dt=0.01, T=0.05, thinning=1),
                              stream(9, 3), observers={"f": f})
    assert len(rows) == 6
    assert rows[0] == (0.0, "f", pytest.approx(inner(f, x0)))
    assert all(r[1] == "f" for r in rows)
    # deterministic for a fixed stream
    rows2, _ = run_trajectory(x0, p, cut, consts,
                              Schedule(dt=0.01, T=0.05, thinning=1),
                              stream(9, 3), observers={"f": f})
    assert rows == rows2
