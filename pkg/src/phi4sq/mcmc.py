"""Function-space MCMC oracle for the cutoff quartic measure.

The preconditioned Crank-Nicolson proposal

    phi' = sqrt(1 - beta^2) phi + beta * xi,   xi ~ free field

preserves the Gaussian reference exactly, so the Metropolis ratio only
involves the interaction energy and the chain is reversible with respect
to the target for every beta in (0, 1].  Chain states carry the
half-spectrum of the field; the real-space field is materialized lazily.

A MALA variant reusing the renormalized drift is provided as a secondary
oracle.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .cutoffs import CutoffPair
from .grid import Field
from .ou import ModelParams, OrnsteinUhlenbeck
from .sqe import nonlinear_drift
from .wick import RenormConstants

__all__ = [
    "interaction_energy",
    "ChainState",
    "chain_state",
    "pcn_step",
    "mala_step",
    "run_chain",
    "ChainResult",
    "integrated_autocorr",
]


def interaction_energy(phi: Field, cut: CutoffPair,
                       constants: RenormConstants, coupling: float) -> float:
    """Grid quadrature of the renormalized quartic interaction.

    lambda/4 (cutoff phi)^4 - (3 lambda/2)(c1 - 3 lambda c2) mask^2
    (cutoff phi)^2, integrated with the grid measure.
    """
    return _energy_hat(np.fft.rfftn(phi.values), phi.grid, cut, constants,
                       coupling)


def _energy_hat(phi_hat: np.ndarray, grid, cut: CutoffPair,
                constants: RenormConstants, coupling: float) -> float:
    if coupling == 0.0:
        return 0.0
    w = cut.mask * np.fft.irfftn(phi_hat * cut.smoothing_symbol, s=grid.shape, axes=(0, 1, 2))
    cstar = constants.cstar(coupling)
    dens = (coupling / 4.0) * w ** 4 \
        - 1.5 * coupling * cstar * cut.mask ** 2 * w ** 2
    return float(np.sum(dens) * grid.spacing ** 3)


@dataclass
class ChainState:
    grid: object
    phi_hat: np.ndarray
    energy: float
    accepted: int = 0
    proposed: int = 0

    @property
    def phi(self) -> Field:
        f = getattr(self, "_phi", None)
        if f is None:
            f = Field(self.grid, np.fft.irfftn(self.phi_hat, s=self.grid.shape, axes=(0, 1, 2)))
            object.__setattr__(self, "_phi", f)
        return f

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0

    def check_energy(self, cut, constants, coupling, tol=1e-10):
        fresh = interaction_energy(self.phi, cut, constants, coupling)
        scale = max(abs(fresh), 1.0)
        if abs(fresh - self.energy) > tol * scale:
            raise AssertionError(
                f"cached energy {self.energy} != recomputed {fresh}")
        return self


def chain_state(phi: Field, cut: CutoffPair, constants: RenormConstants,
                coupling: float) -> ChainState:
    phi_hat = np.fft.rfftn(phi.values)
    return ChainState(phi.grid, phi_hat,
                      _energy_hat(phi_hat, phi.grid, cut, constants, coupling))


def pcn_step(state: ChainState, beta: float, rng: np.random.Generator,
             params: ModelParams, cut: CutoffPair,
             constants: RenormConstants) -> ChainState:
    """One preconditioned Crank-Nicolson step."""
    if not (0.0 < beta <= 1.0):
        raise ValueError("beta must be in (0, 1]")
    ou = OrnsteinUhlenbeck(params)
    prop_hat = np.sqrt(1.0 - beta ** 2) * state.phi_hat \
        + beta * ou.sample_spectrum(rng)
    e_prop = _energy_hat(prop_hat, state.grid, cut, constants, params.coupling)
    log_ratio = state.energy - e_prop
    if np.log(rng.uniform()) < min(0.0, log_ratio):
        return ChainState(state.grid, prop_hat, e_prop,
                          state.accepted + 1, state.proposed + 1)
    return ChainState(state.grid, state.phi_hat, state.energy,
                      state.accepted, state.proposed + 1)


def mala_step(state: ChainState, step: float, rng: np.random.Generator,
              params: ModelParams, cut: CutoffPair,
              constants: RenormConstants) -> ChainState:
    """Secondary oracle: exponential-Euler MALA with the renormalized drift.

    The proposal is the integrator's transition kernel over `step`; the
    Metropolis correction uses the free-field quadratic form plus the
    interaction, with the exact Gaussian kernel density ratio.
    """
    g = state.grid
    ou = OrnsteinUhlenbeck(params)
    lam = params.coupling
    decay, gain = ou.transition(step)
    wdt = (1.0 - decay) / ou.omega

    def mean_hat(phat):
        x = Field(g, np.fft.irfftn(phat, s=g.shape, axes=(0, 1, 2)))
        d = nonlinear_drift(x, cut, constants, lam)
        return decay * phat + wdt * np.fft.rfftn(d.values)

    phi_hat = state.phi_hat
    m_fwd = mean_hat(phi_hat)
    prop_hat = m_fwd + ou.white(rng) * gain
    m_bwd = mean_hat(prop_hat)

    var = gain ** 2
    w = g.half_weights
    # raw half-spectrum pairing: <a, b> = c_pair * sum w ahat conj(bhat)
    c_pair = g.spacing ** 6 / g.volume
    e_prop = _energy_hat(prop_hat, g, cut, constants, lam)
    lt_cur = -float(np.sum(w * ou.omega * np.abs(phi_hat) ** 2)) * c_pair \
        - state.energy
    lt_prop = -float(np.sum(w * ou.omega * np.abs(prop_hat) ** 2)) * c_pair \
        - e_prop
    lq_fwd = -0.5 * float(np.sum(w * np.abs(prop_hat - m_fwd) ** 2 / var)) * c_pair
    lq_bwd = -0.5 * float(np.sum(w * np.abs(phi_hat - m_bwd) ** 2 / var)) * c_pair
    log_alpha = (lt_prop + lq_bwd) - (lt_cur + lq_fwd)
    if np.log(rng.uniform()) < min(0.0, log_alpha):
        return ChainState(g, prop_hat, e_prop,
                          state.accepted + 1, state.proposed + 1)
    return ChainState(g, state.phi_hat, state.energy,
                      state.accepted, state.proposed + 1)


def integrated_autocorr(x: np.ndarray, window: float = 8.0) -> float:
    """Sokal self-consistent-window estimate of the autocorrelation time."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 8 or np.allclose(x, x[0]):
        return 1.0
    f = np.fft.rfft(x - x.mean(), 2 * n)
    acf = np.fft.irfft(f * np.conj(f))[:n].real
    acf /= acf[0]
    tau = 1.0
    for m in range(1, n // 4):
        tau = 1.0 + 2.0 * acf[1:m + 1].sum()
        if m >= window * tau:
            break
    return float(max(tau, 1.0))


@dataclass
class ChainResult:
    samples: list
    beta: float
    acceptance_rate: float
    autocorr: dict
    series: dict


def run_chain(init: Field, params: ModelParams, cut: CutoffPair,
              constants: RenormConstants, rng: np.random.Generator,
              length: int, burn_in: int, thinning: int = 1,
              beta: float | None = None, observables: dict | None = None,
              store_fields: bool = True) -> ChainResult:
    """Burn in (with optional beta auto-tuning), then collect thinned
    post-burn-in samples and observable series with autocorrelation
    estimates.

    When beta is None it is tuned toward ~30% acceptance during burn-in
    and frozen afterwards (tuning during measurement would bias the law).
    Set store_fields=False for observable-only runs (long chains).
    """
    if length <= burn_in:
        raise ValueError("length must exceed burn_in")
    if thinning > length - burn_in:
        raise ValueError("thinning exceeds the post-burn-in span: empty ensemble")
    tune = beta is None
    beta = beta if beta is not None else 0.5
    state = chain_state(init, cut, constants, params.coupling)
    window = max(50, burn_in // 20)
    acc_in_window = 0
    for k in range(burn_in):
        before = state.accepted
        state = pcn_step(state, beta, rng, params, cut, constants)
        acc_in_window += state.accepted - before
        if tune and (k + 1) % window == 0:
            rate = acc_in_window / window
            beta = float(np.clip(beta * np.exp(1.2 * (rate - 0.3)), 1e-3, 1.0))
            acc_in_window = 0
    state = ChainState(state.grid, state.phi_hat, state.energy)
    samples = []
    observables = observables or {}
    ohats = {oid: np.conj(np.fft.rfftn(f.values)) * init.grid.half_weights
             for oid, f in observables.items()}
    c_pair = init.grid.spacing ** 6 / init.grid.volume
    series: dict[str, list] = {oid: [] for oid in observables}
    for k in range(length - burn_in):
        state = pcn_step(state, beta, rng, params, cut, constants)
        if (k + 1) % thinning == 0:
            if store_fields:
                samples.append(state.phi)
            for oid, oh in ohats.items():
                series[oid].append(c_pair * float(np.sum((oh * state.phi_hat).real)))
    if state.acceptance_rate < 0.01:
        warnings.warn(
            f"pCN acceptance rate {state.acceptance_rate:.3f} < 1%: "
            "beta too large for this target", stacklevel=2)
    autocorr = {oid: integrated_autocorr(np.array(v))
                for oid, v in series.items()}
    return ChainResult(samples, beta, state.acceptance_rate, autocorr,
                       {k: np.array(v) for k, v in series.items()})
