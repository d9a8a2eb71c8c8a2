"""Free-field sampling and the stationary Ornstein-Uhlenbeck process.

Everything is exact in spectral coordinates.  Under the grid Fourier
convention (see grid.py) the free field with covariance
[2(m0^2 - Lap)]^-1 has independent half-spectrum modes of variance
(2L)^3 / (2 omega_k), omega_k = |k|^2 + m0^2.  The OU update

    zhat_k <- exp(-dt omega_k) zhat_k + eta_k,
    Var(eta_k) = (1 - exp(-2 dt omega_k)) * (2L)^3 / (2 omega_k)

is the exact transition kernel, so the stationary law equals the free
field law for every dt and the whole process is bit-reproducible per
(seed, stream) through counter-based Philox streams.

Hermitian symmetry is enforced structurally: white noise is drawn in real
space and transformed, so its half-spectrum is exactly the spectrum of a
real field.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cutoffs import CutoffPair
from .grid import Field, GridSpec, apply_symbol, irfft

__all__ = [
    "ModelParams",
    "stream",
    "OrnsteinUhlenbeck",
    "OuState",
    "sample_gff",
    "ou_step",
    "covariance_op",
    "heat",
    "resolvent",
]


@dataclass(frozen=True)
class ModelParams:
    """Mass, coupling and weight parameters of one simulation setup."""

    grid: GridSpec
    cut: CutoffPair
    mass_sq: float
    coupling: float = 0.0
    sigma: float = 3.1
    a: float = 1.0

    def __post_init__(self):
        if self.mass_sq <= 0:
            raise ValueError("mass_sq must be positive")
        if self.coupling < 0:
            raise ValueError("coupling must be >= 0")
        if self.mass_sq <= 4.5:
            warnings.warn(
                f"mass_sq = {self.mass_sq} <= 9/2; the standard weight condition "
                "cannot hold (use the scaled weight a < 2*mass_sq/9)", stacklevel=2)
        bound = 2.0 * self.mass_sq / self.a ** 2
        if not (9.0 < self.sigma ** 2 < bound):
            warnings.warn(
                f"weight exponent violates 9 < sigma^2 < 2*mass_sq/a^2 "
                f"(sigma^2 = {self.sigma ** 2:.3g}, bound = {bound:.3g})", stacklevel=2)


def stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Counter-based RNG stream: reproducible per (seed, stream_id)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream_id,))
    return np.random.Generator(np.random.Philox(ss))


class OrnsteinUhlenbeck:
    """Spectral-space sampler/stepper for the free field and its dynamics."""

    def __init__(self, params: ModelParams):
        self.params = params
        self.grid = params.grid

    @cached_property
    def omega(self) -> np.ndarray:
        return self.grid.k2 + self.params.mass_sq

    @cached_property
    def gff_gain(self) -> np.ndarray:
        return 1.0 / np.sqrt(2.0 * self.omega)

    def white(self, rng: np.random.Generator) -> np.ndarray:
        """Half-spectrum of grid white noise; per-mode variance (2L)^3."""
        g = self.grid
        w = rng.standard_normal(g.shape) * g.spacing ** -1.5
        return np.fft.rfftn(w)

    def sample_spectrum(self, rng: np.random.Generator) -> np.ndarray:
        return self.white(rng) * self.gff_gain

    def step_spectrum(self, zhat: np.ndarray, dt: float,
                      rng: np.random.Generator) -> np.ndarray:
        if dt <= 0:
            raise ValueError("dt must be positive")
        decay = np.exp(-dt * self.omega)
        gain = np.sqrt((1.0 - decay ** 2) / (2.0 * self.omega))
        return zhat * decay + self.white(rng) * gain

    def transition(self, dt: float) -> tuple[np.ndarray, np.ndarray]:
        """(decay, noise std) arrays of the exact per-mode transition."""
        decay = np.exp(-dt * self.omega)
        return decay, np.sqrt((1.0 - decay ** 2) / (2.0 * self.omega))

    def to_field(self, zhat: np.ndarray) -> Field:
        return irfft(self.grid, zhat)


@dataclass
class OuState:
    """One realization of the stationary OU field at time t."""

    t: float
    z: Field

    def __post_init__(self):
        self.z.check_finite()


def sample_gff(params: ModelParams, rng: np.random.Generator) -> Field:
    """Draw one free-field sample (exact spectral sampling)."""
    ou = OrnsteinUhlenbeck(params)
    return ou.to_field(ou.sample_spectrum(rng))


def ou_step(state: OuState, dt: float, rng: np.random.Generator,
            params: ModelParams) -> OuState:
    """Advance the OU field by dt with the exact transition kernel."""
    ou = OrnsteinUhlenbeck(params)
    zhat = np.fft.rfftn(state.z.values)
    return OuState(state.t + dt, ou.to_field(ou.step_spectrum(zhat, dt, rng)))


def heat(f: Field, t: float, params: ModelParams) -> Field:
    """Massive heat flow exp(t(Lap - mass_sq)), t >= 0."""
    if t < 0:
        raise ValueError("heat time must be >= 0")
    m = params.mass_sq
    return apply_symbol(f, f.grid.symbol(lambda k2: np.exp(-t * (k2 + m))))


def resolvent(f: Field, params: ModelParams) -> Field:
    """[2(mass_sq - Lap)]^-1 as a multiplier."""
    m = params.mass_sq
    return apply_symbol(f, f.grid.symbol(lambda k2: 1.0 / (2.0 * (k2 + m))))


def covariance_symbol(cut: CutoffPair, params: ModelParams, lag: float) -> np.ndarray:
    if lag < 0:
        raise ValueError("lag must be >= 0")
    omega = cut.grid.k2 + params.mass_sq
    return cut.smoothing_symbol ** 2 * np.exp(-lag * omega) / (2.0 * omega)


def covariance_op(f: Field, lag: float, cut: CutoffPair,
                  params: ModelParams) -> Field:
    """Two-time covariance operator of the smoothed OU field.

    E[<f, P Z_t> <g, P Z_s>] = <covariance_op(f, t-s), g> with the symbol
    psi^2 exp(-lag*omega) / (2 omega).
    """
    return apply_symbol(f, covariance_symbol(cut, params, lag))
