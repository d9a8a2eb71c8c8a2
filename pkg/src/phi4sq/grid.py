"""Periodic 3-d grid, Fourier transform contract and spectral multipliers.

Conventions (fixed once, used everywhere in the package)
--------------------------------------------------------
The box is [-L, L)^3 with n points per axis, spacing h = 2L/n and grid
coordinates x_i = -L + i*h.  The momentum lattice is k = (pi/L)*m with
integer m in {-n/2, ..., n/2 - 1} per axis.

Forward transform and inverse:

    fhat(k) = h^3 * sum_x f(x) exp(-i k.x)
    f(x)    = (2L)^-3 * sum_k fhat(k) exp(+i k.x)

The grid inner product is <f, g> = h^3 * sum_x f(x) g(x), and Parseval
reads <f, g> = (2L)^-3 * sum_k fhat(k) conj(ghat(k)).

Under this pairing the free field with covariance [2(m0^2 - Lap)]^-1 has
independent spectral modes of variance (2L)^3 / (2(|k|^2 + m0^2)), so the
pointwise field variance is (2L)^-3 * sum_k 1/(2(|k|^2 + m0^2)).  Every
renormalization constant and Monte Carlo oracle in the package is stated
relative to this convention.

Spectral multipliers are sampled from continuum symbols at the lattice
momenta (not discrete-Laplacian symbols), so smooth cutoff supports are
preserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "GridSpec",
    "Field",
    "SpectralField",
    "GridMismatchError",
    "HermitianSymmetryError",
    "transform",
    "inverse_transform",
    "apply_symbol",
    "delta_field",
    "point_evaluator",
]


class GridMismatchError(ValueError):
    """Two fields live on different grids."""


class HermitianSymmetryError(ValueError):
    """Spectral data is not Hermitian-symmetric within tolerance."""


@dataclass(frozen=True)
class GridSpec:
    """Cubic periodic grid on [-L, L)^3 with n points per axis (n even, >= 8)."""

    n: int
    L: float

    def __post_init__(self):
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError(f"n must be even and >= 8, got {self.n}")
        if self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def rshape(self) -> tuple[int, int, int]:
        """Shape of the rfftn half-spectrum."""
        return (self.n, self.n, self.n // 2 + 1)

    @property
    def volume(self) -> float:
        return (2.0 * self.L) ** 3

    @cached_property
    def axis(self) -> np.ndarray:
        """Grid coordinates along one axis, x_i = -L + i*h."""
        return -self.L + self.spacing * np.arange(self.n)

    @cached_property
    def radius2(self) -> np.ndarray:
        """|x|^2 in centered box coordinates (no periodic wrap)."""
        x = self.axis
        return (x[:, None, None] ** 2 + x[None, :, None] ** 2
                + x[None, None, :] ** 2)

    @cached_property
    def k_axis(self) -> np.ndarray:
        """Momenta along a full axis in fftfreq order."""
        return (np.pi / self.L) * np.fft.fftfreq(self.n, d=1.0 / self.n)

    @cached_property
    def k_axis_half(self) -> np.ndarray:
        return (np.pi / self.L) * np.fft.rfftfreq(self.n, d=1.0 / self.n)

    @cached_property
    def k2(self) -> np.ndarray:
        """|k|^2 on the rfftn half-spectrum."""
        kx = self.k_axis
        kz = self.k_axis_half
        return (kx[:, None, None] ** 2 + kx[None, :, None] ** 2
                + kz[None, None, :] ** 2)

    @cached_property
    def k2_full(self) -> np.ndarray:
        kx = self.k_axis
        return (kx[:, None, None] ** 2 + kx[None, :, None] ** 2
                + kx[None, None, :] ** 2)

    @cached_property
    def kmag(self) -> np.ndarray:
        return np.sqrt(self.k2)

    @property
    def kmax(self) -> float:
        """Largest |k| on the lattice (corner of the Brillouin cube)."""
        return np.sqrt(3.0) * (np.pi / self.L) * (self.n // 2)

    @cached_property
    def half_weights(self) -> np.ndarray:
        """Multiplicity of each half-spectrum mode in full-lattice sums.

        Modes with 0 < k_z < Nyquist represent a conjugate pair.
        """
        w = np.full(self.rshape, 2.0)
        w[:, :, 0] = 1.0
        w[:, :, -1] = 1.0
        return w

    @cached_property
    def centering_phase(self) -> np.ndarray:
        """(-1)^(mx+my+mz) on the half-spectrum.

        exp(-i k . (-L)) = (-1)^m per axis maps index-origin DFTs to the
        centered-box convention.
        """
        s = (-1.0) ** np.arange(self.n)
        sh = (-1.0) ** np.arange(self.n // 2 + 1)
        return s[:, None, None] * s[None, :, None] * sh[None, None, :]

    @cached_property
    def centering_phase_full(self) -> np.ndarray:
        s = (-1.0) ** np.arange(self.n)
        return s[:, None, None] * s[None, :, None] * s[None, None, :]

    def symbol(self, fn) -> np.ndarray:
        """Tabulate a symbol m(|k|^2) on the half-spectrum."""
        out = np.asarray(fn(self.k2), dtype=float)
        if not np.all(np.isfinite(out)):
            raise ValueError("symbol is not finite on the momentum lattice")
        return out

    def radial_symbol(self, fn) -> np.ndarray:
        """Tabulate a radial symbol m(|k|) on the half-spectrum."""
        out = np.asarray(fn(self.kmag), dtype=float)
        if not np.all(np.isfinite(out)):
            raise ValueError("symbol is not finite on the momentum lattice")
        return out

    def index_of(self, point, tol: float = 1e-9) -> tuple[int, int, int]:
        """Grid index of a physical point; raises if the point is off-grid."""
        idx = []
        for c in point:
            j = (float(c) + self.L) / self.spacing
            ji = int(round(j))
            if abs(j - ji) > tol or not (0 <= ji < self.n):
                raise ValueError(f"point {tuple(point)} is not on the grid")
            idx.append(ji)
        return tuple(idx)


@dataclass
class Field:
    """Real scalar field on a GridSpec."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise GridMismatchError(
                f"values shape {self.values.shape} != grid shape {self.grid.shape}")

    def check_finite(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains NaN/Inf")
        return self

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def __add__(self, other):
        return Field(self.grid, self.values + _vals(other, self.grid))

    def __sub__(self, other):
        return Field(self.grid, self.values - _vals(other, self.grid))

    def __mul__(self, other):
        return Field(self.grid, self.values * _vals(other, self.grid))

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)


def _vals(x, grid):
    if isinstance(x, Field):
        if x.grid != grid:
            raise GridMismatchError("fields live on different grids")
        return x.values
    return x


@dataclass
class SpectralField:
    """Complex Fourier coefficients on the full momentum cube.

    Coefficients follow the centered-box convention documented at module
    level; a field representing a real function satisfies
    coeffs(-k) = conj(coeffs(k)).
    """

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != self.grid.shape:
            raise GridMismatchError(
                f"coeffs shape {self.coeffs.shape} != grid shape {self.grid.shape}")

    def hermitian_defect(self) -> float:
        """Relative deviation from coeffs(-k) = conj(coeffs(k))."""
        c = self.coeffs
        mirror = c[_neg_index(self.grid.n)]
        scale = np.max(np.abs(c)) or 1.0
        return float(np.max(np.abs(mirror - np.conj(c))) / scale)


def _neg_index(n: int):
    idx = (-np.arange(n)) % n
    return np.ix_(idx, idx, idx)


def inner(f: Field, g: Field) -> float:
    """Grid inner product h^3 * sum f g."""
    if f.grid != g.grid:
        raise GridMismatchError("fields live on different grids")
    return float(f.grid.spacing ** 3 * np.vdot(f.values, g.values).real)


def transform(f: Field) -> SpectralField:
    """Forward transform, fhat(k) = h^3 sum_x f(x) exp(-i k.x)."""
    g = f.grid
    coeffs = g.spacing ** 3 * np.fft.fftn(f.values) * g.centering_phase_full
    return SpectralField(g, coeffs)


def inverse_transform(s: SpectralField, tol: float = 1e-10) -> Field:
    """Inverse transform; input must be Hermitian-symmetric within tol."""
    g = s.grid
    defect = s.hermitian_defect()
    if defect > tol:
        raise HermitianSymmetryError(
            f"Hermitian symmetry violated: relative defect {defect:.3e} > {tol:.1e}")
    work = s.coeffs * g.centering_phase_full / g.spacing ** 3
    vals = np.fft.ifftn(work)
    return Field(g, vals.real)


def rfft(f: Field) -> np.ndarray:
    """Half-spectrum of the raw (index-origin) DFT; internal fast path."""
    return np.fft.rfftn(f.values)


def irfft(grid: GridSpec, fhat: np.ndarray) -> Field:
    return Field(grid, np.fft.irfftn(fhat, s=grid.shape, axes=(0, 1, 2)))


def apply_symbol(f: Field, symbol: np.ndarray) -> Field:
    """Fourier multiplier: F^-1[symbol * F f].

    `symbol` is a real array on the half-spectrum (grid.rshape), typically
    built by GridSpec.symbol / radial_symbol; real symbols of |k| are even,
    so the output is real.
    """
    g = f.grid
    symbol = np.asarray(symbol)
    if symbol.shape != g.rshape:
        raise GridMismatchError(
            f"symbol shape {symbol.shape} != half-spectrum shape {g.rshape}")
    if np.iscomplexobj(symbol):
        raise ValueError("symbol must be real (even in k) to preserve realness")
    return Field(g, np.fft.irfftn(np.fft.rfftn(f.values) * symbol, s=g.shape, axes=(0, 1, 2)))


def delta_field(grid: GridSpec, point) -> Field:
    """Grid Dirac delta: spacing^-3 at `point`, 0 elsewhere.

    Satisfies <delta_field(x0), g> = g(x0) exactly under the grid inner
    product.
    """
    idx = grid.index_of(point)
    vals = np.zeros(grid.shape)
    vals[idx] = grid.spacing ** -3
    return Field(grid, vals)


def point_evaluator(grid: GridSpec, point) -> np.ndarray:
    """Complex half-spectrum weights E with f(x0) = sum Re(rfft(f) * E).

    Used to evaluate fields at a point directly from raw half-spectra in
    Monte Carlo fast paths (saves the inverse transform).
    """
    ix, iy, iz = grid.index_of(point)
    n = grid.n
    ex = np.exp(2j * np.pi * ix * np.arange(n) / n)
    ey = np.exp(2j * np.pi * iy * np.arange(n) / n)
    ez = np.exp(2j * np.pi * iz * np.arange(n // 2 + 1) / n)
    E = (ex[:, None, None] * ey[None, :, None] * ez[None, None, :])
    E *= grid.half_weights / n ** 3
    # self-conjugate planes carry no imaginary contribution for real fields
    return E


def spectral_pair(grid: GridSpec, ahat: np.ndarray, bhat: np.ndarray) -> float:
    """<a, b> from raw half-spectra: (2L)^-3 sum_k ahat conj(bhat)."""
    s = np.sum(grid.half_weights * (ahat * np.conj(bhat)).real)
    # raw DFT pairs carry h^6 relative to the documented convention:
    # h^6 * s / (2L)^3 = s * h^3 / n^3
    return float(s * grid.spacing ** 3 / grid.n ** 3)
