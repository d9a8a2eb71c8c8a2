"""Approximation operators: smooth momentum cutoff and spatial localization.

The momentum cutoff applies a radial C^inf profile equal to 1 on |k| <= 2^N
and 0 on |k| >= 2^(N+1); the spatial cutoff multiplies by a radial bump
equal to 1 on |x| <= M and 0 on |x| >= 2M (centered box coordinates, no
periodic distance: the configuration constraint 2M < L keeps the bump away
from the wrap).  Both profiles are reflection symmetric, as required for
the rotation/reflection-invariance and reflection-positivity diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .grid import Field, GridSpec, GridMismatchError, apply_symbol
from .lp import smooth_step

__all__ = ["bump_profile", "CutoffPair", "low_pass", "localized_low_pass"]


def bump_profile(r):
    """Radial C^inf bump: 1 for r <= 1, 0 for r >= 2 (used for both cutoffs)."""
    r = np.asarray(r, dtype=float)
    return smooth_step(2.0 - r)


@dataclass(frozen=True)
class CutoffPair:
    """Momentum-cutoff level N and space-cutoff radius M on a grid.

    The smoothing symbol is bump(2^-N |k|); the spatial mask is
    bump(|x|/M).
    """

    grid: GridSpec
    level: int
    radius: float

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("cutoff level must be >= 0")
        if self.radius <= 0:
            raise ValueError("cutoff radius must be positive")
        if 2.0 * self.radius >= self.grid.L:
            raise ValueError(
                f"space cutoff must satisfy 2M < L, got M={self.radius}, L={self.grid.L}")

    @cached_property
    def smoothing_symbol(self) -> np.ndarray:
        return self.grid.radial_symbol(lambda r: bump_profile(2.0 ** -self.level * r))

    @cached_property
    def mask(self) -> np.ndarray:
        r = np.sqrt(self.grid.radius2)
        return bump_profile(r / self.radius)

    @property
    def plateau_edge(self) -> float:
        """Largest |k| untouched by the smoothing."""
        return 2.0 ** self.level

    @property
    def support_edge(self) -> float:
        """Smallest |k| fully suppressed."""
        return 2.0 ** (self.level + 1)

    def covers_lattice(self) -> bool:
        """True when the smoothing symbol is identically 1 on the lattice."""
        return self.grid.kmax <= self.plateau_edge


def low_pass(f: Field, cut: CutoffPair) -> Field:
    """Smooth momentum truncation: modes |k| <= 2^N pass, |k| >= 2^(N+1) die."""
    if f.grid != cut.grid:
        raise GridMismatchError("field and cutoff live on different grids")
    return apply_symbol(f, cut.smoothing_symbol)


def localized_low_pass(f: Field, cut: CutoffPair, adjoint: bool = False) -> Field:
    """Composite cutoff: mask * low_pass(f), or its grid-L2 dual.

    adjoint=False applies mask(x) * (low_pass f)(x); adjoint=True applies
    low_pass(mask * f).  The two are exact mutual adjoints under the grid
    inner product (the smoothing symbol is real and even, mask
    multiplication is self-adjoint).
    """
    if f.grid != cut.grid:
        raise GridMismatchError("field and cutoff live on different grids")
    if adjoint:
        return apply_symbol(Field(f.grid, cut.mask * f.values), cut.smoothing_symbol)
    return Field(f.grid, cut.mask * low_pass(f, cut).values)
