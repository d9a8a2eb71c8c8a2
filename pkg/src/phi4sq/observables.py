"""Test-function families for smeared observables and symmetry probes."""

from __future__ import annotations

import numpy as np

from .grid import Field, GridSpec

__all__ = ["gaussian_bump", "bump_family", "rp_family", "default_observables"]


def gaussian_bump(grid: GridSpec, center, width: float) -> Field:
    """Gaussian bump exp(-|x-c|^2 / 2 w^2) in centered box coordinates."""
    x = grid.axis
    r2 = ((x - center[0])[:, None, None] ** 2
          + (x - center[1])[None, :, None] ** 2
          + (x - center[2])[None, None, :] ** 2)
    return Field(grid, np.exp(-r2 / (2.0 * width ** 2)))


def bump_family(grid: GridSpec, positions=None, widths=(0.25, 0.5, 1.0)) -> dict:
    """Default diagnostic family: bumps at 5 positions and 3 widths."""
    L = grid.L
    d = L / 8.0
    positions = positions or [(0.0, 0.0, 0.0), (d, 0.0, 0.0), (0.0, d, 0.0),
                              (0.0, 0.0, d), (-d, -d, 0.0)]
    return {f"bump_p{i}_w{w:g}": gaussian_bump(grid, c, w)
            for i, c in enumerate(positions) for w in widths}


def rp_family(grid: GridSpec, n: int = 3, width: float = 0.6) -> list[Field]:
    """Bumps supported strictly in x1 > 0 (exact zeros on x1 <= 0)."""
    x = grid.axis
    support = x > 0
    out = []
    centers = [(grid.L / 2, 0.0, 0.0), (grid.L / 2, grid.L / 4, 0.0),
               (grid.L / 4 + width, 0.0, -grid.L / 4)][:n]
    for c in centers:
        f = gaussian_bump(grid, c, width).values.copy()
        f[~support, :, :] = 0.0
        out.append(Field(grid, f))
    return out


def default_observables(grid: GridSpec) -> dict:
    """Three smeared observables for invariance/oracle comparisons."""
    return {
        "smear_wide": gaussian_bump(grid, (0.0, 0.0, 0.0), 1.0),
        "smear_mid": gaussian_bump(grid, (grid.L / 8, 0.0, 0.0), 0.5),
        "smear_narrow": gaussian_bump(grid, (0.0, 0.0, 0.0), 0.25),
    }
