"""Littlewood-Paley blocks, weighted Besov norms and Bony paraproducts.

The dyadic profiles are built from a single C^inf mollified step: chi = 1
on [0, 3/4], chi = 0 on [4/3, inf), and phi(r) = chi(r/2) - chi(r), so
supp phi is contained in [3/4, 8/3] and the partition identity

    chi(r) + sum_{j>=0} phi(2^-j r) = 1

holds exactly by telescoping.  On a finite grid the last block absorbs the
spectral tail: phi_Jmax is replaced by 1 - chi - sum_{j<Jmax} phi_j on the
lattice, which makes block reconstruction exact up to rounding.  Jmax is
the smallest J with (3/4)*2^(J+1) >= |k|_max, so the absorbed tail is
itself a genuine dyadic block on every lattice momentum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Field, GridSpec, GridMismatchError, apply_symbol

__all__ = [
    "smooth_step",
    "chi_profile",
    "phi_profile",
    "DyadicPartition",
    "build_partition",
    "lp_block",
    "low_freq_sum",
    "paraproduct",
    "Weight",
    "BesovParams",
    "besov_norm",
    "weighted_lp_norm",
]


def smooth_step(u):
    """C^inf step: 0 for u <= 0, 1 for u >= 1, strictly monotone between."""
    u = np.asarray(u, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.maximum(u, 1e-300)), 0.0)
        b = np.where(1 - u > 0, np.exp(-1.0 / np.maximum(1 - u, 1e-300)), 0.0)
    return a / (a + b)


def chi_profile(r):
    """Radial low-frequency profile: 1 on [0, 3/4], 0 on [4/3, inf)."""
    r = np.asarray(r, dtype=float)
    return smooth_step((4.0 / 3.0 - r) / (4.0 / 3.0 - 3.0 / 4.0))


def phi_profile(r):
    """Radial shell profile phi(r) = chi(r/2) - chi(r), support [3/4, 8/3]."""
    r = np.asarray(r, dtype=float)
    return chi_profile(r / 2.0) - chi_profile(r)


@dataclass(frozen=True)
class Weight:
    """Polynomial spatial weight nu(x) = (1 + a |x|^2)^(-sigma/2)."""

    sigma: float
    a: float = 1.0

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("weight scale a must be positive")

    def table(self, grid: GridSpec) -> np.ndarray:
        return (1.0 + self.a * grid.radius2) ** (-self.sigma / 2.0)


@dataclass(frozen=True)
class BesovParams:
    """Parameters (s, p, r, weight) of a weighted Besov norm."""

    s: float
    p: float = 2.0
    r: float = math.inf
    weight: Weight = Weight(sigma=0.0)

    def __post_init__(self):
        if not (1 <= self.p):
            raise ValueError("p must be in [1, inf]")
        if not (1 <= self.r):
            raise ValueError("r must be in [1, inf]")


class DyadicPartition:
    """Tabulated dyadic block symbols phi_j(|k|) on a grid, j = -1..j_max."""

    def __init__(self, grid: GridSpec):
        if grid.n < 8:
            raise ValueError("grid too small to host block j=0 (need n >= 8)")
        self.grid = grid
        kmag = grid.kmag
        kmax = grid.kmax
        # smallest J with (3/4)*2^(J+1) >= kmax: the plateau of chi(2^-(J+1) r)
        # covers the whole lattice, so the tail block is a true dyadic block.
        j_max = max(1, math.ceil(math.log2(4.0 * kmax / 3.0)) - 1)
        self.j_max = j_max
        symbols = [grid.radial_symbol(chi_profile)]
        for j in range(j_max):
            symbols.append(grid.radial_symbol(lambda r, j=j: phi_profile(2.0 ** -j * r)))
        tail = 1.0 - np.sum(symbols, axis=0)
        symbols.append(tail)
        self.symbols = symbols  # index 0 <-> block -1

    def symbol(self, j: int) -> np.ndarray:
        if not (-1 <= j <= self.j_max):
            raise ValueError(f"block index {j} out of range [-1, {self.j_max}]")
        return self.symbols[j + 1]

    @property
    def indices(self) -> range:
        return range(-1, self.j_max + 1)


_partition_cache: dict[GridSpec, DyadicPartition] = {}


def build_partition(grid: GridSpec) -> DyadicPartition:
    part = _partition_cache.get(grid)
    if part is None:
        part = DyadicPartition(grid)
        _partition_cache[grid] = part
    return part


def lp_block(f: Field, j: int, part: DyadicPartition | None = None) -> Field:
    """Dyadic block: apply phi_j(|k|) (phi_-1 = chi) as a multiplier."""
    part = part or build_partition(f.grid)
    if part.grid != f.grid:
        raise GridMismatchError("partition built for a different grid")
    return apply_symbol(f, part.symbol(j))


def _all_blocks(f: Field, part: DyadicPartition) -> list[np.ndarray]:
    fhat = np.fft.rfftn(f.values)
    return [np.fft.irfftn(fhat * s, s=f.grid.shape, axes=(0, 1, 2)) for s in part.symbols]


def low_freq_sum(f: Field, j: int, part: DyadicPartition | None = None) -> Field:
    """S_j f = sum_{k < j} Delta_k f (S_-1 = 0)."""
    part = part or build_partition(f.grid)
    sym = np.zeros(f.grid.rshape)
    for k in range(-1, min(j, part.j_max + 1)):
        sym += part.symbol(k)
    return apply_symbol(f, sym)


def paraproduct(f: Field, g: Field, part: DyadicPartition | None = None):
    """Bony decomposition of the pointwise product f*g.

    Returns (lt, res, gt) with

        lt  = sum_{j>=0} (S_j f) (Delta_{j+1} g)
        res = sum_j (Delta_j f)(Delta_{j-1} + Delta_j + Delta_{j+1}) g
        gt  = paraproduct(g, f).lt

    and lt + res + gt = f*g exactly (block reconstruction is exact on the
    grid).
    """
    if f.grid != g.grid:
        raise GridMismatchError("fields live on different grids")
    part = part or build_partition(f.grid)
    jm = part.j_max
    fb = _all_blocks(f, part)
    gb = _all_blocks(g, part)
    zero = np.zeros(f.grid.shape)

    def blk(blocks, j):
        return blocks[j + 1] if -1 <= j <= jm else zero

    lt = np.zeros(f.grid.shape)
    gt = np.zeros(f.grid.shape)
    sf = np.zeros(f.grid.shape)  # running S_j f
    sg = np.zeros(f.grid.shape)
    for j in range(0, jm + 1):
        sf += blk(fb, j - 1)
        sg += blk(gb, j - 1)
        lt += sf * blk(gb, j + 1)
        gt += sg * blk(fb, j + 1)
    res = np.zeros(f.grid.shape)
    for j in range(-1, jm + 1):
        res += blk(fb, j) * (blk(gb, j - 1) + blk(gb, j) + blk(gb, j + 1))
    return Field(f.grid, lt), Field(f.grid, res), Field(f.grid, gt)


def resonant(f: Field, g: Field, part: DyadicPartition | None = None) -> Field:
    """Resonant part of the Bony decomposition."""
    return paraproduct(f, g, part)[1]


def weighted_lp_norm(values: np.ndarray, grid: GridSpec, p: float,
                     weight_table: np.ndarray | None = None) -> float:
    """L^p(nu) norm with grid measure nu(x) h^3; p = inf is the grid max."""
    a = np.abs(values)
    if math.isinf(p):
        return float(a.max())
    w = weight_table if weight_table is not None else 1.0
    return float((np.sum(a ** p * w) * grid.spacing ** 3) ** (1.0 / p))


def besov_norm(f: Field, params: BesovParams,
               part: DyadicPartition | None = None) -> float:
    """Weighted Besov norm with dyadic weights 2^(j s)."""
    part = part or build_partition(f.grid)
    wt = params.weight.table(f.grid)
    terms = []
    for j in part.indices:
        b = lp_block(f, j, part)
        terms.append(2.0 ** (j * params.s)
                     * weighted_lp_norm(b.values, f.grid, params.p, wt))
    terms = np.array(terms)
    if math.isinf(params.r):
        return float(terms.max())
    return float((terms ** params.r).sum() ** (1.0 / params.r))
