"""Statistical and deterministic checks of the limit-measure properties.

Estimators are pure folds over ensembles of fields; every statistical
check reports a value with a jackknife (or paired-difference) error and a
4-sigma pass flag.  Deterministic checks (the quartic contraction
integrals) are panelled quadratures of spectral compositions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cutoffs import CutoffPair
from .grid import Field, GridSpec, inner
from .lp import BesovParams, Weight, besov_norm, build_partition
from .ou import ModelParams
from .quadrature import QuadratureSpec, time_quadrature

__all__ = [
    "cumulants",
    "octahedral_elements",
    "apply_octahedral",
    "symmetry_test",
    "rp_gram",
    "besov_support_estimate",
    "quartic_contraction",
    "limit_contraction",
    "block_probe_values",
]


# ---------------------------------------------------------------------------
# cumulants

def _kstats(x: np.ndarray) -> dict[int, float]:
    """Unbiased k-statistics of orders 1..4."""
    n = len(x)
    m = x.mean()
    d = x - m
    m2 = np.mean(d ** 2)
    m3 = np.mean(d ** 3)
    m4 = np.mean(d ** 4)
    k1 = m
    k2 = n / (n - 1) * m2
    k3 = n ** 2 / ((n - 1) * (n - 2)) * m3
    k4 = n ** 2 * ((n + 1) * m4 - 3 * (n - 1) * m2 ** 2) \
        / ((n - 1) * (n - 2) * (n - 3))
    return {1: k1, 2: k2, 3: k3, 4: k4}


def reweighted_excess_kurtosis(values: np.ndarray, log_weights: np.ndarray,
                               blocks: int = 30) -> tuple[float, float]:
    """Fourth cumulant under a reweighted ensemble, variance-reduced.

    `values` are observable samples from a reference ensemble and
    `log_weights` the log importance weights to the target.  The estimator
    is the difference between the weighted and unweighted fourth central
    k-moments of the same samples: the unweighted term has expectation
    zero under a Gaussian reference and shares the sampling noise, so the
    difference isolates the interaction-induced cumulant (finite-sample
    biases cancel in the difference).  Returns (estimate, block-jackknife
    error).
    """
    x = np.asarray(values, float)
    lw = np.asarray(log_weights, float)
    n = len(x)
    if n < 10 * blocks:
        raise ValueError("ensemble too small for the requested block count")
    w = np.exp(lw - lw.max())

    def diff(xs, ws):
        ws = ws / ws.mean()
        m1 = np.average(xs, weights=ws)
        d = xs - m1
        k4w = np.average(d ** 4, weights=ws) \
            - 3.0 * np.average(d ** 2, weights=ws) ** 2
        d0 = xs - xs.mean()
        k40 = np.mean(d0 ** 4) - 3.0 * np.mean(d0 ** 2) ** 2
        return k4w - k40

    full = diff(x, w)
    B = n // blocks
    loo = np.empty(blocks)
    for b in range(blocks):
        sel = np.r_[0:b * B, (b + 1) * B:n]
        loo[b] = diff(x[sel], w[sel])
    err = math.sqrt((blocks - 1) / blocks * np.sum((loo - loo.mean()) ** 2))
    return float(full), float(err)


def cumulants(values: np.ndarray, order: int) -> tuple[float, float]:
    """k-statistic cumulant of the sample with a delete-one jackknife error.

    `values` are scalar observables over an ensemble (>= 100 members for
    orders above 2).
    """
    if order not in (1, 2, 3, 4):
        raise ValueError("cumulant order must be 1..4")
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < max(8, 100 if order > 2 else 8):
        raise ValueError(f"ensemble too small ({n}) for order-{order} cumulants")
    full = _kstats(x)[order]
    # delete-one estimates from power sums
    loo = np.empty(n)
    idx = np.arange(n)
    # O(n^2) is fine for the ensemble sizes used here, but power sums are
    # cheap enough to vectorize:
    p1, p2, p3, p4 = (np.sum(x ** r) for r in (1, 2, 3, 4))
    for i in range(n):
        q1, q2, q3, q4 = p1 - x[i], p2 - x[i] ** 2, p3 - x[i] ** 3, p4 - x[i] ** 4
        m = n - 1
        mu = q1 / m
        c2 = q2 / m - mu ** 2
        c3 = q3 / m - 3 * mu * q2 / m + 2 * mu ** 3
        c4 = q4 / m - 4 * mu * q3 / m + 6 * mu ** 2 * q2 / m - 3 * mu ** 4
        if order == 1:
            loo[i] = mu
        elif order == 2:
            loo[i] = m / (m - 1) * c2
        elif order == 3:
            loo[i] = m ** 2 / ((m - 1) * (m - 2)) * c3
        else:
            loo[i] = m ** 2 * ((m + 1) * c4 - 3 * (m - 1) * c2 ** 2) \
                / ((m - 1) * (m - 2) * (m - 3))
    err = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
    return float(full), float(err)


# ---------------------------------------------------------------------------
# octahedral symmetry

def octahedral_elements() -> list[tuple[tuple[int, int, int], tuple[int, int, int]]]:
    """All 48 signed axis permutations (perm, signs)."""
    from itertools import permutations, product
    return [(p, s) for p in permutations((0, 1, 2))
            for s in product((1, -1), repeat=3)]


def _invert_perm(p):
    q = [0, 0, 0]
    for i, v in enumerate(p):
        q[v] = i
    return tuple(q)


def apply_octahedral(values: np.ndarray, perm, signs) -> np.ndarray:
    """(theta f)(x) := f(theta x) with (theta x)_a = signs_a * x_{perm_a}.

    Exact on the centered periodic grid: negation maps index i to (n-i)%n.
    """
    out = values
    for axis, s in enumerate(signs):
        if s < 0:
            out = np.roll(np.flip(out, axis=axis), 1, axis=axis)
    return np.transpose(out, axes=_invert_perm(perm))


def reflect_x1(values: np.ndarray) -> np.ndarray:
    return apply_octahedral(values, (0, 1, 2), (-1, 1, 1))


@dataclass
class SymmetryReport:
    rows: list
    passed: bool


def symmetry_test(ensemble: list[Field], test_functions: dict[str, Field],
                  max_order: int = 4, elements=None,
                  n_sigma: float = 4.0) -> SymmetryReport:
    """Moment comparison under the octahedral group.

    For each group element theta, test function f and order r, the paired
    statistic mean(<f o theta, phi>^r - <f, phi>^r) is reported with its
    standard error; the test passes when every row is within n_sigma.
    Identity rows are exactly zero by construction.
    """
    elements = elements if elements is not None else octahedral_elements()
    grid = ensemble[0].grid
    h3 = grid.spacing ** 3
    stack = np.stack([f.values for f in ensemble])  # (S, n, n, n)
    rows = []
    passed = True
    for name, f in test_functions.items():
        base = h3 * np.tensordot(stack, f.values, axes=3)  # <f, phi_s>
        for perm, signs in elements:
            tf = apply_octahedral(f.values, perm, signs)
            rot = h3 * np.tensordot(stack, tf, axes=3)
            for r in range(1, max_order + 1):
                diff = rot ** r - base ** r
                mean = diff.mean()
                err = diff.std(ddof=1) / math.sqrt(len(diff))
                ok = abs(mean) <= n_sigma * err or np.allclose(diff, 0.0)
                passed = passed and ok
                rows.append({"f": name, "perm": perm, "signs": signs,
                             "order": r, "diff": float(mean),
                             "err": float(err), "pass": bool(ok)})
    return SymmetryReport(rows, passed)


# ---------------------------------------------------------------------------
# reflection positivity

def rp_gram(ensemble: list[Field], test_functions: list[Field],
            n_sigma: float = 4.0):
    """Gram matrix of reflected exponential functionals.

    M[j, k] = mean over the ensemble of exp(i <theta f_j - f_k, phi>) with
    theta the x_1-reflection; every f_j must vanish on x_1 <= 0 (checked).
    Returns (gram, min_eig, err, passed).
    """
    grid = ensemble[0].grid
    x1 = grid.axis
    half = x1 <= 0
    for f in test_functions:
        if np.max(np.abs(f.values[half, :, :])) > 0:
            raise ValueError("test function does not vanish on x1 <= 0")
    h3 = grid.spacing ** 3
    stack = np.stack([f.values for f in ensemble])
    nf = len(test_functions)
    pair_f = np.stack([h3 * np.tensordot(stack, f.values, axes=3)
                       for f in test_functions])          # (nf, S)
    pair_rf = np.stack([h3 * np.tensordot(stack, reflect_x1(f.values), axes=3)
                        for f in test_functions])
    S = stack.shape[0]
    phases = np.exp(1j * (pair_rf[:, None, :] - pair_f[None, :, :]))  # (j,k,S)
    gram = phases.mean(axis=2)
    gram = 0.5 * (gram + gram.conj().T)
    min_eig = float(np.linalg.eigvalsh(gram).min())
    # delete-one jackknife on the minimum eigenvalue
    loo = np.empty(S)
    tot = phases.sum(axis=2)
    for s in range(S):
        gs = (tot - phases[:, :, s]) / (S - 1)
        gs = 0.5 * (gs + gs.conj().T)
        loo[s] = np.linalg.eigvalsh(gs).min()
    err = math.sqrt((S - 1) / S * np.sum((loo - loo.mean()) ** 2))
    return gram, min_eig, float(err), bool(min_eig >= -n_sigma * err)


def rp_gram_gaussian(test_functions: list[Field], params: ModelParams):
    """Closed form of the Gram matrix under the free field."""
    from .ou import resolvent

    out = np.empty((len(test_functions),) * 2, dtype=complex)
    for j, fj in enumerate(test_functions):
        rfj = Field(fj.grid, reflect_x1(fj.values))
        for k, fk in enumerate(test_functions):
            gdiff = rfj - fk
            var = inner(gdiff, resolvent(gdiff, params))
            out[j, k] = math.exp(-0.5 * var)
    return 0.5 * (out + out.conj().T)


# ---------------------------------------------------------------------------
# Besov support statistic

def besov_support_estimate(ensemble: list[Field], eps: float, p: float,
                           weight: Weight) -> tuple[float, float]:
    """Mean squared Besov norm of regularity -1/2-eps with weight nu^(p/2).

    Returns (estimate, standard error); finiteness/stability across the
    cutoff schedule is the finite-level support check.
    """
    if not ensemble:
        raise ValueError("empty ensemble")
    params = BesovParams(s=-0.5 - eps, p=p, r=math.inf,
                         weight=Weight(weight.sigma * p / 2.0, weight.a))
    part = build_partition(ensemble[0].grid)
    vals = np.array([besov_norm(f, params, part) ** 2 for f in ensemble])
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


# ---------------------------------------------------------------------------
# quartic contraction (non-Gaussianity source)

def quartic_contraction(f: Field, params: ModelParams, cut: CutoffPair,
                        quad: QuadratureSpec) -> float:
    """Finite-level expectation E[<f, P Z>^3 <f, localized cubic tree>].

    Exact Gaussian-pairing identity (3! contractions):

        6 int_0^inf < mask^3 (cutoff_pair heat(t) dual_cutoff f),
                      (cov_op(t) f)^3 > dt
    """
    g = params.grid
    m = params.mass_sq
    psi = cut.smoothing_symbol
    mask = cut.mask
    omega = g.k2 + m
    fhat = np.fft.rfftn(f.values)
    mfhat = np.fft.rfftn(mask * f.values)
    h3 = g.spacing ** 3

    def integrand(t):
        heat = np.exp(-t * omega)
        vf = np.fft.irfftn(fhat * psi ** 2 * heat / (2.0 * omega), s=g.shape, axes=(0, 1, 2))
        q = mask * np.fft.irfftn(mfhat * psi ** 2 * heat, s=g.shape, axes=(0, 1, 2))
        return float(np.sum(mask ** 3 * q * vf ** 3) * h3)

    val, _ = time_quadrature(integrand, quad)
    return 6.0 * float(val)


def limit_contraction(f: Field, mass_sq: float,
                      quad: QuadratureSpec) -> float:
    """Cutoff-free contraction integral

        int_0^inf int (heat(t) resolvent f)^3 (heat(t) f) dx dt
    """
    g = f.grid
    omega = g.k2 + mass_sq
    fhat = np.fft.rfftn(f.values)
    h3 = g.spacing ** 3

    def integrand(t):
        heat = np.exp(-t * omega)
        a = np.fft.irfftn(fhat * heat / (2.0 * omega), s=g.shape, axes=(0, 1, 2))
        b = np.fft.irfftn(fhat * heat, s=g.shape, axes=(0, 1, 2))
        return float(np.sum(a ** 3 * b) * h3)

    val, _ = time_quadrature(integrand, quad)
    return float(val)


def block_probe_values(grid: GridSpec, mass_sq: float, y, j_values,
                       quad: QuadratureSpec) -> list[float]:
    """Cutoff-free contraction integral on dyadic block probes at y.

    The value is independent of y; the dyadic scaling of the sequence is
    the finite-level non-Gaussianity rate check.  The integrand of block j
    decays at rate >= 4 mass_sq + 4 (3/4 2^j)^2, so the time horizon is
    capped per block.
    """
    from .grid import delta_field
    from .lp import lp_block

    part = build_partition(grid)
    d = delta_field(grid, y)
    out = []
    for j in j_values:
        probe = lp_block(d, j, part)
        rate = 4.0 * mass_sq + 4.0 * (0.75 * 2.0 ** max(j, 0)) ** 2
        qj = QuadratureSpec(t_max=min(quad.t_max, 30.0 / rate),
                            rel_tol=quad.rel_tol, t0=quad.t0,
                            growth=quad.growth, nodes=quad.nodes,
                            max_doublings=quad.max_doublings)
        out.append(limit_contraction(probe, mass_sq, qj))
    return out
