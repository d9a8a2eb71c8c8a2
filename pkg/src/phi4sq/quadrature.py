"""Panelled Gauss-Legendre quadrature for the semigroup time integrals.

The integrands are smooth on the lattice with an exp(-mass_sq * t) tail and
transients on the scale of the fastest mode, 1/(2*omega_max).  Panels are
log-spaced from a first panel [0, t0] resolving the transient; each panel
uses Gauss-Legendre nodes, and node counts are doubled until successive
estimates agree to the requested relative tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["QuadratureSpec", "QuadratureError", "time_quadrature"]


class QuadratureError(RuntimeError):
    """Adaptive refinement failed to reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    t_max: float
    rel_tol: float = 1e-6
    t0: float = 1e-3
    growth: float = 2.0
    nodes: int = 8
    max_doublings: int = 4

    def panels(self) -> list[tuple[float, float]]:
        edges = [0.0, self.t0]
        while edges[-1] < self.t_max:
            edges.append(min(edges[-1] * self.growth, self.t_max))
        return list(zip(edges[:-1], edges[1:]))


def _panel_nodes(a: float, b: float, m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def time_quadrature(f, spec: QuadratureSpec):
    """Integrate f over [0, t_max]; f maps a time to a scalar or ndarray.

    Returns (value, info) where info records node counts and the final
    relative change between refinement levels.
    """
    panels = spec.panels()

    def estimate(m):
        total = None
        count = 0
        for a, b in panels:
            ts, ws = _panel_nodes(a, b, m)
            for t, w in zip(ts, ws):
                val = w * np.asarray(f(float(t)))
                total = val if total is None else total + val
                count += 1
        return total, count

    m = spec.nodes
    prev, n_prev = estimate(m)
    for _ in range(spec.max_doublings):
        m *= 2
        cur, n_cur = estimate(m)
        scale = float(np.max(np.abs(cur))) or 1.0
        change = float(np.max(np.abs(cur - prev))) / scale
        if change <= spec.rel_tol:
            return cur, {"nodes": n_cur, "rel_change": change,
                         "panels": len(panels), "order": m}
        prev, n_prev = cur, n_cur
    raise QuadratureError(
        f"time quadrature did not converge to rel_tol={spec.rel_tol} "
        f"(last change {change:.2e} with {n_cur} nodes)")
