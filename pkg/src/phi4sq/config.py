"""Run configuration: strict JSON parsing with echoed defaults.

Unknown keys are rejected; every physical constraint of the owning module
is re-validated at parse time with a message naming the constraint; soft
conditions (the weight-exponent window) produce warnings that are echoed
into the resolved document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

__all__ = ["ConfigError", "RunConfig", "parse_config", "SUITES"]

SUITES = ("free-field", "ou-covariance", "renorm", "wick", "stationarity",
          "oracle-compare", "symmetry", "rp", "support", "nongauss", "all")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridConfig:
    n: int = 32
    L: float = 8.0


@dataclass(frozen=True)
class ModelConfig:
    m0sq: float = 5.0
    lambda_: float = 0.5
    sigma: float = 3.1
    a: float = 1.0


@dataclass(frozen=True)
class CutoffConfig:
    M: float = 2.0
    N: int = 2
    schedule: tuple = (2, 3, 4)


@dataclass(frozen=True)
class IntegratorConfig:
    mode: str = "direct"
    dt: float = 0.002
    T: float = 4.0
    burn_in: float = 2.0
    thinning: int = 10
    guard: float = 1e6


@dataclass(frozen=True)
class McmcConfig:
    beta: float | None = None
    length: int = 20000
    burn_in: int = 2000


@dataclass(frozen=True)
class QuadConfig:
    tol: float = 1e-6
    t_max: float | None = None  # default 20 / m0sq


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig = GridConfig()
    model: ModelConfig = ModelConfig()
    cutoffs: CutoffConfig = CutoffConfig()
    integrator: IntegratorConfig = IntegratorConfig()
    mcmc: McmcConfig = McmcConfig()
    quadrature: QuadConfig = QuadConfig()
    seed: int = 1
    out_dir: str = "out"
    suite: str = "all"
    warnings: tuple = ()

    def resolved(self) -> dict:
        doc = {
            "grid": {"n": self.grid.n, "L": self.grid.L},
            "model": {"m0sq": self.model.m0sq, "lambda": self.model.lambda_,
                      "sigma": self.model.sigma, "a": self.model.a},
            "cutoffs": {"M": self.cutoffs.M, "N": self.cutoffs.N,
                        "schedule": list(self.cutoffs.schedule)},
            "integrator": {"mode": self.integrator.mode,
                           "dt": self.integrator.dt, "T": self.integrator.T,
                           "burn_in": self.integrator.burn_in,
                           "thinning": self.integrator.thinning,
                           "guard": self.integrator.guard},
            "mcmc": {"beta": self.mcmc.beta, "length": self.mcmc.length,
                     "burn_in": self.mcmc.burn_in},
            "quadrature": {"tol": self.quadrature.tol,
                           "t_max": self.t_max},
            "seed": self.seed,
            "out_dir": self.out_dir,
            "suite": self.suite,
            "warnings": list(self.warnings),
        }
        return doc

    @property
    def t_max(self) -> float:
        return (self.quadrature.t_max if self.quadrature.t_max is not None
                else 20.0 / self.model.m0sq)


def _take(section: dict, allowed: dict, where: str) -> dict:
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where!r}")
    return {allowed[k]: v for k, v in section.items()}


def parse_config(text: str) -> RunConfig:
    """Parse a JSON configuration document; see README for the schema."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"configuration is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")

    top_allowed = {"grid", "model", "cutoffs", "integrator", "mcmc",
                   "quadrature", "seed", "out_dir", "suite"}
    unknown = set(doc) - top_allowed
    if unknown:
        raise ConfigError(f"unknown top-level key(s) {sorted(unknown)}")

    grid = GridConfig(**_take(doc.get("grid", {}), {"n": "n", "L": "L"}, "grid"))
    model = ModelConfig(**_take(doc.get("model", {}),
                                {"m0sq": "m0sq", "lambda": "lambda_",
                                 "sigma": "sigma", "a": "a"}, "model"))
    cdict = _take(doc.get("cutoffs", {}),
                  {"M": "M", "N": "N", "schedule": "schedule"}, "cutoffs")
    if "schedule" in cdict:
        cdict["schedule"] = tuple(int(v) for v in cdict["schedule"])
    cutoffs = CutoffConfig(**cdict)
    integ = IntegratorConfig(**_take(doc.get("integrator", {}),
                                     {k: k for k in ("mode", "dt", "T",
                                                     "burn_in", "thinning",
                                                     "guard")}, "integrator"))
    mcmc = McmcConfig(**_take(doc.get("mcmc", {}),
                              {k: k for k in ("beta", "length", "burn_in")},
                              "mcmc"))
    quad = QuadConfig(**_take(doc.get("quadrature", {}),
                              {"tol": "tol", "t_max": "t_max"}, "quadrature"))

    warns: list[str] = []
    if grid.n < 8 or grid.n % 2:
        raise ConfigError(f"grid.n must be even and >= 8 (got {grid.n})")
    if grid.L <= 0:
        raise ConfigError("grid.L must be positive")
    if model.m0sq <= 0:
        raise ConfigError("model.m0sq must be positive")
    if model.lambda_ < 0:
        raise ConfigError(
            f"model.lambda = {model.lambda_} violates the constraint lambda >= 0")
    if model.m0sq <= 4.5:
        warns.append(f"m0sq = {model.m0sq} <= 9/2: standard weight condition "
                     "unavailable (use a < 2 m0sq / 9)")
    bound = 2.0 * model.m0sq / model.a ** 2
    if not (9.0 < model.sigma ** 2 < bound):
        warns.append(f"sigma = {model.sigma} violates 9 < sigma^2 < "
                     f"2 m0sq / a^2 = {bound:g}")
    if 2.0 * cutoffs.M >= grid.L:
        raise ConfigError(
            f"cutoffs.M = {cutoffs.M} violates the constraint 2M < L "
            f"(L = {grid.L})")
    if cutoffs.N < 0 or any(n < 0 for n in cutoffs.schedule):
        raise ConfigError("cutoff levels must be >= 0")
    if integ.mode not in ("direct", "dpd"):
        raise ConfigError(f"integrator.mode must be direct|dpd, got {integ.mode!r}")
    if integ.dt <= 0 or integ.T < 0 or integ.burn_in < 0:
        raise ConfigError("integrator times must be positive (dt) / nonnegative")
    if integ.thinning < 1:
        raise ConfigError("integrator.thinning must be >= 1")
    if mcmc.beta is not None and not (0 < mcmc.beta <= 1):
        raise ConfigError("mcmc.beta must be in (0, 1] or null for auto-tune")
    if mcmc.length <= mcmc.burn_in:
        raise ConfigError("mcmc.length must exceed mcmc.burn_in")
    if quad.tol <= 0:
        raise ConfigError("quadrature.tol must be positive")
    suite = doc.get("suite", "all")
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {SUITES}")
    seed = doc.get("seed", 1)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")

    return RunConfig(grid=grid, model=model, cutoffs=cutoffs, integrator=integ,
                     mcmc=mcmc, quadrature=quad, seed=seed,
                     out_dir=str(doc.get("out_dir", "out")), suite=suite,
                     warnings=tuple(warns))
