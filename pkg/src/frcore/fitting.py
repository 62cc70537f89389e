"""Adjust potential parameters so computed levels match experimental energies.

Two kinds of models are supported through :class:`AtomModel`:

* the Klapisch model potential (with spin-orbit), free parameters named
  ``l0.alpha1`` ... ``l2.rc`` and ``alpha_d``;
* the pseudopotential with core polarization, free parameters ``rho_s``,
  ``rho_p``, ``rho_d`` (cutoff radii) and ``alpha_d``.

The objective is the sum of squared residuals in cm^-1, minimized with a
bounded Nelder-Mead simplex that is restarted around the incumbent until a
restart stops improving it.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .grid import RadialGrid, build_grid
from .potentials import (
    CorePolarizationParams,
    ModelPotentialParams,
    PseudoPotentialParams,
    compose_effective_potential,
)
from .solver import SolverError, solve_bound_state
from .units import HARTREE_TO_CM

log = logging.getLogger(__name__)

L_LETTERS = "spdfghi"
MP_KEYS = ("alpha1", "alpha2", "alpha3", "rc")


def default_grid():
    return build_grid(1e-5, 250.0, 4000, "logarithmic")


@dataclass(frozen=True)
class ExperimentalLevel:
    n: int
    ell: int
    j: Optional[float]
    energy: float  # cm^-1, negative binding energy
    source_tag: str = ""

    def __post_init__(self):
        if not self.n > self.ell >= 0:
            raise ValueError(f"need n > l >= 0, got n={self.n}, l={self.ell}")
        if not self.energy < 0:
            raise ValueError(f"binding energy must be negative, got {self.energy}")
        if self.j is not None and abs(abs(self.j - self.ell) - 0.5) > 1e-12:
            raise ValueError(f"j={self.j} incompatible with l={self.ell}")


class ResidualError(RuntimeError):
    def __init__(self, level, err):
        super().__init__(f"level n={level.n} l={level.ell} j={level.j}: {err}")
        self.level = level


class FitEvaluationError(RuntimeError):
    def __init__(self, parameters, err):
        super().__init__(f"objective failed at {parameters}: {err}")
        self.parameters = parameters


@dataclass(frozen=True)
class AtomModel:
    """A potential model whose parameters can be read and replaced by name."""

    model: Optional[ModelPotentialParams] = None
    pseudo: Optional[PseudoPotentialParams] = None
    cpp: Optional[CorePolarizationParams] = None

    def __post_init__(self):
        if (self.model is None) == (self.pseudo is None):
            raise ValueError("exactly one of model / pseudo must be given")
        if self.cpp is not None and self.pseudo is None:
            raise ValueError("core polarization goes with the pseudopotential")

    @property
    def has_spin_orbit(self):
        return self.model is not None

    def potential(self, ell, j=None):
        if self.model is not None:
            return compose_effective_potential([self.model], ell, j)
        terms = [self.pseudo] + ([self.cpp] if self.cpp is not None else [])
        return compose_effective_potential(terms, ell)

    def parameters(self) -> Dict[str, float]:
        if self.model is not None:
            out = {"alpha_d": self.model.alpha_d}
            for ell, c in enumerate(self.model.channels):
                for k in MP_KEYS:
                    out[f"l{ell}.{k}"] = getattr(c, k)
            return out
        if self.cpp is None:
            return {}
        out = {"alpha_d": self.cpp.alpha_d}
        for ell, rho in enumerate(self.cpp.cutoffs):
            out[f"rho_{L_LETTERS[ell]}"] = rho
        return out

    def with_parameters(self, values: Dict[str, float]) -> "AtomModel":
        known = self.parameters()
        unknown = set(values) - set(known)
        if unknown:
            raise KeyError(f"unknown parameters {sorted(unknown)}; known: {sorted(known)}")
        if self.model is not None:
            m = self.model
            if "alpha_d" in values:
                m = ModelPotentialParams(m.Z, float(values["alpha_d"]), m.channels, m.atom)
            for name, val in values.items():
                if name == "alpha_d":
                    continue
                ell, key = name.split(".")
                m = m.replace_channel(int(ell[1:]), **{key: float(val)})
            return AtomModel(model=m)
        rhos = list(self.cpp.cutoffs)
        for name, val in values.items():
            if name.startswith("rho_"):
                rhos[L_LETTERS.index(name[4])] = float(val)
        alpha_d = float(values.get("alpha_d", self.cpp.alpha_d))
        cpp = CorePolarizationParams(alpha_d, tuple(rhos), self.cpp.label)
        return AtomModel(pseudo=self.pseudo, cpp=cpp)


def level_energy(model: AtomModel, n, ell, j, grid: RadialGrid):
    """Binding energy (Hartree) of level (n, l, j).

    ``j=None`` on a spin-orbit model returns the degeneracy-weighted mean of
    the two fine-structure components.
    """
    if model.has_spin_orbit:
        if j is None and ell > 0:
            lo = solve_bound_state(model.potential(ell, ell - 0.5), ell, ell - 0.5, n, grid).energy
            hi = solve_bound_state(model.potential(ell, ell + 0.5), ell, ell + 0.5, n, grid).energy
            return (ell * lo + (ell + 1) * hi) / (2 * ell + 1)
        jj = 0.5 if ell == 0 else j
        return solve_bound_state(model.potential(ell, jj), ell, jj, n, grid).energy
    return solve_bound_state(model.potential(ell), ell, None, n, grid).energy


def residuals(model: AtomModel, targets: Sequence[ExperimentalLevel], grid: Optional[RadialGrid] = None):
    """Computed minus experimental energy, in cm^-1, for each target."""
    grid = grid or default_grid()
    out = np.empty(len(targets))
    for i, lv in enumerate(targets):
        try:
            e = level_energy(model, lv.n, lv.ell, lv.j, grid)
        except SolverError as err:
            raise ResidualError(lv, err) from err
        out[i] = e * HARTREE_TO_CM - lv.energy
    return out


@dataclass
class FitProblem:
    model: AtomModel
    free: Sequence[str]
    targets: Sequence[ExperimentalLevel]
    bounds: Optional[Dict[str, Tuple[float, float]]] = None
    grid: Optional[RadialGrid] = None
    tolerance: float = 0.01  # rms target in cm^-1
    max_evaluations: int = 4000
    restarts: int = 4
    seed: int = 0

    def __post_init__(self):
        self.free = tuple(self.free)
        params = self.model.parameters()
        if not self.free:
            raise ValueError("free parameter mask is empty")
        missing = [k for k in self.free if k not in params]
        if missing:
            raise ValueError(f"free parameters {missing} not in model {sorted(params)}")
        if not self.targets:
            raise ValueError("no targets")
        if self.grid is None:
            self.grid = default_grid()
        bounds = dict(self.bounds or {})
        for k in self.free:
            x = params[k]
            bounds.setdefault(k, (min(0.5 * x, 1.5 * x), max(0.5 * x, 1.5 * x)))
        for k in self.free:
            lo, hi = bounds[k]
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"infeasible bounds for {k}: {bounds[k]}")
            if not lo <= params[k] <= hi:
                raise ValueError(f"initial {k}={params[k]} outside bounds {bounds[k]}")
        self.bounds = bounds


@dataclass
class FitResult:
    parameters: Dict[str, float]
    model: AtomModel
    residuals: np.ndarray
    rms: float
    iterations: int
    evaluations: int
    converged: bool
    trace: List[Tuple[int, float]] = field(default_factory=list)


def _rms(res):
    return float(np.sqrt(np.mean(np.square(res))))


def fit_parameters(problem: FitProblem) -> FitResult:
    """Minimize the squared level residuals over the free parameters."""
    base = problem.model.parameters()
    names = problem.free
    x0 = np.array([base[k] for k in names], dtype=float)
    scale = np.where(x0 != 0.0, np.abs(x0), 1.0)
    lo = np.array([problem.bounds[k][0] for k in names]) / scale
    hi = np.array([problem.bounds[k][1] for k in names]) / scale

    state = {"best_f": np.inf, "best_x": None, "best_res": None, "nfev": 0, "improvements": 0}
    trace = []

    def evaluate(z):
        z = np.clip(z, lo, hi)
        values = dict(zip(names, z * scale))
        try:
            res = residuals(problem.model.with_parameters(values), problem.targets, problem.grid)
        except (SolverError, ResidualError) as err:
            raise FitEvaluationError(values, err) from err
        f = float(np.dot(res, res))
        state["nfev"] += 1
        better = f < state["best_f"] or (
            f == state["best_f"] and tuple(z) < tuple(state["best_x"])
        )
        if better:
            if f < state["best_f"]:
                state["improvements"] += 1
            state["best_f"], state["best_x"], state["best_res"] = f, z.copy(), res
            trace.append((state["nfev"], f))
        return f

    z0 = x0 / scale
    evaluate(z0)
    target_f = len(problem.targets) * problem.tolerance**2
    rng = np.random.default_rng(problem.seed)
    if state["best_f"] > target_f:
        step = 0.05
        for attempt in range(problem.restarts + 1):
            start = state["best_x"]
            f_start = state["best_f"]
            dim = len(start)
            simplex = np.tile(start, (dim + 1, 1))
            signs = rng.choice([-1.0, 1.0], size=dim) if attempt else np.ones(dim)
            for i in range(dim):
                simplex[i + 1, i] += signs[i] * step
            simplex = np.clip(simplex, lo, hi)
            budget = problem.max_evaluations - state["nfev"]
            if budget <= dim + 1:
                break
            minimize(
                evaluate,
                start,
                method="Nelder-Mead",
                bounds=list(zip(lo, hi)),
                options={
                    "initial_simplex": simplex,
                    "xatol": 1e-10,
                    "fatol": 1e-3 * target_f,
                    "maxfev": budget,
                },
            )
            log.debug("restart %d: f=%.3e after %d evaluations", attempt, state["best_f"], state["nfev"])
            if state["best_f"] <= target_f:
                break
            if state["best_f"] >= f_start * (1.0 - 1e-9):
                step *= 0.2
                if step < 1e-7:
                    break
    values = dict(zip(names, state["best_x"] * scale))
    model = problem.model.with_parameters(values)
    res = state["best_res"]
    rms = _rms(res)
    return FitResult(
        parameters={**base, **values},
        model=model,
        residuals=res,
        rms=rms,
        iterations=state["improvements"] - 1,
        evaluations=state["nfev"],
        converged=rms <= problem.tolerance,
        trace=trace,
    )
