"""Grey Wolf Optimizer and the training-MAPE fitness it minimizes.

The search follows the canonical three-leader scheme: every agent makes one
move per leader (alpha, beta, delta) and lands on the mean of the three,
with the exploration control decaying linearly from 2 to 0. The position
update published alongside the Bernoulli-model papers divides a single
position by three, which would collapse the pack toward the origin
regardless of fitness; the original formulation is used instead.

Candidates that break a model precondition (gamma ~ 1, r < alpha, singular
design, non-positive response base) receive a large penalty fitness rather
than raising, keeping the search total and real-valued.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, GreycastError, OptimizationError
from .models import GAMMA_EXCLUSION, SEARCHABLE_PARAMS, make_model, validate_series

DEFAULT_BOUNDS = {
    "r": (0.05, 3.0),
    "alpha": (0.01, 1.0),
    "gamma": (-10.0, 10.0),
}
DEFAULT_POPULATION = 30
DEFAULT_ITERATIONS = 200
DEFAULT_SEED = 42
DEFAULT_PENALTY = 1e9


@dataclass(frozen=True)
class GwoConfig:
    """Run parameters for the wolf pack."""

    population: int = DEFAULT_POPULATION
    iterations: int = DEFAULT_ITERATIONS
    seed: int = DEFAULT_SEED
    penalty: float = DEFAULT_PENALTY
    bounds: dict = field(default_factory=lambda: dict(DEFAULT_BOUNDS))

    def __post_init__(self):
        if self.population < 4:
            raise ConfigurationError(
                f"population={self.population} must be >= 4 (three leaders plus followers)"
            )
        if self.iterations < 1:
            raise ConfigurationError(f"iterations={self.iterations} must be >= 1")
        for name, (lo, hi) in self.bounds.items():
            if not lo < hi:
                raise ConfigurationError(f"bounds for {name!r} are empty: ({lo}, {hi})")


@dataclass
class TracePoint:
    iteration: int
    best_fitness: float
    position: tuple[float, ...]
    control: float = 2.0


@dataclass
class GwoResult:
    position: np.ndarray
    fitness: float
    trace: list[TracePoint]
    evaluations: list[tuple[tuple[float, ...], float]]


def gwo_minimize(fn, lower, upper, cfg: GwoConfig) -> GwoResult:
    """Minimize ``fn`` over the box [lower, upper] with a seeded wolf pack.

    Deterministic for a fixed config: all random draws come from one seeded
    generator and are consumed in a fixed order before evaluations.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    dim = lower.size
    rng = np.random.default_rng(cfg.seed)
    evaluations: list[tuple[tuple[float, ...], float]] = []

    def evaluate(pos):
        f = float(fn(pos))
        evaluations.append((tuple(pos), f))
        return f

    X = rng.uniform(lower, upper, size=(cfg.population, dim))
    F = np.array([evaluate(x) for x in X])
    order = np.argsort(F, kind="stable")
    leaders = X[order[:3]].copy()
    leader_f = F[order[:3]].copy()

    trace = [TracePoint(0, float(leader_f[0]), tuple(leaders[0]))]
    for t in range(1, cfg.iterations + 1):
        a = 2.0 * (1.0 - t / cfg.iterations)
        r1 = rng.random((cfg.population, 3, dim))
        r2 = rng.random((cfg.population, 3, dim))
        A = 2.0 * a * r1 - a
        C = 2.0 * r2
        D = np.abs(C * leaders[None, :, :] - X[:, None, :])
        X = np.clip(np.mean(leaders[None, :, :] - A * D, axis=1), lower, upper)
        F = np.array([evaluate(x) for x in X])
        for i in np.argsort(F, kind="stable"):
            f = F[i]
            if f < leader_f[0]:
                leaders[2], leader_f[2] = leaders[1], leader_f[1]
                leaders[1], leader_f[1] = leaders[0], leader_f[0]
                leaders[0], leader_f[0] = X[i].copy(), f
            elif f < leader_f[1]:
                leaders[2], leader_f[2] = leaders[1], leader_f[1]
                leaders[1], leader_f[1] = X[i].copy(), f
            elif f < leader_f[2]:
                leaders[2], leader_f[2] = X[i].copy(), f
        trace.append(TracePoint(t, float(leader_f[0]), tuple(leaders[0]), control=a))

    return GwoResult(leaders[0].copy(), float(leader_f[0]), trace, evaluations)


def candidate_params(kind: str, candidate) -> dict:
    """Map a search-space vector onto the kind's free hyperparameters."""
    names = SEARCHABLE_PARAMS[kind]
    return dict(zip(names, (float(v) for v in candidate)))


def model_fitness(candidate, train, kind: str, accumulation=None,
                  penalty: float = DEFAULT_PENALTY, fixed: dict | None = None) -> float:
    """Training MAPE of the restored fit for one hyperparameter candidate.

    Any estimation or evaluation failure maps to ``penalty``, as do the hard
    constraints gamma != 1 and r >= alpha.
    """
    x = validate_series(train)
    names = [n for n in SEARCHABLE_PARAMS[kind] if not (fixed and n in fixed)]
    params = dict(fixed or {})
    params.update(zip(names, (float(v) for v in candidate)))
    extra = {}
    if accumulation is not None and kind == "ccfngbm":
        extra["accumulation"] = accumulation
    gamma = params.get("gamma")
    if gamma is not None and abs(gamma - 1.0) < GAMMA_EXCLUSION:
        return penalty
    if (kind == "ccfngbm" and accumulation in (None, "conformable")
            and params["r"] < params["alpha"]):
        return penalty
    try:
        model = make_model(kind, **params, **extra).fit(x)
        fitted = model.fitted_values()
    except GreycastError:
        return penalty
    mape = float(np.mean(np.abs(fitted[1:] - x[1:]) / x[1:]) * 100.0)
    if not np.isfinite(mape):
        return penalty
    return mape


@dataclass
class SearchOutcome:
    params: dict
    fitness: float
    trace: list[TracePoint]
    result: GwoResult


def optimize(train, kind: str, cfg: GwoConfig | None = None, accumulation=None,
             fixed: dict | None = None) -> SearchOutcome:
    """Search the kind's free hyperparameters to minimize training MAPE.

    ``fixed`` pins a subset of the searchable parameters to given values and
    removes them from the search space. Raises OptimizationError (carrying the
    trace) if no candidate was ever feasible.
    """
    cfg = cfg or GwoConfig()
    names = [n for n in SEARCHABLE_PARAMS[kind] if not (fixed and n in fixed)]
    if not names:
        raise ConfigurationError(f"model kind {kind!r} has no free hyperparameters to optimize")
    lower = [cfg.bounds[n][0] for n in names]
    upper = [cfg.bounds[n][1] for n in names]

    def fn(pos):
        return model_fitness(pos, train, kind, accumulation=accumulation,
                             penalty=cfg.penalty, fixed=fixed)

    result = gwo_minimize(fn, lower, upper, cfg)
    if result.fitness >= cfg.penalty:
        raise OptimizationError(
            f"no feasible candidate found for {kind} in {cfg.iterations} iterations",
            trace=result.trace,
        )
    params = dict(fixed or {})
    params.update(zip(names, (float(v) for v in result.position)))
    return SearchOutcome(params, result.fitness, result.trace, result)


def trace_rows(kind: str, trace, fixed: dict | None = None) -> list[dict]:
    """Flatten a convergence trace into rows for CSV export."""
    names = [n for n in SEARCHABLE_PARAMS[kind] if not (fixed and n in fixed)]
    rows = []
    for point in trace:
        row = {"iteration": point.iteration, "best_fitness": point.best_fitness}
        row.update(dict.fromkeys(("r", "alpha", "gamma"), ""))
        row.update(fixed or {})
        row.update(zip(names, point.position))
        rows.append(row)
    return rows
