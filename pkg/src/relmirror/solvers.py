"""Deterministic and stochastic mirror descent with convergence calculators.

Both loops run ``k + 1`` updates for a configured iteration count ``k``
(iterate indices ``0..k``, one subproblem solve per index) and maintain two
running averages over the recorded iterates:

* ``x_bar``: step-weighted, ``sum_i t_i x^i / sum_i t_i``;
* ``x_hat``: index-weighted, ``2 / (k (k+1)) sum_i i x^i`` (undefined at
  ``k = 0`` since the weights vanish).

A problem passed to :func:`mirror_descent` must expose ``objective(x)`` and
``subgradient(x)``; :func:`stochastic_mirror_descent` uses
``stochastic_subgradient(x, rng)`` instead of the exact oracle.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalFailureError
from .geometry import as_vector
from .subproblem import mirror_update

__all__ = [
    "ConstantStep",
    "EpsOverMSquaredStep",
    "RelativeStrongStep",
    "SolverConfig",
    "TraceRow",
    "Trace",
    "mirror_descent",
    "stochastic_mirror_descent",
    "stochastic_replication",
    "replication_rng",
    "gap_bound",
    "iteration_budget",
    "strong_gap_bound",
    "markov_tail_bound",
]


def _require_positive(value, name):
    v = float(value)
    if not math.isfinite(v) or v <= 0.0:
        raise InvalidInputError(f"{name} must be positive, got {value}")
    return v


@dataclass(frozen=True)
class ConstantStep:
    """Fixed step size ``t`` for every iteration."""

    t: float

    def __post_init__(self):
        object.__setattr__(self, "t", _require_positive(self.t, "t"))

    def step_size(self, i):
        return self.t


@dataclass(frozen=True)
class EpsOverMSquaredStep:
    """Constant step ``eps / M^2``, the budgeted rule for an eps-accurate run."""

    eps: float
    M_or_G: float

    def __post_init__(self):
        object.__setattr__(self, "eps", _require_positive(self.eps, "eps"))
        object.__setattr__(self, "M_or_G", _require_positive(self.M_or_G, "M_or_G"))

    def step_size(self, i):
        return self.eps / (self.M_or_G * self.M_or_G)


@dataclass(frozen=True)
class RelativeStrongStep:
    """Decreasing steps ``t_i = 2 / (mu (i + 1))`` for relatively strongly convex objectives."""

    mu: float

    def __post_init__(self):
        object.__setattr__(self, "mu", _require_positive(self.mu, "mu"))

    def step_size(self, i):
        return 2.0 / (self.mu * (i + 1))


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters shared by both solvers.

    ``iterations`` is the final iterate index ``k`` (so ``k + 1`` updates are
    performed).  ``seed`` and ``replications`` only matter for the stochastic
    solver; ``record_trace`` additionally stores per-iteration rows and the
    full iterate sequence.
    """

    policy: object
    iterations: int
    seed: int = 0
    replications: int = 1
    record_trace: bool = False

    def __post_init__(self):
        if int(self.iterations) != self.iterations or self.iterations < 0:
            raise InvalidInputError(f"iterations must be an integer >= 0, got {self.iterations}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise InvalidInputError(f"replications must be an integer >= 1, got {self.replications}")
        object.__setattr__(self, "iterations", int(self.iterations))
        object.__setattr__(self, "replications", int(self.replications))


@dataclass(frozen=True)
class TraceRow:
    i: int
    t: float
    f_x: float
    f_bar: float
    f_hat: float  # None unless the index-weighted average is defined and tracked
    f_best: float


@dataclass(eq=False)
class Trace:
    """Outcome of one solver run over iterates ``0..k``."""

    k: int
    steps: np.ndarray
    f_iterates: np.ndarray
    x_bar: np.ndarray
    f_bar: float
    x_hat: np.ndarray  # None when k == 0
    f_hat: float  # None when k == 0
    f_best: float
    final_x: np.ndarray
    bar_weight_sum: float
    hat_weight_sum: float
    rows: list = None
    points: np.ndarray = None
    seed: int = None
    replication: int = None

    @property
    def step_sum(self):
        return float(np.sum(self.steps))

    @property
    def step_sq_sum(self):
        return float(np.sum(self.steps * self.steps))


def _run_loop(objective, draw, ref, x0, config, track_hat_rows):
    x = as_vector(x0, "x0")
    k = config.iterations
    policy = config.policy
    record = config.record_trace

    steps = np.empty(k + 1)
    fvals = np.empty(k + 1)
    s_bar = np.zeros_like(x)
    s_hat = np.zeros_like(x)
    t_sum = 0.0
    w_sum = 0.0
    f_best = math.inf
    rows = [] if record else None
    points = np.empty((k + 1, x.size)) if record else None
    final_x = x

    for i in range(k + 1):
        t = policy.step_size(i)
        fx = float(objective(x))
        steps[i] = t
        fvals[i] = fx
        if fx < f_best:
            f_best = fx
        t_sum += t
        s_bar += t * x
        if i:
            w_sum += i
            s_hat += i * x
        if record:
            points[i] = x
            f_bar_i = float(objective(s_bar / t_sum))
            f_hat_i = None
            if track_hat_rows and i >= 1:
                f_hat_i = float(objective(s_hat / w_sum))
            rows.append(TraceRow(i, t, fx, f_bar_i, f_hat_i, f_best))
        if i == k:
            final_x = x
        g = draw(x, i)
        try:
            x = mirror_update(x, g, t, ref)
        except NumericalFailureError as e:
            raise NumericalFailureError(
                f"subproblem failed at iteration {i}: {e}", bracket=e.bracket, iteration=i
            ) from e

    x_bar = s_bar / t_sum
    x_hat = s_hat / w_sum if k >= 1 else None
    return Trace(
        k=k,
        steps=steps,
        f_iterates=fvals,
        x_bar=x_bar,
        f_bar=float(objective(x_bar)),
        x_hat=x_hat,
        f_hat=float(objective(x_hat)) if x_hat is not None else None,
        f_best=f_best,
        final_x=final_x,
        bar_weight_sum=t_sum,
        hat_weight_sum=w_sum,
        rows=rows,
        points=points,
    )


def mirror_descent(problem, ref, x0, config):
    """Run deterministic mirror descent (exact subgradient oracle)."""
    track_hat = isinstance(config.policy, RelativeStrongStep)
    return _run_loop(
        problem.objective, lambda x, i: problem.subgradient(x), ref, x0, config, track_hat
    )


def replication_rng(seed, replication):
    """Deterministic generator for one replication of a stochastic run.

    Mixing rule: the stream is ``SeedSequence(entropy=seed,
    spawn_key=(replication,))``, so replications are mutually independent and
    reproducible from ``(seed, replication)`` alone.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(replication,)))


def stochastic_replication(problem, ref, x0, config, replication):
    """Run one replication of a stochastic configuration.

    Replications are independent given the config seed (see
    :func:`replication_rng`), so they may execute concurrently.
    """
    rng = replication_rng(config.seed, replication)
    trace = _run_loop(
        problem.objective,
        lambda x, i: problem.stochastic_subgradient(x, rng),
        ref,
        x0,
        config,
        isinstance(config.policy, RelativeStrongStep),
    )
    trace.seed = config.seed
    trace.replication = replication
    return trace


def stochastic_mirror_descent(problem, ref, x0, config):
    """Run stochastic mirror descent; bit-reproducible for a fixed seed.

    Returns a single :class:`Trace` when ``config.replications == 1`` and a
    list of traces (replication order) otherwise.
    """
    traces = [
        stochastic_replication(problem, ref, x0, config, r) for r in range(config.replications)
    ]
    return traces[0] if config.replications == 1 else traces


def gap_bound(M_or_G, steps, D0):
    """A-posteriori optimality-gap bound ``(M^2/2 sum t_i^2 + D0) / sum t_i``.

    Valid for ``f(x_bar^k) - f(x)`` (in expectation for the stochastic
    solver) whenever ``M_or_G`` certifies the objective/reference pair and
    ``D0 >= D_h(x, x0)``.
    """
    m = _require_positive(M_or_G, "M_or_G")
    ts = np.asarray(steps, dtype=float)
    if ts.size == 0:
        raise InvalidInputError("steps must be nonempty")
    if not np.all(ts > 0.0):
        raise InvalidInputError("all steps must be positive")
    d0 = float(D0)
    if d0 < 0.0:
        raise InvalidInputError(f"D0 must be >= 0, got {D0}")
    return (0.5 * m * m * float(np.sum(ts * ts)) + d0) / float(np.sum(ts))


def iteration_budget(M_or_G, D0, eps):
    """Iterations guaranteeing an eps gap with steps ``eps / M^2``:
    ``ceil(2 M^2 D0 / eps^2) - 1``, floored at 0."""
    m = _require_positive(M_or_G, "M_or_G")
    e = _require_positive(eps, "eps")
    d0 = float(D0)
    if d0 < 0.0:
        raise InvalidInputError(f"D0 must be >= 0, got {D0}")
    return max(math.ceil(2.0 * m * m * d0 / (e * e)) - 1, 0)


def strong_gap_bound(M_or_G, mu, k):
    """Gap bound ``2 M^2 / (mu (k + 1))`` at the index-weighted average."""
    m = _require_positive(M_or_G, "M_or_G")
    u = _require_positive(mu, "mu")
    if int(k) != k or k < 1:
        raise InvalidInputError(f"k must be an integer >= 1, got {k}")
    return 2.0 * m * m / (u * (k + 1))


def markov_tail_bound(gap_bound, delta):
    """Markov bound ``min(1, gap_bound / delta)`` on ``P[f(x_bar) - f* >= delta]``."""
    d = _require_positive(delta, "delta")
    g = float(gap_bound)
    if g < 0.0:
        raise InvalidInputError(f"gap_bound must be >= 0, got {gap_bound}")
    return min(1.0, g / d)
