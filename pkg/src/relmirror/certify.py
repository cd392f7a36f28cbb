"""Numerical certification of relative-continuity claims by region sampling.

The suprema in the underlying definitions range over all of R^n and cannot be
checked exhaustively; every check here samples independent pairs ``(x, y)``
from a user-specified bounded region (ball or box) and reports the worst
observed statistic, the claimed bound, and the verdict.  Reports are exactly
reproducible from ``(seed, n_samples, region)``.

Floating-point scales: inequality checks that subtract nearly equal reference
values use the cancellation-aware scale ``1 + |h(y)| + |h(x)|`` when turning
absolute slack into a tolerance.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ReferenceDegeneracyError
from .geometry import PolyNormReference, as_vector, bregman, h_eval

__all__ = [
    "BallSampler",
    "BoxSampler",
    "CertificationReport",
    "check_relative_continuity",
    "check_key_property",
    "check_stochastic_boundedness",
    "check_bregman_upper_bounds",
    "check_bregman_lower_bound",
    "estimate_relative_strong_convexity",
]

MIN_PAIR_SEPARATION = 1e-8


@dataclass(frozen=True)
class BallSampler:
    """Uniform sampler over a Euclidean ball (default: radius 10 at the origin)."""

    dim: int
    radius: float = 10.0
    center: tuple = None

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInputError(f"dim must be >= 1, got {self.dim}")
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise InvalidInputError(f"radius must be positive, got {self.radius}")
        if self.center is not None:
            c = as_vector(self.center, "center")
            if c.size != self.dim:
                raise InvalidInputError(f"center has dimension {c.size}, expected {self.dim}")
            object.__setattr__(self, "center", tuple(c))

    def _draw(self, rng):
        v = rng.standard_normal(self.dim)
        nrm = np.linalg.norm(v)
        while nrm == 0.0:
            v = rng.standard_normal(self.dim)
            nrm = np.linalg.norm(v)
        r = self.radius * rng.random() ** (1.0 / self.dim)
        x = (r / nrm) * v
        if self.center is not None:
            x = x + np.asarray(self.center)
        return x

    def sample_pair(self, rng):
        x = self._draw(rng)
        y = self._draw(rng)
        while np.linalg.norm(y - x) < MIN_PAIR_SEPARATION:
            y = self._draw(rng)
        return x, y

    def describe(self):
        return {
            "shape": "ball",
            "dim": self.dim,
            "radius": self.radius,
            "center": list(self.center) if self.center is not None else None,
        }


@dataclass(frozen=True)
class BoxSampler:
    """Uniform sampler over an axis-aligned box ``[lo, hi]``."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = as_vector(self.lo, "lo")
        hi = as_vector(self.hi, "hi")
        if lo.shape != hi.shape:
            raise InvalidInputError("lo and hi must have the same dimension")
        if not np.all(lo < hi):
            raise InvalidInputError("box requires lo < hi componentwise")
        object.__setattr__(self, "lo", tuple(lo))
        object.__setattr__(self, "hi", tuple(hi))

    @property
    def dim(self):
        return len(self.lo)

    def _draw(self, rng):
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return lo + (hi - lo) * rng.random(len(lo))

    def sample_pair(self, rng):
        x = self._draw(rng)
        y = self._draw(rng)
        while np.linalg.norm(y - x) < MIN_PAIR_SEPARATION:
            y = self._draw(rng)
        return x, y

    def describe(self):
        return {"shape": "box", "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True, eq=False)
class CertificationReport:
    """Outcome of one sampled check.

    ``worst_ratio`` is the extreme per-sample statistic of the check (see the
    check's docstring); ``passed`` compares it against ``bound`` at the
    reported tolerance.  ``violating_pair`` is the first ``(x, y)`` realizing
    a violation, if any.
    """

    check: str
    region: dict
    seed: int
    samples_checked: int
    worst_ratio: float
    bound: float
    tolerance: float
    passed: bool
    violating_pair: tuple = None

    def as_dict(self):
        pair = None
        if self.violating_pair is not None:
            pair = [list(map(float, self.violating_pair[0])), list(map(float, self.violating_pair[1]))]
        return {
            "check": self.check,
            "region": self.region,
            "seed": self.seed,
            "samples": self.samples_checked,
            "worst_ratio": self.worst_ratio,
            "bound": self.bound,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "violating_pair": pair,
        }


def _normalize_samples(n_samples):
    n = int(n_samples)
    if n < 1:
        raise InvalidInputError(f"n_samples must be >= 1, got {n_samples}")
    return n


def _checked_bregman(ref, y, x):
    d = bregman(ref, y, x)
    if d <= 0.0:
        raise ReferenceDegeneracyError(
            f"Bregman distance {d} is not positive for a sampled pair at distance "
            f"{np.linalg.norm(np.asarray(y) - np.asarray(x)):.3e}"
        )
    return d


def check_relative_continuity(problem, ref, M, sampler, n_samples, seed):
    """Sampled verification of the M-relative-continuity ratio bound.

    Per pair the statistic is ``||g(x)||^2 * ||y - x||^2 / (2 D_h(y, x))``,
    which the certificate claims is at most ``M^2``; the check passes when
    the worst ratio is at most ``M^2 (1 + 1e-9)``.
    """
    n = _normalize_samples(n_samples)
    rng = np.random.default_rng(seed)
    bound = float(M) ** 2
    worst = -math.inf
    worst_pair = None
    for _ in range(n):
        x, y = sampler.sample_pair(rng)
        g = np.asarray(problem.subgradient(x))
        d = _checked_bregman(ref, y, x)
        diff = y - x
        ratio = float(g @ g) * 0.5 * float(diff @ diff) / d
        if ratio > worst:
            worst = ratio
            worst_pair = (x, y)
    passed = worst <= bound * (1.0 + 1e-9)
    return CertificationReport(
        check="relative_continuity",
        region=sampler.describe(),
        seed=seed,
        samples_checked=n,
        worst_ratio=worst,
        bound=bound,
        tolerance=1e-9,
        passed=passed,
        violating_pair=None if passed else worst_pair,
    )


def check_key_property(problem, ref, M, t_values, sampler, n_samples, seed):
    """Sampled verification of ``D_h(y,x)/t + <g(x), y-x> + t M^2 / 2 >= 0``.

    The statistic is the largest normalized violation
    ``max(-value / scale)`` with ``scale = 1 + D/t + |<g, y-x>| + t M^2 / 2``;
    the check passes when it is at most 1e-9.
    """
    ts = [float(t) for t in t_values]
    if not ts or any(not math.isfinite(t) or t <= 0.0 for t in ts):
        raise InvalidInputError(f"t_values must be positive, got {t_values}")
    n = _normalize_samples(n_samples)
    rng = np.random.default_rng(seed)
    m2 = float(M) ** 2
    worst = -math.inf
    worst_pair = None
    for _ in range(n):
        x, y = sampler.sample_pair(rng)
        g = np.asarray(problem.subgradient(x))
        d = bregman(ref, y, x)
        inner = float(g @ (y - x))
        for t in ts:
            value = d / t + inner + 0.5 * t * m2
            scale = 1.0 + abs(d) / t + abs(inner) + 0.5 * t * m2
            violation = -value / scale
            if violation > worst:
                worst = violation
                worst_pair = (x, y)
    passed = worst <= 1e-9
    return CertificationReport(
        check="key_property",
        region=sampler.describe(),
        seed=seed,
        samples_checked=n,
        worst_ratio=worst,
        bound=0.0,
        tolerance=1e-9,
        passed=passed,
        violating_pair=None if passed else worst_pair,
    )


def check_stochastic_boundedness(problem, ref, G, sampler, n_samples, seed):
    """Sampled verification of the boundedness half of stochastic relative continuity.

    The conditional second moment is computed exactly by enumerating the
    oracle's index set (``problem.index_subgradients``), with no Monte Carlo
    error; the per-pair statistic and pass rule mirror
    :func:`check_relative_continuity` with ``G`` in place of ``M``.
    """
    n = _normalize_samples(n_samples)
    rng = np.random.default_rng(seed)
    bound = float(G) ** 2
    worst = -math.inf
    worst_pair = None
    for _ in range(n):
        x, y = sampler.sample_pair(rng)
        per_index = np.asarray(problem.index_subgradients(x))
        second_moment = float(np.mean(np.sum(per_index * per_index, axis=1)))
        d = _checked_bregman(ref, y, x)
        diff = y - x
        ratio = second_moment * 0.5 * float(diff @ diff) / d
        if ratio > worst:
            worst = ratio
            worst_pair = (x, y)
    passed = worst <= bound * (1.0 + 1e-9)
    return CertificationReport(
        check="stochastic_boundedness",
        region=sampler.describe(),
        seed=seed,
        samples_checked=n,
        worst_ratio=worst,
        bound=bound,
        tolerance=1e-9,
        passed=passed,
        violating_pair=None if passed else worst_pair,
    )


def estimate_relative_strong_convexity(problem, ref, sampler, n_samples, seed):
    """Sampled lower estimate of the relative strong convexity modulus.

    Returns the infimum over pairs of
    ``(f(y) - f(x) - <g(x), y-x>) / D_h(y, x)`` clamped below at zero; pairs
    with a nonpositive Bregman distance are skipped.
    """
    n = _normalize_samples(n_samples)
    rng = np.random.default_rng(seed)
    best = math.inf
    used = 0
    for _ in range(n):
        x, y = sampler.sample_pair(rng)
        d = bregman(ref, y, x)
        if d <= 0.0:
            continue
        g = np.asarray(problem.subgradient(x))
        gap = float(problem.objective(y)) - float(problem.objective(x)) - float(g @ (y - x))
        best = min(best, gap / d)
        used += 1
    if used == 0:
        raise ReferenceDegeneracyError("every sampled pair had a nonpositive Bregman distance")
    return max(0.0, best)


_UPPER_BOUND_KINDS = {
    "cubic": (0.0, 1.0),
    "quartic": (0.0, 0.0, 1.0),
}


def check_bregman_upper_bounds(ref_kind, sampler, n_samples, seed):
    """Sampled verification of the Bregman upper bounds for the pure cubic
    and quartic norm references.

    cubic (h = ||x||^3 / 3):    D_h(y,x) <= ||y-x||^2 (||y|| + 2||x||) / 3
    quartic (h = ||x||^4 / 4):  D_h(y,x) <= ||y-x||^2 (||y+x||^2 + 2||x||^2) / 4

    The statistic is the largest value of ``(D - bound) / scale`` with the
    cancellation-aware scale ``1 + |h(y)| + |h(x)|``; the check passes when
    it is at most 1e-12.
    """
    if ref_kind not in _UPPER_BOUND_KINDS:
        raise InvalidInputError(f"ref_kind must be 'cubic' or 'quartic', got {ref_kind!r}")
    ref = PolyNormReference(_UPPER_BOUND_KINDS[ref_kind])
    n = _normalize_samples(n_samples)
    rng = np.random.default_rng(seed)
    worst = -math.inf
    worst_pair = None
    for _ in range(n):
        x, y = sampler.sample_pair(rng)
        d = bregman(ref, y, x)
        diff2 = float(np.sum((y - x) ** 2))
        ny = float(np.linalg.norm(y))
        nx = float(np.linalg.norm(x))
        if ref_kind == "cubic":
            cap = diff2 * (ny + 2.0 * nx) / 3.0
        else:
            cap = diff2 * (float(np.sum((y + x) ** 2)) + 2.0 * nx * nx) / 4.0
        scale = 1.0 + abs(h_eval(ref, y)) + abs(h_eval(ref, x))
        excess = (d - cap) / scale
        if excess > worst:
            worst = excess
            worst_pair = (x, y)
    passed = worst <= 1e-12
    return CertificationReport(
        check=f"bregman_upper_{ref_kind}",
        region=sampler.describe(),
        seed=seed,
        samples_checked=n,
        worst_ratio=worst,
        bound=0.0,
        tolerance=1e-12,
        passed=passed,
        violating_pair=None if passed else worst_pair,
    )


def check_bregman_lower_bound(ref, sampler, n_samples, seed):
    """Sampled verification of the growth lower bound
    ``D_h(y,x) >= ||y-x||^2 (sum_i a_i ||x||^i) / 2`` for any reference.

    The statistic is the largest value of ``(bound - D) / scale`` with
    ``scale = 1 + |h(y)| + |h(x)|``; passes when it is at most 1e-12.
    """
    n = _normalize_samples(n_samples)
    rng = np.random.default_rng(seed)
    worst = -math.inf
    worst_pair = None
    for _ in range(n):
        x, y = sampler.sample_pair(rng)
        d = bregman(ref, y, x)
        nx = float(np.linalg.norm(x))
        floor = 0.5 * float(np.sum((y - x) ** 2)) * ref.growth_poly(nx)
        scale = 1.0 + abs(h_eval(ref, y)) + abs(h_eval(ref, x))
        deficit = (floor - d) / scale
        if deficit > worst:
            worst = deficit
            worst_pair = (x, y)
    passed = worst <= 1e-12
    return CertificationReport(
        check="bregman_lower",
        region=sampler.describe(),
        seed=seed,
        samples_checked=n,
        worst_ratio=worst,
        bound=0.0,
        tolerance=1e-12,
        passed=passed,
        violating_pair=None if passed else worst_pair,
    )
