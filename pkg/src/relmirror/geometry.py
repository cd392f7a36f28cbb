"""Polynomial-norm reference functions and their Bregman geometry.

A reference function is built from nonnegative growth coefficients
``a_0, ..., a_r`` as

    h(x) = sum_i  a_i / (i + 2) * ||x||_2^(i + 2)

which is convex and differentiable on R^n with gradient
``(sum_i a_i ||x||_2^i) x``.  The family is closed under the scaling and
summation combinators below, which also transport the relative-continuity
certificate ``M`` attached to each reference.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError, InvalidPolynomialError

__all__ = [
    "PolyNormReference",
    "as_vector",
    "h_eval",
    "h_grad",
    "bregman",
    "reference_from_growth_polynomial",
    "scale_reference",
    "sum_references",
]


def as_vector(x, name="x"):
    """Coerce ``x`` to a finite 1-D float array of dimension >= 1."""
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size < 1:
        raise InvalidInputError(f"{name} must be a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return v


@dataclass(frozen=True)
class PolyNormReference:
    """Reference function of polynomial-norm form with its certificate.

    Attributes
    ----------
    growth_coeffs : tuple of float
        Nonnegative coefficients ``a_0..a_r`` of the growth polynomial
        ``p(alpha) = sum_i a_i alpha^i``; at least one must be positive.
    rel_cont_constant : float
        Certificate ``M > 0``: the objective paired with this reference is
        M-relative continuous with respect to it.
    """

    growth_coeffs: tuple
    rel_cont_constant: float = 1.0

    def __post_init__(self):
        coeffs = tuple(float(a) for a in self.growth_coeffs)
        if len(coeffs) == 0:
            raise InvalidPolynomialError("growth polynomial needs at least one coefficient")
        if any(not math.isfinite(a) or a < 0.0 for a in coeffs):
            raise InvalidPolynomialError(f"growth coefficients must be finite and >= 0, got {coeffs}")
        if not any(a > 0.0 for a in coeffs):
            raise InvalidPolynomialError("all growth coefficients are zero; reference degenerates")
        m = float(self.rel_cont_constant)
        if not math.isfinite(m) or m <= 0.0:
            raise InvalidInputError(f"rel_cont_constant must be positive, got {m}")
        object.__setattr__(self, "growth_coeffs", coeffs)
        object.__setattr__(self, "rel_cont_constant", m)

    @property
    def degree(self):
        return len(self.growth_coeffs) - 1

    def growth_poly(self, radius):
        """Evaluate the growth polynomial ``sum_i a_i radius^i``."""
        s = 0.0
        for a in reversed(self.growth_coeffs):
            s = s * radius + a
        return s


def h_eval(ref, x):
    """Value of the reference function at ``x``; always >= 0."""
    v = as_vector(x)
    nrm = math.sqrt(float(v @ v))
    s = 0.0
    for i in reversed(range(len(ref.growth_coeffs))):
        s = s * nrm + ref.growth_coeffs[i] / (i + 2)
    return nrm * nrm * s


def h_grad(ref, x):
    """Gradient of the reference function, ``(sum_i a_i ||x||^i) x``."""
    v = as_vector(x)
    nrm = math.sqrt(float(v @ v))
    return ref.growth_poly(nrm) * v


def bregman(ref, y, x):
    """Bregman distance ``h(y) - h(x) - <grad h(x), y - x>``.

    Nonnegative up to floating-point cancellation near ``y == x``; exactly
    zero when ``y`` and ``x`` are identical.
    """
    yv = as_vector(y, "y")
    xv = as_vector(x, "x")
    if yv.shape != xv.shape:
        raise DimensionMismatchError(f"y has dimension {yv.size}, x has dimension {xv.size}")
    return h_eval(ref, yv) - h_eval(ref, xv) - float(h_grad(ref, xv) @ (yv - xv))


def reference_from_growth_polynomial(coeffs):
    """Build the reference certified for any objective with ``||g(x)||^2``
    bounded by the growth polynomial; the certificate is M = 1."""
    return PolyNormReference(tuple(coeffs), 1.0)


def scale_reference(ref, alpha, scale_f=False):
    """Rescale a certified pair by ``alpha > 0``.

    The reference becomes ``alpha^2 h`` (coefficients times ``alpha^2``) in
    both modes.  With ``scale_f=False`` the objective is unchanged and the
    certificate becomes ``M / alpha``; with ``scale_f=True`` the objective is
    understood to be scaled by ``alpha`` and the certificate is unchanged.
    """
    a = float(alpha)
    if not math.isfinite(a) or a <= 0.0:
        raise InvalidInputError(f"alpha must be positive, got {alpha}")
    coeffs = tuple(a * a * c for c in ref.growth_coeffs)
    m = ref.rel_cont_constant if scale_f else ref.rel_cont_constant / a
    return PolyNormReference(coeffs, m)


def _padded_sum(coeff_lists):
    width = max(len(c) for c in coeff_lists)
    out = [0.0] * width
    for coeffs in coeff_lists:
        for i, c in enumerate(coeffs):
            out[i] += c
    return tuple(out)


def sum_references(refs, weights=None, target_M=None):
    """Combine certified pairs for a sum of objectives.

    Without ``weights`` every reference must carry the same certificate M and
    the result is the coefficient-wise sum with certificate ``sqrt(n) M``.
    With ``weights`` (the positive multipliers ``alpha_j`` applied to the
    objectives) a common ``target_M > 0`` must be supplied; each reference is
    scaled by ``alpha_j^2 / beta_j^2`` with ``beta_j = target_M / M_j`` before
    summing, and the result is certified at ``sqrt(n) * target_M``.
    """
    refs = list(refs)
    if not refs:
        raise InvalidInputError("need at least one reference to sum")
    n = len(refs)
    if weights is None:
        if target_M is not None:
            raise InvalidInputError("target_M is only meaningful together with weights")
        ms = {r.rel_cont_constant for r in refs}
        if len(ms) != 1:
            raise InvalidInputError(
                f"unweighted sum requires a common certificate, got {sorted(ms)}"
            )
        coeffs = _padded_sum([r.growth_coeffs for r in refs])
        return PolyNormReference(coeffs, math.sqrt(n) * refs[0].rel_cont_constant)

    weights = [float(w) for w in weights]
    if len(weights) != n:
        raise InvalidInputError(f"{n} references but {len(weights)} weights")
    if any(not math.isfinite(w) or w <= 0.0 for w in weights):
        raise InvalidInputError("weights must be positive")
    if target_M is None:
        raise InvalidInputError("weighted sum requires target_M")
    tm = float(target_M)
    if not math.isfinite(tm) or tm <= 0.0:
        raise InvalidInputError(f"target_M must be positive, got {target_M}")

    scaled = []
    for ref, alpha in zip(refs, weights):
        beta = tm / ref.rel_cont_constant
        factor = (alpha / beta) ** 2
        scaled.append(tuple(factor * c for c in ref.growth_coeffs))
    return PolyNormReference(_padded_sum(scaled), math.sqrt(n) * tm)
