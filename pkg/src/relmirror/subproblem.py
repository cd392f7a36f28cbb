"""Exact solver for the linearization subproblem over R^n.

For a polynomial-norm reference the minimizer of ``<c, x> + h(x)`` is
``x = -theta c`` where ``theta >= 0`` solves

    phi(theta) = sum_i a_i ||c||^i theta^(i+1) - 1 = 0 .

``phi`` is strictly increasing and convex on ``theta >= 0`` with
``phi(0) = -1``, so the positive root is unique.  Each term is at most 1 at
the root, which yields the bracket used to safeguard Newton's method.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError, NumericalFailureError
from .geometry import as_vector, h_grad

__all__ = ["LsSolution", "solve_ls", "mirror_update"]

ROOT_TOL = 1e-12
MAX_ROOT_ITER = 200


@dataclass(frozen=True, eq=False)
class LsSolution:
    """Minimizer of the linearization subproblem: ``x_new = -theta * c``."""

    x_new: np.ndarray
    theta: float
    residual: float


def _phi_and_deriv(powers, theta):
    """Evaluate ``phi(theta)`` and its derivative by a joint Horner pass.

    ``powers[i] = a_i ||c||^i``; phi(theta) = theta * P(theta) - 1 with
    P(theta) = sum_i powers[i] theta^i.
    """
    p = 0.0
    dp = 0.0
    for b in reversed(powers):
        dp = dp * theta + p
        p = p * theta + b
    return theta * p - 1.0, p + theta * dp


def solve_ls(c, ref):
    """Global minimizer of ``<c, x> + h(x)`` over R^n.

    Returns an :class:`LsSolution`; the reported residual is ``|phi(theta)|``
    and is at most 1e-10 on success.  Raises
    :class:`~relmirror.errors.NumericalFailureError` (carrying the best
    bracket) if the safeguarded Newton iteration fails to converge, which is
    unreachable for valid inputs.
    """
    cv = as_vector(c, "c")
    cnorm = math.sqrt(float(cv @ cv))
    if cnorm == 0.0:
        return LsSolution(np.zeros_like(cv), 0.0, 0.0)

    coeffs = ref.growth_coeffs
    powers = [a * cnorm**i for i, a in enumerate(coeffs)]
    active = [i for i, a in enumerate(coeffs) if a > 0.0]

    if len(active) == 1:
        # one-term cases have a closed form
        i = active[0]
        theta = powers[i] ** (-1.0 / (i + 1))
    else:
        hi = min(powers[i] ** (-1.0 / (i + 1)) for i in active)
        lo = 0.0
        theta = hi
        converged = False
        for _ in range(MAX_ROOT_ITER):
            val, deriv = _phi_and_deriv(powers, theta)
            if abs(val) <= ROOT_TOL:
                converged = True
                break
            if val < 0.0:
                lo = theta
            else:
                hi = theta
            step_ok = deriv > 0.0
            if step_ok:
                cand = theta - val / deriv
                step_ok = lo < cand < hi
            theta = cand if step_ok else 0.5 * (lo + hi)
        if not converged:
            raise NumericalFailureError(
                f"root of the subproblem polynomial did not converge within {MAX_ROOT_ITER} iterations",
                bracket=(lo, hi),
                iteration=MAX_ROOT_ITER,
            )

    residual = abs(_phi_and_deriv(powers, theta)[0])
    return LsSolution(-theta * cv, theta, residual)


def mirror_update(x_cur, g, t, ref):
    """One mirror descent update from ``x_cur`` along subgradient ``g``.

    Solves ``argmin_x <g, x - x_cur> + (1/t) D_h(x, x_cur)`` exactly by
    reducing it to the linearization subproblem with
    ``c = t g - grad h(x_cur)``.
    """
    if not (isinstance(t, (int, float)) and math.isfinite(t) and t > 0.0):
        raise InvalidInputError(f"step size must be a positive finite number, got {t}")
    xv = as_vector(x_cur, "x_cur")
    gv = as_vector(g, "g")
    if xv.shape != gv.shape:
        raise DimensionMismatchError(f"x_cur has dimension {xv.size}, g has dimension {gv.size}")
    c = t * gv - h_grad(ref, xv)
    return solve_ls(c, ref).x_new
