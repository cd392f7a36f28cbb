"""Shared test oracles and sampling helpers.

The root-finding oracle here is deliberately independent of the package: it
evaluates the subproblem polynomial through numpy and brackets the root by
plain bisection, so it can arbitrate the solver's answers.
"""

import numpy as np
import pytest


def phi_poly(coeffs, cnorm):
    """Coefficient vector of phi(theta) = sum_i a_i ||c||^i theta^(i+1) - 1
    in numpy's highest-degree-first convention."""
    powers = [a * cnorm**i for i, a in enumerate(coeffs)]
    return np.array(list(reversed(powers)) + [-1.0])


def bisect_theta(coeffs, cnorm, halvings=200):
    """Independent bisection oracle for the subproblem root (200 halvings)."""
    if cnorm == 0.0:
        return 0.0
    poly = phi_poly(coeffs, cnorm)
    hi = min(
        (a * cnorm**i) ** (-1.0 / (i + 1)) for i, a in enumerate(coeffs) if a > 0.0
    )
    lo = 0.0
    for _ in range(halvings):
        mid = 0.5 * (lo + hi)
        if np.polyval(poly, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_theta_batch(coeff_rows, cnorms, halvings=200):
    """Vectorized bisection over many (coefficients, ||c||) cases at once."""
    coeff_rows = np.asarray(coeff_rows, dtype=float)
    cnorms = np.asarray(cnorms, dtype=float)
    n, width = coeff_rows.shape
    powers = coeff_rows * cnorms[:, None] ** np.arange(width)

    # per-case upper bound: each active term is at most 1 at the root
    with np.errstate(divide="ignore"):
        caps = np.where(
            powers > 0.0,
            powers ** (-1.0 / (np.arange(width) + 1.0)),
            np.inf,
        )
    hi = caps.min(axis=1)
    lo = np.zeros(n)

    exponents = np.arange(1, width + 1)
    for _ in range(halvings):
        mid = 0.5 * (lo + hi)
        vals = (powers * mid[:, None] ** exponents).sum(axis=1) - 1.0
        below = vals < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out[cnorms == 0.0] = 0.0
    return out


def random_growth_coeffs(rng, max_degree=6):
    """Random nonnegative growth coefficients with sparsity, at least one positive."""
    degree = int(rng.integers(0, max_degree + 1))
    coeffs = rng.uniform(0.0, 3.0, degree + 1)
    mask = rng.random(degree + 1) < 0.4
    coeffs[mask] = 0.0
    if not np.any(coeffs > 0.0):
        coeffs[int(rng.integers(0, degree + 1))] = rng.uniform(0.1, 3.0)
    return coeffs


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
