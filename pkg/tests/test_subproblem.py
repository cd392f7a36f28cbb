import numpy as np
import pytest

from relmirror import (
    InvalidInputError,
    PolyNormReference,
    bregman,
    mirror_update,
    reference_from_growth_polynomial,
    solve_ls,
)

from conftest import bisect_theta, random_growth_coeffs


def test_solve_ls_euclidean_closed_form():
    ref = reference_from_growth_polynomial([1.0])
    sol = solve_ls(np.array([2.0, -1.0]), ref)
    np.testing.assert_allclose(sol.x_new, [-2.0, 1.0], rtol=1e-15)
    assert sol.theta == pytest.approx(1.0, abs=1e-15)
    assert sol.residual <= 1e-10


def test_solve_ls_cubic_norm_case():
    # a=[0,1], c=(4,3): phi(theta) = 5 theta^2 - 1
    ref = reference_from_growth_polynomial([0.0, 1.0])
    c = np.array([4.0, 3.0])
    sol = solve_ls(c, ref)
    oracle = bisect_theta(ref.growth_coeffs, 5.0)
    assert sol.theta == pytest.approx(5.0**-0.5, abs=1e-12)
    assert abs(sol.theta - oracle) <= 1e-9
    np.testing.assert_allclose(sol.x_new, -sol.theta * c, rtol=0, atol=0)
    np.testing.assert_allclose(sol.x_new, [-1.7888543819998317, -1.3416407864998738], rtol=1e-12)


def test_solve_ls_mixed_terms():
    # a=[1,0,1], c=(3,0): phi(theta) = theta + 9 theta^3 - 1; oracle root
    # frozen from 200-halving bisection
    ref = reference_from_growth_polynomial([1.0, 0.0, 1.0])
    sol = solve_ls(np.array([3.0, 0.0]), ref)
    oracle = bisect_theta(ref.growth_coeffs, 3.0)
    assert abs(sol.theta - oracle) <= 1e-9
    assert sol.theta == pytest.approx(0.4044705542540765, abs=1e-11)
    assert sol.x_new[0] == pytest.approx(-1.2134116627622296, abs=1e-10)
    assert sol.residual <= 1e-10


def test_solve_ls_zero_c():
    ref = reference_from_growth_polynomial([0.0, 2.0, 1.0])
    sol = solve_ls(np.zeros(4), ref)
    np.testing.assert_array_equal(sol.x_new, np.zeros(4))
    assert sol.theta == 0.0
    assert sol.residual == 0.0


def test_solve_ls_rejects_nonfinite():
    ref = reference_from_growth_polynomial([1.0])
    with pytest.raises(InvalidInputError):
        solve_ls(np.array([np.nan, 1.0]), ref)


def test_optimality_residual_on_random_inputs(rng):
    # ||c + (sum_i a_i ||x||^i) x|| <= 1e-8 (1 + ||c||)
    for _ in range(1000):
        ref = PolyNormReference(tuple(random_growth_coeffs(rng)))
        dim = int(rng.integers(1, 51))
        c = rng.standard_normal(dim) * 10.0 ** rng.integers(-3, 4)
        sol = solve_ls(c, ref)
        x = sol.x_new
        grad_term = ref.growth_poly(float(np.linalg.norm(x))) * x
        res = np.linalg.norm(c + grad_term)
        assert res <= 1e-8 * (1.0 + np.linalg.norm(c))


def test_theta_matches_bisection_oracle(rng):
    for _ in range(500):
        ref = PolyNormReference(tuple(random_growth_coeffs(rng)))
        dim = int(rng.integers(1, 8))
        c = rng.standard_normal(dim) * 10.0 ** rng.integers(-2, 3)
        sol = solve_ls(c, ref)
        oracle = bisect_theta(ref.growth_coeffs, float(np.linalg.norm(c)))
        assert abs(sol.theta - oracle) <= 1e-9


def test_scale_covariance(rng):
    # solve_ls(lambda c) stays a nonnegative multiple of -c
    for _ in range(50):
        ref = PolyNormReference(tuple(random_growth_coeffs(rng)))
        c = rng.standard_normal(3)
        lam = float(rng.uniform(0.1, 10.0))
        sol = solve_ls(lam * c, ref)
        assert sol.theta >= 0.0
        np.testing.assert_allclose(sol.x_new, -(sol.theta * lam) * c, rtol=1e-12, atol=1e-15)


def test_mirror_update_euclidean_step():
    ref = reference_from_growth_polynomial([1.0])
    out = mirror_update(np.array([2.0]), np.array([1.0]), 0.5, ref)
    np.testing.assert_allclose(out, [1.5], rtol=1e-14)


def test_mirror_update_stationary_origin():
    ref = reference_from_growth_polynomial([1.0])
    out = mirror_update(np.zeros(1), np.zeros(1), 1.0, ref)
    np.testing.assert_array_equal(out, [0.0])


def test_mirror_update_zero_subgradient_fixed_point():
    ref = reference_from_growth_polynomial([0.0, 1.0])
    out = mirror_update(np.array([3.0, 4.0]), np.zeros(2), 1.0, ref)
    np.testing.assert_allclose(out, [3.0, 4.0], rtol=1e-12)


def test_mirror_update_argument_validation():
    ref = reference_from_growth_polynomial([1.0])
    with pytest.raises(InvalidInputError):
        mirror_update(np.zeros(2), np.zeros(2), 0.0, ref)
    with pytest.raises(InvalidInputError):
        mirror_update(np.zeros(2), np.zeros(3), 1.0, ref)
    with pytest.raises(InvalidInputError):
        mirror_update(np.array([np.inf, 0.0]), np.zeros(2), 1.0, ref)


def test_mirror_update_minimizes_prox_model(rng):
    # the update must beat every probe point on the linearized model
    for _ in range(50):
        ref = PolyNormReference(tuple(random_growth_coeffs(rng)))
        dim = int(rng.integers(1, 5))
        z = rng.uniform(-3, 3, dim)
        g = rng.standard_normal(dim)
        t = float(rng.uniform(0.05, 5.0))
        z_plus = mirror_update(z, g, t, ref)
        model_plus = float(g @ (z_plus - z)) + bregman(ref, z_plus, z) / t
        for _ in range(20):
            probe = rng.uniform(-5, 5, dim)
            model_probe = float(g @ (probe - z)) + bregman(ref, probe, z) / t
            assert model_plus <= model_probe + 1e-9


def test_three_point_property(rng):
    # phi(x) + D(x,z) >= phi(z+) + D(z+,z) + D(x,z+) with phi(x) = t<g, x>
    for _ in range(100):
        ref = PolyNormReference(tuple(random_growth_coeffs(rng)))
        dim = int(rng.integers(1, 5))
        z = rng.uniform(-5, 5, dim)
        g = rng.standard_normal(dim) * 10.0 ** rng.integers(-1, 2)
        t = float(rng.uniform(0.01, 10.0))
        z_plus = mirror_update(z, g, t, ref)
        rhs = t * float(g @ z_plus) + bregman(ref, z_plus, z)
        for _ in range(20):
            x = rng.uniform(-8, 8, dim)
            lhs = t * float(g @ x) + bregman(ref, x, z)
            assert lhs + 1e-9 >= rhs + bregman(ref, x, z_plus)
