import numpy as np
import pytest

from relmirror import (
    ConstantStep,
    EpsOverMSquaredStep,
    InvalidInputError,
    RelativeStrongStep,
    SolverConfig,
    SvmInstance,
    bregman,
    gap_bound,
    generate_svm,
    iteration_budget,
    markov_tail_bound,
    mirror_descent,
    reference_from_growth_polynomial,
    stochastic_mirror_descent,
    strong_gap_bound,
    svm_reference,
)


class AbsValue:
    """f(x) = |x| in one dimension; subgradient sign(x) (0 at the kink)."""

    def objective(self, x):
        return abs(float(x[0]))

    def subgradient(self, x):
        v = float(x[0])
        return np.array([1.0 if v > 0 else (-1.0 if v < 0 else 0.0)])


class HalfSquare:
    def objective(self, x):
        return 0.5 * float(x @ x)

    def subgradient(self, x):
        return np.asarray(x, dtype=float)


EUCLID = reference_from_growth_polynomial([1.0])


def test_step_policies():
    assert ConstantStep(0.5).step_size(7) == 0.5
    assert EpsOverMSquaredStep(0.1, 2.0).step_size(3) == pytest.approx(0.025)
    rs = RelativeStrongStep(2.0)
    steps = [rs.step_size(i) for i in range(5)]
    assert steps[0] == 1.0
    assert all(a > b > 0.0 for a, b in zip(steps, steps[1:]))
    for bad in (0.0, -1.0):
        with pytest.raises(InvalidInputError):
            ConstantStep(bad)
        with pytest.raises(InvalidInputError):
            RelativeStrongStep(bad)
    with pytest.raises(InvalidInputError):
        EpsOverMSquaredStep(0.0, 1.0)


def test_solver_config_validation():
    with pytest.raises(InvalidInputError):
        SolverConfig(ConstantStep(1.0), iterations=-1)
    with pytest.raises(InvalidInputError):
        SolverConfig(ConstantStep(1.0), iterations=1, replications=0)


def test_mirror_descent_hand_simulation():
    config = SolverConfig(ConstantStep(0.5), iterations=3, record_trace=True)
    trace = mirror_descent(AbsValue(), EUCLID, np.array([2.0]), config)
    np.testing.assert_allclose(trace.points[:, 0], [2.0, 1.5, 1.0, 0.5], rtol=1e-15)
    np.testing.assert_allclose(trace.x_bar, [1.25], rtol=1e-15)
    assert trace.f_bar == pytest.approx(1.25, abs=1e-15)
    assert trace.f_best == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose(trace.final_x, [0.5], rtol=1e-15)
    assert [r.i for r in trace.rows] == [0, 1, 2, 3]
    assert trace.rows[-1].f_bar == pytest.approx(1.25, abs=1e-15)


def test_mirror_descent_k_zero():
    config = SolverConfig(ConstantStep(1.0), iterations=0, record_trace=True)
    trace = mirror_descent(AbsValue(), EUCLID, np.array([2.0]), config)
    assert trace.k == 0
    assert trace.points.shape == (1, 1)
    np.testing.assert_array_equal(trace.x_bar, [2.0])
    np.testing.assert_array_equal(trace.final_x, [2.0])
    assert trace.x_hat is None and trace.f_hat is None


def test_relative_strong_first_step():
    config = SolverConfig(RelativeStrongStep(1.0), iterations=1, record_trace=True)
    trace = mirror_descent(HalfSquare(), EUCLID, np.array([1.0, 0.0]), config)
    # t0 = 2, so x1 = x0 - 2 x0
    np.testing.assert_allclose(trace.points[1], [-1.0, 0.0], rtol=1e-15)


def test_constant_steps_give_arithmetic_mean(rng):
    config = SolverConfig(ConstantStep(0.3), iterations=25, record_trace=True)
    trace = mirror_descent(HalfSquare(), EUCLID, rng.standard_normal(3), config)
    np.testing.assert_allclose(trace.x_bar, trace.points.mean(axis=0), rtol=1e-12)


def test_average_weight_identities(rng):
    config = SolverConfig(RelativeStrongStep(0.7), iterations=40, record_trace=True)
    trace = mirror_descent(HalfSquare(), EUCLID, rng.standard_normal(2), config)
    assert trace.bar_weight_sum == pytest.approx(np.sum(trace.steps), rel=1e-12)
    k = trace.k
    assert trace.hat_weight_sum == pytest.approx(k * (k + 1) / 2.0, rel=1e-12)
    # index-weighted average gives zero weight to x^0
    expected = np.sum(np.arange(k + 1)[:, None] * trace.points, axis=0) / (k * (k + 1) / 2.0)
    np.testing.assert_allclose(trace.x_hat, expected, rtol=1e-12)


def test_gap_bound_examples():
    assert gap_bound(1.0, [0.5] * 4, 2.0) == pytest.approx(1.25, abs=1e-15)
    assert gap_bound(3.0, [0.1], 0.0) == pytest.approx(0.5 * 9.0 * 0.1, rel=1e-15)
    with pytest.raises(InvalidInputError):
        gap_bound(1.0, [], 1.0)
    with pytest.raises(InvalidInputError):
        gap_bound(1.0, [0.5, -0.5], 1.0)


def test_gap_bound_equality_on_hand_simulation():
    # the |x| run attains its bound exactly: f(xbar) - f* = 1.25 = bound
    config = SolverConfig(ConstantStep(0.5), iterations=3, record_trace=True)
    trace = mirror_descent(AbsValue(), EUCLID, np.array([2.0]), config)
    d0 = bregman(EUCLID, np.zeros(1), np.array([2.0]))
    bound = gap_bound(1.0, trace.steps, d0)
    assert trace.f_bar - 0.0 == pytest.approx(bound, abs=1e-15)


def test_iteration_budget_examples():
    assert iteration_budget(1.0, 2.0, 1.0) == 3
    assert iteration_budget(1.0, 0.0, 1.0) == 0
    assert iteration_budget(1.0, 0.5, 1.0) == 0
    with pytest.raises(InvalidInputError):
        iteration_budget(1.0, 1.0, 0.0)


def test_strong_gap_bound_examples():
    assert strong_gap_bound(1.0, 1.0, 1) == pytest.approx(1.0)
    assert strong_gap_bound(2.0, 0.5, 7) == pytest.approx(2.0)
    k = 13
    assert strong_gap_bound(1.0, 1.0, 2 * k + 1) == pytest.approx(
        strong_gap_bound(1.0, 1.0, k) * (k + 1) / (2 * k + 2)
    )
    with pytest.raises(InvalidInputError):
        strong_gap_bound(1.0, 1.0, 0)


def test_markov_tail_bound_examples():
    assert markov_tail_bound(0.05, 0.1) == pytest.approx(0.5)
    assert markov_tail_bound(0.0, 0.3) == 0.0
    assert markov_tail_bound(5.0, 1.0) == 1.0
    with pytest.raises(InvalidInputError):
        markov_tail_bound(0.1, 0.0)


def test_posthoc_bound_holds_at_every_k():
    # |x| with x* = 0 known: check the bound along the whole trace, and the
    # min-iterate variant with it
    config = SolverConfig(ConstantStep(0.25), iterations=60, record_trace=True)
    x0 = np.array([3.0])
    trace = mirror_descent(AbsValue(), EUCLID, x0, config)
    d0 = bregman(EUCLID, np.zeros(1), x0)
    for row in trace.rows:
        bound = gap_bound(1.0, trace.steps[: row.i + 1], d0)
        assert row.f_bar - 0.0 <= bound + 1e-9
        assert row.f_best - 0.0 <= bound + 1e-9


def test_stochastic_seed_determinism():
    inst = generate_svm(6, 3, 1.0, seed=5)
    ref = svm_reference(inst)
    config = SolverConfig(ConstantStep(0.05), iterations=40, seed=123, record_trace=True)
    t1 = stochastic_mirror_descent(inst, ref, np.zeros(3), config)
    t2 = stochastic_mirror_descent(inst, ref, np.zeros(3), config)
    np.testing.assert_array_equal(t1.points, t2.points)
    np.testing.assert_array_equal(t1.f_iterates, t2.f_iterates)
    assert t1.f_bar == t2.f_bar and t1.f_best == t2.f_best


def test_stochastic_single_sample_equals_deterministic():
    inst = SvmInstance([[1.0, -2.0]], [1.0], 0.5)
    ref = svm_reference(inst)
    config = SolverConfig(ConstantStep(0.1), iterations=30, seed=9, record_trace=True)
    stoch = stochastic_mirror_descent(inst, ref, np.zeros(2), config)
    det = mirror_descent(inst, ref, np.zeros(2), config)
    np.testing.assert_array_equal(stoch.points, det.points)


def test_replications_are_independent_and_reproducible():
    inst = generate_svm(8, 3, 1.0, seed=2)
    ref = svm_reference(inst)
    config = SolverConfig(ConstantStep(0.05), iterations=25, seed=7, replications=4)
    traces = stochastic_mirror_descent(inst, ref, np.zeros(3), config)
    assert len(traces) == 4
    assert [t.replication for t in traces] == [0, 1, 2, 3]
    assert len({t.f_bar for t in traces}) > 1  # streams differ
    again = stochastic_mirror_descent(inst, ref, np.zeros(3), config)
    for a, b in zip(traces, again):
        np.testing.assert_array_equal(a.f_iterates, b.f_iterates)


def test_stochastic_expectation_bound_toy():
    # mean gap over 50 replications stays within the theoretical bound plus
    # three standard errors (f* estimated by a long deterministic run)
    inst = generate_svm(10, 3, 1.0, seed=31)
    ref = svm_reference(inst)
    x0 = np.zeros(3)
    long_cfg = SolverConfig(EpsOverMSquaredStep(0.005, 1.0), iterations=20000)
    long_trace = mirror_descent(inst, ref, x0, long_cfg)
    f_star = long_trace.f_bar

    eps = 0.25
    config = SolverConfig(
        EpsOverMSquaredStep(eps, 1.0), iterations=400, seed=77, replications=50
    )
    traces = stochastic_mirror_descent(inst, ref, x0, config)
    gaps = np.array([t.f_bar - f_star for t in traces])
    d0 = bregman(ref, long_trace.x_bar, x0)
    bound = gap_bound(1.0, traces[0].steps, d0)
    stderr = gaps.std(ddof=1) / np.sqrt(len(gaps))
    assert gaps.mean() <= bound + 3.0 * stderr
