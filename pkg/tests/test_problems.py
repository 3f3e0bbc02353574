import numpy as np
import pytest
from sklearn.linear_model import LogisticRegression

from problems.base import SolverError, UnsupportedMetricError, initial_point
from problems.io import load_dataset, save_dataset
from problems.logistic import Regularizer, generate_problem, sigmoid
from problems.quadratic import QuadraticProblem
from problems.reference import solve_reference


def _finite_difference(f, x, h=1e-5):
    g = np.zeros_like(x)
    for t in range(x.size):
        e = np.zeros_like(x)
        e[t] = h
        g[t] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def test_zero_feature_scale_gives_zero_features():
    prob = generate_problem(p=2, n=1, J=1, sigma=0.0, rho=0.0, regularizer="convex", seed=4)
    np.testing.assert_array_equal(prob.features, np.zeros((1, 1, 2)))
    assert abs(prob.labels[0, 0]) == 1.0


def test_full_scale_dimensions_and_label_balance():
    prob = generate_problem(p=500, n=100, J=10, sigma=1.0, rho=0.01, regularizer="convex", seed=1)
    assert prob.features.shape == (100, 10, 500)
    assert 0.3 <= float(np.mean(prob.labels > 0)) <= 0.7


def test_generation_is_deterministic():
    a = generate_problem(6, 5, 4, 1.0, 0.1, "convex", seed=11)
    b = generate_problem(6, 5, 4, 1.0, 0.1, "convex", seed=11)
    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.labels, b.labels)


def test_sigmoid_is_stable_at_extremes():
    s = sigmoid(np.array([-700.0, 0.0, 700.0]))
    assert np.all(np.isfinite(s))
    assert s[1] == 0.5
    assert s[0] >= 0.0 and s[2] <= 1.0


def test_gradient_at_origin_closed_form():
    prob = generate_problem(4, 3, 5, 1.0, 0.0, "convex", seed=2)
    for i in range(3):
        expected = -(prob.labels[i] @ prob.features[i]) / (2 * 5)
        np.testing.assert_allclose(prob.local_gradient(i, np.zeros(4)), expected, atol=1e-15)


def test_nonconvex_regularizer_vanishes_at_origin():
    with_reg = generate_problem(4, 2, 3, 1.0, 0.5, "nonconvex", seed=2)
    no_reg = generate_problem(4, 2, 3, 1.0, 0.0, "nonconvex", seed=2)
    np.testing.assert_array_equal(with_reg.local_gradient(0, np.zeros(4)), no_reg.local_gradient(0, np.zeros(4)))


def test_agent_index_checked(small_problem):
    with pytest.raises(IndexError):
        small_problem.local_gradient(5, np.zeros(6))


@pytest.mark.parametrize("regularizer", ["convex", "nonconvex"])
def test_gradient_matches_finite_difference_oracle(regularizer):
    rng = np.random.default_rng(17)
    for case in range(50):
        prob = generate_problem(5, 3, 4, 1.0, rng.uniform(0.01, 1.0), regularizer, seed=case)
        i = int(rng.integers(3))
        x = rng.standard_normal(5) * 2
        g = prob.local_gradient(i, x)
        fd = _finite_difference(lambda z: prob.local_objective(i, z), x)
        assert np.linalg.norm(g - fd) <= 1e-6 * max(np.linalg.norm(g), 1.0)


def test_global_gradient_is_mean_of_local(small_problem, rng):
    x = rng.standard_normal(6)
    local = np.array([small_problem.local_gradient(i, x) for i in range(5)])
    np.testing.assert_allclose(small_problem.global_gradient(x), local.mean(axis=0), atol=1e-14)
    f_local = np.mean([small_problem.local_objective(i, x) for i in range(5)])
    assert small_problem.global_objective(x) == pytest.approx(f_local, abs=1e-14)


def test_single_agent_global_equals_local():
    prob = generate_problem(4, 1, 6, 1.0, 0.1, "convex", seed=3)
    x = np.linspace(-1, 1, 4)
    np.testing.assert_array_equal(prob.global_gradient(x), prob.local_gradient(0, x))
    assert prob.global_objective(x) == prob.local_objective(0, x)


@pytest.mark.parametrize("regularizer", ["convex", "nonconvex"])
def test_smoothness_bound_holds(regularizer):
    prob = generate_problem(6, 5, 4, 1.0, 0.1, regularizer, seed=11)
    L = prob.lipschitz_bound()
    rng = np.random.default_rng(0)
    for _ in range(1000):
        x, y = rng.standard_normal((2, 6)) * 3
        ratio = np.linalg.norm(prob.global_gradient(x) - prob.global_gradient(y)) / np.linalg.norm(x - y)
        assert ratio <= L + 1e-12


def test_strong_convexity_constant(small_problem, small_nonconvex_problem):
    assert small_problem.strong_convexity() == pytest.approx(0.1)
    assert small_nonconvex_problem.strong_convexity() == 0.0


def test_pl_inequality_holds(small_problem, small_reference):
    rng = np.random.default_rng(3)
    mu = small_problem.strong_convexity()
    for _ in range(1000):
        x = small_reference.x_star + rng.standard_normal(6) * rng.uniform(0.01, 5)
        g = small_problem.global_gradient(x)
        assert g @ g >= 2 * mu * (small_problem.global_objective(x) - small_reference.f_star) - 1e-12


def test_reference_on_quadratic():
    centers = np.array([[1.0, 2.0], [3.0, -2.0], [2.0, 0.0]])
    prob = QuadraticProblem(centers)
    sol = solve_reference(prob)
    np.testing.assert_allclose(sol.x_star, prob.optimum(), atol=1e-10)
    # f* of the average of 1/2 ||x - c_i||^2 is the spread of the centers
    assert sol.f_star == pytest.approx(prob.global_objective(prob.optimum()))


def test_reference_on_logistic(small_problem, small_reference):
    assert small_reference.gradient_norm <= 1e-10
    assert small_reference.f_star <= small_problem.global_objective(np.zeros(6))
    assert small_reference.f_star <= small_problem.global_objective(small_problem.ground_truth)
    rng = np.random.default_rng(8)
    for _ in range(10):
        assert small_reference.f_star <= small_problem.global_objective(rng.standard_normal(6))


def test_reference_matches_sklearn_oracle(small_problem, small_reference):
    n, J, p = small_problem.features.shape
    X = small_problem.features.reshape(n * J, p)
    y = small_problem.labels.reshape(n * J)
    clf = LogisticRegression(C=1.0 / (small_problem.rho * n * J), fit_intercept=False, tol=1e-12, max_iter=10000)
    clf.fit(X, y)
    np.testing.assert_allclose(small_reference.x_star, clf.coef_.ravel(), atol=1e-5)


def test_reference_rejects_nonconvex(small_nonconvex_problem):
    with pytest.raises(UnsupportedMetricError):
        solve_reference(small_nonconvex_problem)


def test_reference_iteration_cap(small_problem):
    with pytest.raises(SolverError):
        solve_reference(small_problem, tol=1e-14, max_iter=3)


def test_initial_point_shapes():
    X = initial_point(4, 3, seed=1)
    assert X.shape == (4, 3)
    assert ((0 <= X) & (X < 1)).all()
    shared = initial_point(4, 3, seed=1, shared=True)
    assert (shared == shared[0]).all()


def test_dataset_round_trip(tmp_path, small_nonconvex_problem):
    path = tmp_path / "data.bin"
    save_dataset(small_nonconvex_problem, path)
    loaded = load_dataset(path)
    np.testing.assert_array_equal(loaded.features, small_nonconvex_problem.features)
    np.testing.assert_array_equal(loaded.labels, small_nonconvex_problem.labels)
    assert loaded.regularizer == Regularizer.NONCONVEX
    assert loaded.rho == small_nonconvex_problem.rho


def test_dataset_bad_magic(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOTADATA" + bytes(40))
    with pytest.raises(ValueError):
        load_dataset(path)
