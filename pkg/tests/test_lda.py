import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affectfuse.lda import (
    TrainingError,
    discriminants,
    fit_lda,
    linear_terms,
    predict,
    weight_vector,
)


def gaussian_classes(rng, means, cov, n):
    chol = np.linalg.cholesky(cov)
    X = np.vstack([m + rng.standard_normal((n, len(m))) @ chol.T for m in means])
    y = np.repeat(np.arange(1, len(means) + 1), n)
    return X, y


def test_symmetric_two_class_boundary_at_zero():
    X = np.array([-1.1, -0.9, -1.05, -0.95, 0.9, 1.1, 0.95, 1.05])
    y = np.array([1, 1, 1, 1, 2, 2, 2, 2])
    m = fit_lda(X, y, classes=(1, 2))
    assert m.weights[0, 0] == pytest.approx(-m.weights[1, 0], rel=1e-12)
    assert m.biases[0] == pytest.approx(m.biases[1], rel=1e-12)
    g = discriminants(m, np.array([[0.0]]))[0]
    assert g[0] == pytest.approx(g[1], abs=1e-12)
    assert predict(m, np.array([[-0.01], [0.01]])).tolist() == [1, 2]


def test_boundary_midpoint_by_hand():
    # equal priors, d = 1: g1 = g2 at x = (mu1 + mu2) / 2
    rng = np.random.default_rng(0)
    X = np.concatenate([rng.normal(0.3, 1.0, 50), rng.normal(2.9, 1.0, 50)])
    y = np.repeat([1, 2], 50)
    m = fit_lda(X, y, shrinkage=0.0, classes=(1, 2))
    x_star = (m.biases[1] - m.biases[0]) / (m.weights[0, 0] - m.weights[1, 0])
    assert x_star == pytest.approx(m.means.mean(), rel=1e-12)


def test_monte_carlo_recovers_generating_parameters():
    rng = np.random.default_rng(7)
    means = [np.array([1.0, 0.0]), np.array([-1.0, 0.0])]
    X, y = gaussian_classes(rng, means, np.eye(2), 10_000)
    m = fit_lda(X, y, classes=(1, 2))
    np.testing.assert_allclose(m.means, np.vstack(means), atol=0.05)
    np.testing.assert_allclose(m.covariance, np.eye(2), atol=0.05)


def test_identical_classes_fall_back_to_priors():
    # every class holds the same points around (1, 2, 3); class 3 has one extra row
    offsets = np.array([[0.1, 0.0, 0.0], [-0.1, 0.0, 0.0], [0.0, 0.0, 0.0]])
    counts = [2, 2, 3, 2, 2, 2, 2, 2]
    X = np.vstack([np.array([1.0, 2.0, 3.0]) + offsets[:c] for c in counts])
    y = np.repeat(np.arange(1, 9), counts)
    m = fit_lda(X, y)
    np.testing.assert_allclose(m.weights, np.repeat(m.weights[:1], 8, axis=0), atol=1e-12)
    x = np.random.default_rng(1).normal(size=(5, 3))
    assert predict(m, x).tolist() == [3] * 5


def test_argmax_at_class_mean():
    rng = np.random.default_rng(2)
    centres = rng.normal(size=(8, 4)) * 10
    X, y = gaussian_classes(rng, centres, np.eye(4), 30)
    m = fit_lda(X, y)
    assert predict(m, m.means).tolist() == list(range(1, 9))


def test_bias_shift_leaves_argmax_unchanged():
    rng = np.random.default_rng(3)
    X, y = gaussian_classes(rng, rng.normal(size=(8, 3)), np.eye(3), 20)
    m = fit_lda(X, y)
    x = rng.normal(size=(50, 3))
    g = discriminants(m, x)
    assert np.array_equal(np.argmax(g + 17.5, axis=1), np.argmax(g, axis=1))


def test_model_invariants():
    rng = np.random.default_rng(4)
    cov = np.array([[2.0, 0.6, 0.1], [0.6, 1.0, 0.3], [0.1, 0.3, 0.5]])
    X, y = gaussian_classes(rng, rng.normal(size=(8, 3)), cov, 19)
    m = fit_lda(X, y)
    np.testing.assert_allclose(m.covariance, m.covariance.T, atol=1e-12)
    assert np.linalg.eigvalsh(m.covariance).min() > 0
    assert abs(m.priors.sum() - 1.0) <= 1e-12
    inv = np.linalg.inv(m.covariance)
    W = m.means @ inv
    b = -0.5 * np.sum(m.means @ inv * m.means, axis=1) + np.log(m.priors)
    np.testing.assert_allclose(m.weights, W, atol=1e-9)
    np.testing.assert_allclose(m.biases, b, atol=1e-9)


def test_regularisation_formula():
    rng = np.random.default_rng(5)
    X, y = gaussian_classes(rng, rng.normal(size=(8, 2)), np.array([[1.0, 0.8], [0.8, 1.0]]), 10)
    lam, eps = 0.3, 1e-3
    m = fit_lda(X, y, shrinkage=lam, ridge=eps)
    centered = X - m.means[y - 1]
    pooled = centered.T @ centered / (len(X) - 8)
    expected = (1 - lam) * pooled + lam * np.diag(np.diag(pooled)) + eps * np.eye(2)
    np.testing.assert_allclose(m.covariance, expected, rtol=1e-12)


def test_ridge_continuity():
    rng = np.random.default_rng(6)
    X, y = gaussian_classes(rng, rng.normal(size=(8, 4)), np.eye(4), 19)
    a = fit_lda(X, y, shrinkage=0.0, ridge=1e-8)
    b = fit_lda(X, y, shrinkage=0.0, ridge=1e-10)
    assert np.max(np.abs(a.weights - b.weights)) < 1e-6
    assert np.max(np.abs(a.biases - b.biases)) < 1e-6


def test_scaling_priors_shifts_all_discriminants_equally():
    rng = np.random.default_rng(8)
    X, y = gaussian_classes(rng, rng.normal(size=(8, 3)), np.eye(3), 10)
    m = fit_lda(X, y)
    _, b1 = linear_terms(m.means, m.covariance, m.priors)
    _, b2 = linear_terms(m.means, m.covariance, m.priors * 0.37)
    np.testing.assert_allclose(np.diff(b1), np.diff(b2), atol=1e-12)
    x = rng.normal(size=(4, 3))
    g1 = x @ m.weights.T + b1
    g2 = x @ m.weights.T + b2
    np.testing.assert_allclose(weight_vector(g1), weight_vector(g2), atol=1e-15)


def test_training_errors():
    X = np.random.default_rng(0).normal(size=(15, 2))
    y = np.array([1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 8])
    with pytest.raises(TrainingError, match=r"\[8\]"):
        fit_lda(X, y)
    with pytest.raises(TrainingError):
        fit_lda(X[:, :0], y)
    m = fit_lda(np.vstack([X, X[:1]]), np.append(y, 8))
    with pytest.raises(ValueError, match="dimension"):
        discriminants(m, np.zeros(3))


def test_weight_vector_examples():
    np.testing.assert_allclose(weight_vector(np.full(8, -3.2)), np.full(8, 1 / 8), atol=1e-15)
    g = np.zeros(8)
    g[0] = np.log(2.0)
    w = weight_vector(g)
    assert w[0] / w[1] == pytest.approx(2.0, rel=1e-15)
    big = np.array([1e308, -1e308, 0, 0, 0, 0, 0, 0])
    assert np.all(np.isfinite(weight_vector(big)))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=8, max_size=8))
def test_weight_vector_simplex_and_argmax(g):
    w = weight_vector(g)
    assert abs(w.sum() - 1.0) <= 1e-9
    assert np.all((w >= 0) & (w <= 1))
    assert w[int(np.argmax(g))] == w.max()
