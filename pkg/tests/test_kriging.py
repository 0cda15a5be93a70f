import numpy as np
import pytest

from twinflight.fusion.datasets import Dataset
from twinflight.fusion.kriging import (
    FusionConfig,
    concentrated_loglik,
    correlation_matrix,
    fit_kriging,
    normalize,
    pairwise_sq_diffs,
)

FAST = FusionConfig(optimizer_budget=30, multistart_count=4)


def make_dataset(x, y, bounds, tag="test"):
    return Dataset(inputs=np.atleast_2d(x).reshape(len(y), -1),
                   outputs={"y": np.asarray(y, dtype=float)},
                   fidelity_tag=tag, bounds=bounds)


class TestFit:
    def test_constant_field_predicts_constant(self):
        ds = make_dataset(np.linspace(0, 10, 5), np.full(5, 3.0), [(0.0, 10.0)])
        model = fit_kriging(ds, FAST)
        preds = model.predict(np.linspace(0.5, 9.5, 20)[:, None])
        assert np.all(np.abs(preds - 3.0) < 1e-9)

    def test_sine_reconstruction(self):
        xs = np.linspace(0, 2 * np.pi, 8)
        ds = make_dataset(xs, np.sin(xs), [(0.0, 2 * np.pi)])
        model = fit_kriging(ds, FusionConfig())
        mids = np.linspace(0.2, 2 * np.pi - 0.2, 100)
        err = np.max(np.abs(model.predict(mids[:, None]) - np.sin(mids)))
        assert err < 0.05

    def test_interpolates_training_points(self):
        rng = np.random.default_rng(0)
        xs = np.sort(rng.uniform(0, 1, 12))
        ys = rng.normal(size=12)
        model = fit_kriging(make_dataset(xs, ys, [(0.0, 1.0)]), FAST)
        preds = model.predict(xs[:, None])
        assert np.max(np.abs(preds - ys)) < 1e-8

    def test_variance_vanishes_at_training_points_grows_far_away(self):
        xs = np.linspace(0, 1, 6)
        ys = np.sin(3 * xs)
        model = fit_kriging(make_dataset(xs, ys, [(0.0, 2.0)]), FAST)
        _, var_at = model.predict(xs[2:3, None], return_variance=True)
        _, var_far = model.predict(np.array([[1.9]]), return_variance=True)
        assert var_at < 1e-8
        assert var_far > var_at

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(5)
        xs = rng.uniform(0, 1, size=(20, 2))
        ys = np.sin(xs[:, 0] * 3) + xs[:, 1]
        ds = lambda: Dataset(inputs=xs.copy(), outputs={"y": ys.copy()},
                             fidelity_tag="d", bounds=[(0, 1), (0, 1)])
        m1 = fit_kriging(ds(), FusionConfig(rng_seed=7, optimizer_budget=30))
        m2 = fit_kriging(ds(), FusionConfig(rng_seed=7, optimizer_budget=30))
        assert np.array_equal(m1.theta, m2.theta)
        q = np.array([[0.3, 0.7], [0.9, 0.1]])
        assert np.array_equal(m1.predict(q), m2.predict(q))

    def test_multistart_beats_or_matches_trivial_start(self):
        rng = np.random.default_rng(8)
        xs = rng.uniform(0, 1, size=(25, 2))
        ys = np.cos(8 * xs[:, 0]) * xs[:, 1] ** 2
        ds = Dataset(inputs=xs, outputs={"y": ys}, fidelity_tag="d", bounds=[(0, 1), (0, 1)])
        model = fit_kriging(ds, FusionConfig(optimizer_budget=40))
        x_norm = normalize(xs, ds.bounds)
        sq = pairwise_sq_diffs(x_norm)
        ones = np.ones((len(ys), 1))
        ll_best = concentrated_loglik(sq, ones, ys, model.theta, 1e-8)
        ll_trivial = concentrated_loglik(sq, ones, ys, np.ones(2), 1e-8)
        assert ll_best >= ll_trivial - 1e-9


class TestKernel:
    def test_kernel_properties(self):
        rng = np.random.default_rng(1)
        xn = rng.uniform(0, 1, size=(10, 2))
        sq = pairwise_sq_diffs(xn)
        theta = np.array([2.0, 0.5])
        corr = correlation_matrix(sq, theta)
        assert np.allclose(np.diag(corr), 1.0)
        assert np.all(corr > 0.0) and np.all(corr <= 1.0)
        assert np.allclose(corr, corr.T)

    def test_kernel_decreases_with_distance(self):
        xn = np.array([[0.0], [0.1], [0.4], [0.9]])
        corr = correlation_matrix(pairwise_sq_diffs(xn), np.array([3.0]))
        row = corr[0]
        assert row[1] > row[2] > row[3]


class TestRobustness:
    def test_duplicate_inputs_rejected_by_dataset(self):
        xs = np.array([[0.0], [0.5], [0.5], [1.0]])
        with pytest.raises(ValueError, match="duplicate"):
            Dataset(inputs=xs, outputs={"y": np.zeros(4)}, fidelity_tag="d",
                    bounds=[(0.0, 1.0)])

    def test_near_duplicate_inputs_escalate_nugget_and_fit(self):
        # Two nearly coincident samples stress the factorization.
        xs = np.array([0.0, 0.5, 0.5 + 1e-9, 1.0])
        ys = np.array([0.0, 1.0, 1.0, 0.0])
        model = fit_kriging(make_dataset(xs, ys, [(0.0, 1.0)]), FAST)
        assert model.nugget >= 1e-8

    def test_too_few_samples_rejected(self):
        with pytest.raises(ValueError, match="samples"):
            Dataset(inputs=np.array([[0.0, 0.0]]), outputs={"y": np.zeros(1)},
                    fidelity_tag="d", bounds=[(0, 1), (0, 1)])
