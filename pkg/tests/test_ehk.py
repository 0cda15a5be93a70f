import numpy as np
import pytest

from twinflight.fusion.datasets import Dataset
from twinflight.fusion.ehk import ehk_predict, fit_ehk, refit_ehk_gls
from twinflight.fusion.kriging import (
    FitError,
    FusionConfig,
    correlation_matrix,
    fit_kriging,
    normalize,
    pairwise_sq_diffs,
)
from twinflight.fusion.sampling import lhs_sample

FAST = FusionConfig(optimizer_budget=30, multistart_count=4)


def dataset_1d(xs, ys, tag="d", bounds=((0.0, 1.0),)):
    return Dataset(inputs=np.asarray(xs).reshape(-1, 1),
                   outputs={"y": np.asarray(ys, dtype=float)},
                   fidelity_tag=tag, bounds=list(bounds))


def forrester_hf(x):
    return (6 * x - 2) ** 2 * np.sin(12 * x - 4)


def forrester_lf(x):
    return 0.5 * forrester_hf(x) + 10 * (x - 0.5) - 5


def dense_gls_oracle(f_lf, y, x_norm, theta, nugget):
    """Closed forms recomputed with an explicit dense inverse."""
    r = correlation_matrix(pairwise_sq_diffs(x_norm), theta)
    r = r + nugget * np.eye(len(y))
    r_inv = np.linalg.inv(r)
    rho = np.linalg.inv(f_lf.T @ r_inv @ f_lf) @ f_lf.T @ r_inv @ y
    resid = y - f_lf @ rho
    sigma2 = float(resid @ r_inv @ resid) / len(y)
    return rho, sigma2


class TestScalingRecovery:
    def test_recovers_scale_factor_two(self):
        rng = np.random.default_rng(10)
        lf_x = np.sort(rng.uniform(0, 1, 25))
        lf = dataset_1d(lf_x, np.sin(2 * np.pi * lf_x) + 1.5, tag="lf")
        lf_model = fit_kriging(lf, FAST)

        hf_x = np.linspace(0.05, 0.95, 8).reshape(-1, 1)
        hf_y = 2.0 * lf_model.predict(hf_x)
        hf = dataset_1d(hf_x.ravel(), hf_y, tag="hf")
        model = fit_ehk(hf, [lf_model], FAST)
        assert abs(model.rho[0] - 2.0) < 0.05
        assert model.sigma_d_sq < 1e-4 * np.var(hf_y)

    def test_identifies_matching_source_among_two(self):
        rng = np.random.default_rng(11)
        xs = np.sort(rng.uniform(0, 1, 30))
        good = dataset_1d(xs, np.sin(2 * np.pi * xs) + 2.0, tag="good")
        noise = dataset_1d(xs, np.cos(9 * np.pi * xs), tag="noise")
        good_model = fit_kriging(good, FAST)
        noise_model = fit_kriging(noise, FAST)

        hf_x = np.linspace(0.08, 0.92, 10).reshape(-1, 1)
        hf = dataset_1d(hf_x.ravel(), good_model.predict(hf_x), tag="hf")
        model = fit_ehk(hf, [good_model, noise_model], FAST)
        assert abs(model.rho[0] - 1.0) < 0.1
        assert abs(model.rho[1]) < 0.1


class TestInterpolation:
    def test_reproduces_hf_outputs(self):
        rng = np.random.default_rng(12)
        lf_x = np.sort(rng.uniform(0, 1, 20))
        lf_model = fit_kriging(dataset_1d(lf_x, forrester_lf(lf_x), tag="lf"), FAST)
        hf_x = np.linspace(0, 1, 6)
        hf = dataset_1d(hf_x, forrester_hf(hf_x), tag="hf")
        model = fit_ehk(hf, [lf_model], FAST)
        for x, y in zip(hf_x, hf.response("y")):
            mean, var = ehk_predict(model, np.array([x]))
            assert mean == pytest.approx(y, rel=1e-6, abs=1e-9)
            assert var < 1e-6 * max(model.sigma_d_sq, 1e-12)

    def test_far_field_reverts_to_scaled_lf_trend(self):
        lf_x = np.linspace(0, 1, 15)
        lf_model = fit_kriging(dataset_1d(lf_x, np.sin(4 * lf_x), tag="lf"), FAST)
        # HF support confined to [0, 0.3]; query far enough beyond it that
        # the fitted kernel has decayed below 1e-9.
        hf_x = np.linspace(0.0, 0.3, 5)
        hf = dataset_1d(hf_x, 1.3 * np.sin(4 * hf_x) + 0.2, tag="hf")
        model = fit_ehk(hf, [lf_model], FAST)
        decay_distance = float(np.sqrt(np.log(1e9) / model.theta_d.min()))
        far = np.array([0.3 + decay_distance])
        mean, var = ehk_predict(model, far)
        trend = float(model.rho[0]) * lf_model.predict(far.reshape(1, -1))
        assert abs(mean - trend) < 1e-6 * max(abs(mean), 1.0)
        assert var == pytest.approx(model.sigma_d_sq, rel=1e-3)


class TestClosedForms:
    def test_gls_matches_dense_oracle(self):
        rng = np.random.default_rng(13)
        xs = np.sort(rng.uniform(0, 1, 18))
        lf1 = fit_kriging(dataset_1d(xs, forrester_lf(xs), tag="a"), FAST)
        lf2 = fit_kriging(dataset_1d(xs, np.cos(3 * xs), tag="b"), FAST)
        hf_x = np.linspace(0.05, 0.95, 9)
        hf = dataset_1d(hf_x, forrester_hf(hf_x), tag="hf")
        model = fit_ehk(hf, [lf1, lf2], FAST)

        x_norm = normalize(model.hf_inputs, model.bounds)
        rho, sigma2 = dense_gls_oracle(
            model.F_lf_at_hf, model.hf_outputs, x_norm, model.theta_d, model.nugget
        )
        assert np.max(np.abs(rho - model.rho)) / max(np.max(np.abs(model.rho)), 1.0) < 1e-8
        assert sigma2 == pytest.approx(model.sigma_d_sq, rel=1e-8)


class TestFusionQuality:
    def test_forrester_benchmark_beats_lf_surrogate(self):
        rng = np.random.default_rng(14)
        lf_x = np.sort(rng.uniform(0, 1, 20))
        lf = dataset_1d(lf_x, forrester_lf(lf_x), tag="lf")
        lf_model = fit_kriging(lf, FusionConfig())
        hf_x = np.array([0.0, 0.3, 0.55, 0.8, 1.0])
        hf = dataset_1d(hf_x, forrester_hf(hf_x), tag="hf")
        model = fit_ehk(hf, [lf_model], FusionConfig())

        held = np.linspace(0, 1, 200)
        truth = forrester_hf(held)
        fused_rmse = np.sqrt(np.mean((model.predict(held[:, None]) - truth) ** 2))
        lf_rmse = np.sqrt(np.mean((lf_model.predict(held[:, None]) - truth) ** 2))
        assert fused_rmse < lf_rmse


class TestErrors:
    def test_fewer_hf_samples_than_lf_models(self):
        xs = np.linspace(0, 1, 12)
        models = [
            fit_kriging(dataset_1d(xs, np.sin(k * xs), tag=f"m{k}"), FAST)
            for k in (1, 2, 3)
        ]
        hf = dataset_1d(np.array([0.2, 0.8]), np.array([1.0, -1.0]), tag="hf")
        with pytest.raises(FitError, match="scaling factors"):
            fit_ehk(hf, models, FAST)

    def test_collinear_lf_models_named(self):
        xs = np.linspace(0, 1, 15)
        m1 = fit_kriging(dataset_1d(xs, np.sin(3 * xs), tag="a"), FAST)
        m2 = fit_kriging(dataset_1d(xs, np.sin(3 * xs), tag="b"), FAST)
        hf_x = np.linspace(0.1, 0.9, 6)
        hf = dataset_1d(hf_x, np.sin(3 * hf_x) * 1.2, tag="hf")
        with pytest.raises(FitError, match="collinear|underdetermined"):
            fit_ehk(hf, [m1, m2], FAST)

    def test_dimension_mismatch_rejected(self):
        xs = np.linspace(0, 1, 10)
        m1 = fit_kriging(dataset_1d(xs, np.sin(xs), tag="a"), FAST)
        hf = Dataset(
            inputs=lhs_sample([(0, 1), (0, 1)], 6, seed=1),
            outputs={"y": np.zeros(6)}, fidelity_tag="hf", bounds=[(0, 1), (0, 1)],
        )
        with pytest.raises(ValueError, match="dimension"):
            fit_ehk(hf, [m1], FAST)


class TestDeterminism:
    def test_repeat_fit_bit_identical(self):
        rng = np.random.default_rng(15)
        lf_x = np.sort(rng.uniform(0, 1, 20))

        def build():
            lf_model = fit_kriging(
                dataset_1d(lf_x, forrester_lf(lf_x), tag="lf"), FusionConfig(rng_seed=3)
            )
            hf_x = np.linspace(0.1, 0.9, 7)
            hf = dataset_1d(hf_x, forrester_hf(hf_x), tag="hf")
            return fit_ehk(hf, [lf_model], FusionConfig(rng_seed=3))

        m1, m2 = build(), build()
        assert np.array_equal(m1.theta_d, m2.theta_d)
        assert np.array_equal(m1.rho, m2.rho)
        q = np.linspace(0, 1, 17)[:, None]
        assert np.array_equal(m1.predict(q), m2.predict(q))

    def test_refit_fixed_theta_matches_full_fit_gls(self):
        rng = np.random.default_rng(16)
        lf_x = np.sort(rng.uniform(0, 1, 18))
        lf_model = fit_kriging(dataset_1d(lf_x, forrester_lf(lf_x), tag="lf"), FAST)
        hf_x = np.linspace(0.05, 0.95, 8)
        hf = dataset_1d(hf_x, forrester_hf(hf_x), tag="hf")
        full = fit_ehk(hf, [lf_model], FAST)
        refit = refit_ehk_gls(hf, [lf_model], full.theta_d, FAST)
        assert np.allclose(refit.rho, full.rho)
        assert refit.sigma_d_sq == pytest.approx(full.sigma_d_sq)
