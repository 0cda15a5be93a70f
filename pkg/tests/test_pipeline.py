import json

import numpy as np
import pytest

from twinflight.aero.tables import interpolate
from twinflight.fusion import (
    FusionConfig,
    fuse_aerodb,
    generate_dataset,
    single_source_database,
)
from twinflight.fusion.datasets import Dataset, load_dataset, save_dataset
from twinflight.fusion.emulators import truth_coefficients

FAST = FusionConfig(optimizer_budget=20, multistart_count=4)


def small_campaign(seed=100):
    hf = generate_dataset("cfd", 12, seed)
    lf = [generate_dataset(t, 80, seed + i + 1) for i, t in enumerate(("hetlas", "avl", "xflr5"))]
    return hf, lf


class TestFuseAerodb:
    def test_grid_node_on_hf_sample_matches(self):
        hf, lf = small_campaign()
        # Put one HF sample exactly on a grid node.
        hf.inputs[0] = (5.0, 10.0)
        alpha_grid = np.linspace(-20, 30, 11)
        beta_grid = np.linspace(0, 20, 5)
        assert 5.0 in alpha_grid and 10.0 in beta_grid
        db, report = fuse_aerodb(hf, lf, alpha_grid, beta_grid, FAST)
        node_value = interpolate(db.coefficients["CL"].baseline, {"alpha": 5.0, "beta": 10.0})
        assert node_value == pytest.approx(hf.response("CL")[0], rel=1e-6)

    def test_report_rho_favors_undistorted_source(self):
        seed = 200
        hf = generate_dataset("cfd", 12, seed)
        # One LF source is the truth itself; the other two are biased.
        clean = generate_dataset("cfd", 80, seed + 1)
        clean.fidelity_tag = "clean"
        biased = generate_dataset("avl", 80, seed + 2)
        shifted = generate_dataset("xflr5", 80, seed + 3)
        _, report = fuse_aerodb(
            hf, [clean, biased, shifted], np.linspace(-20, 30, 6), np.linspace(0, 20, 4),
            FAST, responses=("CL",),
        )
        rho = np.abs(report.coefficients["CL"].rho)
        assert np.argmax(rho) == 0

    def test_report_serializes(self):
        hf, lf = small_campaign(seed=300)
        _, report = fuse_aerodb(
            hf, lf[:1], np.linspace(-20, 30, 6), np.linspace(0, 20, 4), FAST,
            responses=("Cm",),
        )
        payload = json.dumps(report.to_dict())
        parsed = json.loads(payload)
        assert "Cm" in parsed["coefficients"]
        assert len(parsed["coefficients"]["Cm"]["rho"]) == 1

    def test_deterministic_outputs(self):
        def run():
            hf, lf = small_campaign(seed=400)
            db, report = fuse_aerodb(
                hf, lf[:2], np.linspace(-20, 30, 6), np.linspace(0, 20, 4),
                FusionConfig(optimizer_budget=20, multistart_count=4, rng_seed=11),
                responses=("CL", "Cm"),
            )
            return db, report

        _, rep1 = run()
        _, rep2 = run()
        for coeff in ("CL", "Cm"):
            ehk1 = rep1.coefficients[coeff].ehk
            ehk2 = rep2.coefficients[coeff].ehk
            assert np.array_equal(ehk1.theta_d, ehk2.theta_d)
            assert rep1.coefficients[coeff].rho == rep2.coefficients[coeff].rho
            pts = np.array([[0.0, 5.0], [10.0, 12.0]])
            assert np.array_equal(ehk1.predict(pts), ehk2.predict(pts))

    def test_fused_loo_beats_every_lf_source(self):
        hf, lf = small_campaign(seed=500)
        _, report = fuse_aerodb(
            hf, lf, np.linspace(-20, 30, 6), np.linspace(0, 20, 4), FAST,
            responses=("CL", "Cm"),
        )
        for coeff, cf in report.coefficients.items():
            assert cf.fused_loo_rmse < min(cf.lf_rmse_at_hf.values())


class TestSingleSource:
    def test_biased_source_database_reflects_bias(self):
        ds = generate_dataset("avl", 90, seed=600)
        db = single_source_database(ds, np.linspace(-20, 30, 8), np.linspace(0, 20, 4), FAST)
        # The biased source predicts a strongly nose-down moment at zero alpha.
        cm = interpolate(db.coefficients["Cm"].baseline, {"alpha": 0.0, "beta": 0.0})
        truth = truth_coefficients(0.0, 0.0)["Cm"]
        assert cm < truth - 0.05


class TestDatasetIo:
    def test_round_trip(self, tmp_path):
        ds = generate_dataset("hetlas", 30, seed=700)
        save_dataset(ds, tmp_path / "h.csv")
        loaded = load_dataset(tmp_path / "h.csv")
        assert loaded.fidelity_tag == "hetlas"
        assert np.array_equal(loaded.inputs, ds.inputs)
        for key in ds.outputs:
            assert np.array_equal(loaded.outputs[key], ds.outputs[key])

    def test_missing_sidecar(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("alpha,beta,CL\n0,0,1\n")
        with pytest.raises(FileNotFoundError, match="sidecar"):
            load_dataset(path)
