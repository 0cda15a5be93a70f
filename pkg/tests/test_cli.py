import json

import pytest
from click.testing import CliRunner
from scipy.interpolate import CubicSpline

from twinflight.cli import main
from twinflight.propulsion import DEFAULT_THRUST_POINTS

runner = CliRunner()


def run(*args):
    return runner.invoke(main, [str(a) for a in args])


@pytest.fixture(scope="module")
def campaign_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("campaign")
    result = run("datasets", "--out", out, "--seed", 2024,
                 "--lf-samples", 70, "--hf-samples", 12)
    assert result.exit_code == 0, result.output
    return out


class TestThrust:
    def test_bench_values(self):
        assert run("thrust", "--inflow", 20).output.strip() == "48.8"
        assert run("thrust", "--inflow", 0).output.strip() == "67.3"

    def test_interior_matches_spline_oracle(self):
        xs = [k[0] for k in DEFAULT_THRUST_POINTS]
        ys = [k[1] for k in DEFAULT_THRUST_POINTS]
        oracle = CubicSpline(xs, ys, bc_type="natural")
        out = float(run("thrust", "--inflow", 12.5).output.strip())
        assert out == pytest.approx(float(oracle(12.5)), abs=1e-9)

    def test_negative_inflow_exit_2(self):
        result = run("thrust", "--inflow", -3)
        assert result.exit_code == 2


class TestFuse:
    def test_missing_hf_file_exit_2(self, tmp_path):
        result = run("fuse", tmp_path / "nope.csv", tmp_path / "also_nope.csv",
                     "--out", tmp_path / "out")
        assert result.exit_code == 2
        assert "nope.csv" in result.output

    def test_fuse_writes_db_and_report(self, campaign_dir, tmp_path):
        out = tmp_path / "fused"
        result = run(
            "fuse", campaign_dir / "cfd.csv", campaign_dir / "hetlas.csv",
            campaign_dir / "avl.csv", "--out", out, "--seed", 3, "--budget", 20,
            "--grid", "alpha:-20:30:8,beta:0:20:4",
        )
        assert result.exit_code == 0, result.output
        report = json.loads((out / "fusion_report.json").read_text())
        for coeff, entry in report["coefficients"].items():
            assert entry["fused_loo_rmse"] < min(entry["lf_rmse_at_hf"].values()), coeff
        assert (out / "aerodb" / "manifest.json").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["seed"] == 3
        assert len(manifest["outputs"]) > 10

    def test_same_seed_byte_identical(self, campaign_dir, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            result = run(
                "fuse", campaign_dir / "cfd.csv", campaign_dir / "hetlas.csv",
                "--out", out, "--seed", 9, "--budget", 15,
                "--grid", "alpha:-20:30:6,beta:0:20:3",
            )
            assert result.exit_code == 0, result.output
            outs.append(out)
        files_a = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(outs[1]) for p in outs[1].rglob("*") if p.is_file())
        assert files_a == files_b
        for rel in files_a:
            assert (outs[0] / rel).read_bytes() == (outs[1] / rel).read_bytes(), rel


class TestSimulate:
    def test_square_run_summary(self, tmp_path):
        out = tmp_path / "sim"
        result = run("simulate", "--square", 6, 2, 8, "--out", out)
        assert result.exit_code == 0, result.output
        summary = json.loads(result.output.strip().splitlines()[-1])
        assert summary["final_position_error_m"] < 1.0
        assert (out / "telemetry.jsonl").exists()
        assert (out / "manifest.json").exists()

    def test_corrupted_db_exit_2(self, tmp_path):
        db_dir = tmp_path / "break"
        db_dir.mkdir()
        (db_dir / "manifest.json").write_text("{broken")
        result = run("simulate", "--square", 6, 2, 8, "--db", db_dir, "--out", tmp_path / "o")
        assert result.exit_code == 2
        assert "manifest" in result.output

    def test_requires_exactly_one_mission_source(self, tmp_path):
        result = run("simulate", "--out", tmp_path / "o")
        assert result.exit_code == 2

    def test_same_seed_byte_identical(self, tmp_path):
        outs = []
        for name in ("s1", "s2"):
            out = tmp_path / name
            result = run("simulate", "--square", 4, 2, 6, "--out", out, "--seed", 5)
            assert result.exit_code == 0
            outs.append(out)
        for rel in ("telemetry.jsonl", "manifest.json"):
            assert (outs[0] / rel).read_bytes() == (outs[1] / rel).read_bytes()


class TestTeleop:
    def test_short_loopback_session(self, tmp_path):
        out = tmp_path / "teleop"
        result = run("teleop", "--duration", 8, "--out", out,
                     "--script", "square", "--speed", 2)
        assert result.exit_code == 0, result.output
        summary = json.loads(result.output.strip().splitlines()[-1])
        assert abs(summary["frames_sent"] - 240) <= 8
        for name in ("digital.jsonl", "physical.jsonl", "metrics.json", "manifest.json"):
            assert (out / name).exists()

    def test_udp_endpoints(self, tmp_path):
        out = tmp_path / "udp"
        result = run(
            "teleop", "--duration", 6, "--out", out,
            "--digital-endpoint", "127.0.0.1:47311",
            "--physical-endpoint", "127.0.0.1:47312",
        )
        assert result.exit_code == 0, result.output
        summary = json.loads(result.output.strip().splitlines()[-1])
        assert summary["setpoints_received"] > 150

    def test_endpoint_pair_required(self, tmp_path):
        result = run("teleop", "--duration", 2, "--out", tmp_path / "x",
                     "--digital-endpoint", "127.0.0.1:47313")
        assert result.exit_code == 2

    def test_gateway_flag_serves_live_session(self, tmp_path):
        import json as json_mod
        import threading
        import time
        import urllib.request

        out = tmp_path / "gw"
        probe: dict = {}

        def poll_health():
            deadline = time.time() + 8.0
            while time.time() < deadline:
                try:
                    with urllib.request.urlopen(
                        "http://127.0.0.1:47441/health", timeout=1
                    ) as response:
                        payload = json_mod.loads(response.read())
                    if payload.get("session_running"):
                        probe.update(payload)
                        return
                except OSError:
                    pass
                time.sleep(0.2)

        poller = threading.Thread(target=poll_health)
        poller.start()
        result = run("teleop", "--duration", 6, "--out", out,
                     "--gateway", "127.0.0.1:47441", "--script", "hover")
        poller.join()
        assert result.exit_code == 0, result.output
        assert probe.get("session_running") is True
        assert (out / "digital.jsonl").exists()


class TestFidelity:
    def test_builtin_comparison_reports_opposite_pitch(self, tmp_path):
        out = tmp_path / "fid"
        result = run("fidelity", "--out", out, "--duration", 6)
        assert result.exit_code == 0, result.output
        summary = json.loads(result.output.strip().splitlines()[-1])
        pitches = summary["steady_pitch_deg"]
        assert pitches["truth"] > 0
        assert pitches["avl_biased"] < 0
        assert (out / "fidelity.json").exists()
