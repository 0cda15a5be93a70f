import math

import numpy as np
import pytest

from twinflight.bridge.metrics import (
    InsufficientOverlapError,
    compute_sync_metrics,
)


def synth_log(duration=20.0, hz=100.0, delay=0.0, noise_sd=0.0, seed=0):
    """Telemetry-shaped dicts with a smooth exercised velocity profile."""
    rng = np.random.default_rng(seed)
    n = int(duration * hz)
    records = []
    for i in range(n):
        t = i / hz
        ts = t - delay
        vx = math.sin(0.7 * ts) + 0.5 * math.sin(2.3 * ts)
        vy = math.cos(1.1 * ts)
        vz = 0.2 * math.sin(0.4 * ts)
        if noise_sd > 0:
            vx += rng.normal(0, noise_sd)
            vy += rng.normal(0, noise_sd)
            vz += rng.normal(0, noise_sd)
        records.append(
            {
                "t": t,
                "vel_ned": [vx, vy, vz],
                "state": {"pos_n": math.sin(0.1 * ts), "pos_e": 0.0, "pos_d": -10.0},
            }
        )
    return records


class TestSyncMetrics:
    def test_identity_gives_zero_lag_zero_rms(self):
        log = synth_log()
        m = compute_sync_metrics(log, log)
        assert m.lag_estimate == 0.0
        assert m.rms_velocity_error_total == pytest.approx(0.0, abs=1e-12)
        assert m.max_position_divergence == pytest.approx(0.0, abs=1e-12)

    def test_constructed_delay_recovered(self):
        digital = synth_log()
        physical = synth_log(delay=0.2)
        m = compute_sync_metrics(digital, physical)
        assert abs(m.lag_estimate - 0.2) <= 1.0 / 30.0 + 1e-9

    def test_white_noise_rms_level(self):
        digital = synth_log()
        physical = synth_log(noise_sd=0.1, seed=7)
        m = compute_sync_metrics(digital, physical)
        assert m.lag_estimate == 0.0
        assert m.rms_velocity_error_total == pytest.approx(0.1, abs=0.02)

    def test_insufficient_overlap_rejected(self):
        digital = synth_log(duration=3.0)
        physical = synth_log(duration=3.0)
        with pytest.raises(InsufficientOverlapError):
            compute_sync_metrics(digital, physical)

    def test_disjoint_time_bases_resampled(self):
        digital = synth_log(hz=100.0)
        physical = synth_log(hz=37.0, delay=0.5)
        m = compute_sync_metrics(digital, physical)
        assert abs(m.lag_estimate - 0.5) <= 1.0 / 30.0 + 1e-9

    def test_report_round_trips_json(self, tmp_path):
        m = compute_sync_metrics(synth_log(), synth_log(delay=0.1))
        path = tmp_path / "metrics.json"
        m.to_json(str(path))
        import json

        parsed = json.loads(path.read_text())
        assert parsed["lag_estimate_s"] == m.lag_estimate
        assert parsed["samples"] == m.samples
