import pytest

from twinflight.bridge.link import (
    BridgeConfig,
    OffboardMode,
    OffboardState,
    StreamScheduler,
    clamp_setpoint,
    offboard_feed,
    offboard_watchdog,
)
from twinflight.sim.setpoint import Setpoint


class TestClamp:
    def test_over_limit_scaled_and_flagged(self):
        sp = Setpoint.velocity_target((5.0, 0.0, 0.0))
        out, clamped = clamp_setpoint(sp, 3.0)
        assert clamped
        assert out.velocity == pytest.approx((3.0, 0.0, 0.0))

    def test_within_limit_untouched(self):
        sp = Setpoint.velocity_target((1.0, 1.0, 0.0))
        out, clamped = clamp_setpoint(sp, 3.0)
        assert not clamped
        assert out is sp

    def test_direction_preserved_on_345_triangle(self):
        sp = Setpoint.velocity_target((3.0, 4.0, 0.0))
        out, clamped = clamp_setpoint(sp, 3.0)
        assert clamped
        assert out.velocity == pytest.approx((1.8, 2.4, 0.0))
        ratio = out.velocity[1] / out.velocity[0]
        assert ratio == pytest.approx(4.0 / 3.0)

    def test_vertical_clamped_independently(self):
        sp = Setpoint.velocity_target((1.0, 0.0, -8.0))
        out, clamped = clamp_setpoint(sp, 3.0)
        assert clamped
        assert out.velocity[0] == 1.0  # horizontal untouched when under limit
        assert out.velocity[2] == -3.0

    def test_mask_and_other_fields_survive(self):
        sp = Setpoint.track_target((1.0, 2.0, 3.0), (9.0, 0.0, 0.0), yaw=1.0,
                                   timestamp_ms=55)
        out, _ = clamp_setpoint(sp, 3.0)
        assert out.type_mask == sp.type_mask
        assert out.position == sp.position
        assert out.yaw == 1.0
        assert out.timestamp_ms == 55


class TestScheduler:
    def test_thirty_hertz_over_ten_seconds(self):
        sched = StreamScheduler(30.0)
        sends = 0
        t = 0.0
        while t < 10.0:
            sends += sched.due(t)
            t += 0.004
        assert abs(sends - 300) <= 10

    def test_one_hertz_over_five_seconds(self):
        sched = StreamScheduler(1.0)
        sends = 0
        t = 0.0
        while t < 5.0:
            sends += sched.due(t)
            t += 0.01
        assert abs(sends - 5) <= 1

    def test_catches_up_after_stall(self):
        sched = StreamScheduler(10.0)
        assert sched.due(0.0) == 1
        # Nothing polled for a full second: all missed ticks fire at once.
        burst = sched.due(1.0)
        assert burst == 10
        assert sched.missed_deadlines >= 9

    def test_rejects_nonpositive_rate(self):
        with pytest.raises(ValueError):
            StreamScheduler(0.0)
        with pytest.raises(ValueError):
            BridgeConfig(stream_rate=-1.0)


class TestWatchdog:
    CFG_TIMEOUT = 500

    def test_fresh_setpoint_stays_active(self):
        state = offboard_feed(OffboardState(), 1000)
        assert state.mode is OffboardMode.ACTIVE
        state = offboard_watchdog(state, 1400, self.CFG_TIMEOUT)
        assert state.mode is OffboardMode.ACTIVE

    def test_silence_beyond_timeout_is_lost(self):
        state = offboard_feed(OffboardState(), 1000)
        state = offboard_watchdog(state, 1601, self.CFG_TIMEOUT)
        assert state.mode is OffboardMode.LOST

    def test_recovery_on_next_setpoint(self):
        state = offboard_feed(OffboardState(), 1000)
        state = offboard_watchdog(state, 2000, self.CFG_TIMEOUT)
        assert state.mode is OffboardMode.LOST
        state = offboard_feed(state, 2100)
        assert state.mode is OffboardMode.ACTIVE

    def test_inactive_never_trips(self):
        state = OffboardState()
        state = offboard_watchdog(state, 10_000, self.CFG_TIMEOUT)
        assert state.mode is OffboardMode.INACTIVE

    def test_log_replay_equivalence(self):
        """Lost is entered iff the send log has a gap beyond the timeout."""
        send_times_ms = [0, 33, 66, 100, 700, 733, 1500]
        state = OffboardState()
        lost_intervals = []
        lost_since = None
        t = 0
        idx = 0
        while t <= 1600:
            while idx < len(send_times_ms) and send_times_ms[idx] <= t:
                state = offboard_feed(state, send_times_ms[idx])
                idx += 1
            state = offboard_watchdog(state, t, self.CFG_TIMEOUT)
            if state.mode is OffboardMode.LOST and lost_since is None:
                lost_since = t
            if state.mode is OffboardMode.ACTIVE and lost_since is not None:
                lost_intervals.append((lost_since, t))
                lost_since = None
            t += 1
        gaps = [
            (send_times_ms[i], send_times_ms[i + 1])
            for i in range(len(send_times_ms) - 1)
            if send_times_ms[i + 1] - send_times_ms[i] > self.CFG_TIMEOUT
        ]
        assert len(lost_intervals) == len(gaps)
        for (lost_at, _), (gap_start, _) in zip(lost_intervals, gaps):
            assert lost_at == gap_start + self.CFG_TIMEOUT + 1
