"""Datagram transports: in-process loopback and UDP.

The loopback transport runs on the session's virtual clock and supports
deterministic fault injection (fixed delay, seeded loss, seeded adjacent
reordering), which is how link impairments are reproduced in tests. The
UDP transport sends one frame per datagram between real endpoints.
"""

from __future__ import annotations

import heapq
import random
import socket
from dataclasses import dataclass


@dataclass(frozen=True)
class FaultProfile:
    delay: float = 0.0  # one-way latency, seconds
    loss_probability: float = 0.0
    reorder_probability: float = 0.0  # chance a datagram is held past its successor
    reorder_hold: float = 0.05  # extra delay applied to a reordered datagram, s
    seed: int = 0


class LoopbackTransport:
    """Virtual-time one-way datagram channel.

    Reordering is realized by holding the selected datagram back by
    `reorder_hold`, long enough to arrive after its successor at the
    default stream rate.
    """

    def __init__(self, faults: FaultProfile | None = None):
        self.faults = faults or FaultProfile()
        self._rng = random.Random(self.faults.seed)
        self._in_flight: list[tuple[float, int, bytes]] = []
        self._counter = 0
        self.sent_count = 0
        self.dropped_count = 0
        self.reordered_count = 0

    def send(self, data: bytes, now: float) -> None:
        self.sent_count += 1
        if self.faults.loss_probability > 0.0:
            if self._rng.random() < self.faults.loss_probability:
                self.dropped_count += 1
                return
        deliver_at = now + self.faults.delay
        if (
            self.faults.reorder_probability > 0.0
            and self._rng.random() < self.faults.reorder_probability
        ):
            deliver_at += self.faults.reorder_hold
            self.reordered_count += 1
        heapq.heappush(self._in_flight, (deliver_at, self._counter, data))
        self._counter += 1

    def poll(self, now: float) -> list[bytes]:
        out = []
        while self._in_flight and self._in_flight[0][0] <= now:
            out.append(heapq.heappop(self._in_flight)[2])
        return out

    def pending(self) -> int:
        return len(self._in_flight)


class UdpTransport:
    """One frame per UDP datagram between two bound endpoints."""

    def __init__(self, local: tuple[str, int], remote: tuple[str, int]):
        self.remote = remote
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self.sock.bind(local)
        self.sock.setblocking(False)
        self.sent_count = 0

    def send(self, data: bytes, now: float = 0.0) -> None:
        self.sock.sendto(data, self.remote)
        self.sent_count += 1

    def poll(self, now: float = 0.0) -> list[bytes]:
        out = []
        while True:
            try:
                data, _ = self.sock.recvfrom(65536)
            except BlockingIOError:
                break
            out.append(data)
        return out

    def close(self) -> None:
        self.sock.close()


class TwinLink:
    """Bidirectional channel between the digital and physical sides.

    The d2p direction carries setpoints; p2d carries return telemetry.
    """

    def send_d2p(self, data: bytes, now: float) -> None:
        raise NotImplementedError

    def poll_d2p(self, now: float) -> list[bytes]:
        raise NotImplementedError

    def send_p2d(self, data: bytes, now: float) -> None:
        raise NotImplementedError

    def poll_p2d(self, now: float) -> list[bytes]:
        raise NotImplementedError

    def close(self) -> None:
        pass


class LoopbackTwinLink(TwinLink):
    """In-process link on the virtual clock with fault injection."""

    def __init__(self, faults: FaultProfile | None = None):
        self.to_physical = LoopbackTransport(faults)
        self.to_digital = LoopbackTransport(faults)

    def send_d2p(self, data: bytes, now: float) -> None:
        self.to_physical.send(data, now)

    def poll_d2p(self, now: float) -> list[bytes]:
        return self.to_physical.poll(now)

    def send_p2d(self, data: bytes, now: float) -> None:
        self.to_digital.send(data, now)

    def poll_p2d(self, now: float) -> list[bytes]:
        return self.to_digital.poll(now)


class UdpTwinLink(TwinLink):
    """Real sockets: digital endpoint <-> physical endpoint."""

    def __init__(self, digital: tuple[str, int], physical: tuple[str, int]):
        self.digital_side = UdpTransport(local=digital, remote=physical)
        self.physical_side = UdpTransport(local=physical, remote=digital)

    def send_d2p(self, data: bytes, now: float) -> None:
        self.digital_side.send(data)

    def poll_d2p(self, now: float) -> list[bytes]:
        return self.physical_side.poll()

    def send_p2d(self, data: bytes, now: float) -> None:
        self.physical_side.send(data)

    def poll_p2d(self, now: float) -> list[bytes]:
        return self.digital_side.poll()

    def close(self) -> None:
        self.digital_side.close()
        self.physical_side.close()
