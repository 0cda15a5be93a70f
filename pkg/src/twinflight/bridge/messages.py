"""Payload schemas carried over the twin link.

Message ids follow the local-NED setpoint streaming convention:
0 heartbeat, 85 position/velocity target, 32 local position, 30 attitude.
All payload fields are little-endian.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from ..sim.setpoint import Setpoint
from .framing import Frame, UnknownMessageError, decode_frame, encode_frame

MSG_HEARTBEAT = 0
MSG_ATTITUDE = 30
MSG_LOCAL_POSITION = 32
MSG_SETPOINT = 85

_SETPOINT_FMT = "<H8fI"  # type_mask, x y z, vx vy vz, yaw, yaw_rate, timestamp_ms
_LOCAL_POSITION_FMT = "<6fI"  # x y z vx vy vz timestamp_ms
_ATTITUDE_FMT = "<6fI"  # roll pitch yaw p q r timestamp_ms


@dataclass(frozen=True)
class Heartbeat:
    pass


@dataclass(frozen=True)
class LocalPosition:
    position: tuple[float, float, float]
    velocity: tuple[float, float, float]
    timestamp_ms: int


@dataclass(frozen=True)
class Attitude:
    roll: float
    pitch: float
    yaw: float
    p: float
    q: float
    r: float
    timestamp_ms: int


Message = Heartbeat | LocalPosition | Attitude | Setpoint


def encode_payload(msg: Message) -> tuple[int, bytes]:
    if isinstance(msg, Heartbeat):
        return MSG_HEARTBEAT, b""
    if isinstance(msg, Setpoint):
        return MSG_SETPOINT, struct.pack(
            _SETPOINT_FMT,
            msg.type_mask,
            *msg.position,
            *msg.velocity,
            msg.yaw,
            msg.yaw_rate,
            msg.timestamp_ms & 0xFFFFFFFF,
        )
    if isinstance(msg, LocalPosition):
        return MSG_LOCAL_POSITION, struct.pack(
            _LOCAL_POSITION_FMT, *msg.position, *msg.velocity, msg.timestamp_ms & 0xFFFFFFFF
        )
    if isinstance(msg, Attitude):
        return MSG_ATTITUDE, struct.pack(
            _ATTITUDE_FMT, msg.roll, msg.pitch, msg.yaw, msg.p, msg.q, msg.r,
            msg.timestamp_ms & 0xFFFFFFFF,
        )
    raise TypeError(f"cannot encode message of type {type(msg).__name__}")


def decode_payload(message_id: int, payload: bytes) -> Message:
    if message_id == MSG_HEARTBEAT:
        return Heartbeat()
    if message_id == MSG_SETPOINT:
        vals = struct.unpack(_SETPOINT_FMT, payload)
        return Setpoint(
            type_mask=vals[0],
            position=(vals[1], vals[2], vals[3]),
            velocity=(vals[4], vals[5], vals[6]),
            yaw=vals[7],
            yaw_rate=vals[8],
            timestamp_ms=vals[9],
        )
    if message_id == MSG_LOCAL_POSITION:
        vals = struct.unpack(_LOCAL_POSITION_FMT, payload)
        return LocalPosition(
            position=(vals[0], vals[1], vals[2]),
            velocity=(vals[3], vals[4], vals[5]),
            timestamp_ms=vals[6],
        )
    if message_id == MSG_ATTITUDE:
        vals = struct.unpack(_ATTITUDE_FMT, payload)
        return Attitude(*vals)
    raise UnknownMessageError(f"unknown message id {message_id}")


def encode_message(msg: Message, sequence: int = 0, system_id: int = 1,
                   component_id: int = 1) -> bytes:
    message_id, payload = encode_payload(msg)
    return encode_frame(
        Frame(
            message_id=message_id,
            payload=payload,
            sequence=sequence,
            system_id=system_id,
            component_id=component_id,
        )
    )


def decode_message(buf: bytes) -> tuple[Message, Frame]:
    frame = decode_frame(buf)
    try:
        msg = decode_payload(frame.message_id, frame.payload)
    except struct.error as exc:
        raise UnknownMessageError(
            f"payload of {len(frame.payload)} bytes does not fit message id "
            f"{frame.message_id}"
        ) from exc
    return msg, frame
