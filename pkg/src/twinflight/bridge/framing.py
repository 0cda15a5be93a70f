"""Compact binary framing for the twin-to-twin link.

Frame layout, all little-endian:

    sync      u8   0xFD
    length    u8   payload byte count
    sequence  u8   wrapping counter
    system_id u8
    component_id u8
    message_id   u16
    payload      bytes
    crc          u16  CRC-16/CCITT-FALSE over length..payload

The layout is modeled on common small-UAV telemetry framing but makes no
attempt at wire compatibility with any particular stack; the message
semantics live in `messages`.
"""

from __future__ import annotations

from dataclasses import dataclass

SYNC_BYTE = 0xFD
HEADER_LEN = 7  # sync..message_id
CRC_LEN = 2
MAX_PAYLOAD = 255


class DecodeError(ValueError):
    """Base class for frame decoding failures."""


class ShortBufferError(DecodeError):
    pass


class BadSyncError(DecodeError):
    pass


class BadCrcError(DecodeError):
    pass


class UnknownMessageError(DecodeError):
    pass


def crc16_ccitt_false(data: bytes) -> int:
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflections."""
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = (crc << 1) ^ 0x1021
            else:
                crc <<= 1
            crc &= 0xFFFF
    return crc


@dataclass(frozen=True)
class Frame:
    message_id: int
    payload: bytes
    sequence: int = 0
    system_id: int = 1
    component_id: int = 1

    def __post_init__(self) -> None:
        if len(self.payload) > MAX_PAYLOAD:
            raise ValueError(f"payload too long: {len(self.payload)} > {MAX_PAYLOAD}")
        for name in ("sequence", "system_id", "component_id"):
            if not 0 <= getattr(self, name) <= 0xFF:
                raise ValueError(f"{name} out of byte range")
        if not 0 <= self.message_id <= 0xFFFF:
            raise ValueError("message_id out of u16 range")


def encode_frame(frame: Frame) -> bytes:
    body = bytes(
        [
            len(frame.payload),
            frame.sequence,
            frame.system_id,
            frame.component_id,
            frame.message_id & 0xFF,
            (frame.message_id >> 8) & 0xFF,
        ]
    ) + frame.payload
    crc = crc16_ccitt_false(body)
    return bytes([SYNC_BYTE]) + body + bytes([crc & 0xFF, (crc >> 8) & 0xFF])


def decode_frame(buf: bytes) -> Frame:
    """Decode one frame from a buffer of exactly one frame."""
    if len(buf) < HEADER_LEN + CRC_LEN:
        raise ShortBufferError(f"buffer of {len(buf)} bytes is below minimum frame size")
    if buf[0] != SYNC_BYTE:
        raise BadSyncError(f"bad sync byte 0x{buf[0]:02X}")
    payload_len = buf[1]
    total = HEADER_LEN + payload_len + CRC_LEN
    if len(buf) < total:
        raise ShortBufferError(f"frame of {total} bytes truncated at {len(buf)}")
    body = buf[1 : HEADER_LEN + payload_len]
    crc_rx = buf[HEADER_LEN + payload_len] | (buf[HEADER_LEN + payload_len + 1] << 8)
    crc = crc16_ccitt_false(body)
    if crc != crc_rx:
        raise BadCrcError(f"crc mismatch: computed 0x{crc:04X}, received 0x{crc_rx:04X}")
    message_id = buf[5] | (buf[6] << 8)
    return Frame(
        message_id=message_id,
        payload=bytes(buf[HEADER_LEN : HEADER_LEN + payload_len]),
        sequence=buf[2],
        system_id=buf[3],
        component_id=buf[4],
    )
