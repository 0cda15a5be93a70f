"""Digital-to-physical link: codec, stream policies, transports, session."""

from .framing import (
    BadCrcError,
    BadSyncError,
    DecodeError,
    Frame,
    ShortBufferError,
    UnknownMessageError,
    crc16_ccitt_false,
    decode_frame,
    encode_frame,
)
from .link import (
    BridgeConfig,
    OffboardMode,
    OffboardState,
    StreamScheduler,
    clamp_setpoint,
    offboard_feed,
    offboard_watchdog,
)
from .messages import (
    MSG_ATTITUDE,
    MSG_HEARTBEAT,
    MSG_LOCAL_POSITION,
    MSG_SETPOINT,
    Attitude,
    Heartbeat,
    LocalPosition,
    decode_message,
    encode_message,
)
from .metrics import InsufficientOverlapError, TwinSyncMetrics, compute_sync_metrics
from .session import (
    CommandScript,
    RxCounters,
    SessionConfig,
    SessionResult,
    TeleopSession,
    TimedCommand,
)
from .transport import (
    FaultProfile,
    LoopbackTransport,
    LoopbackTwinLink,
    TwinLink,
    UdpTransport,
    UdpTwinLink,
)

__all__ = [
    "Attitude",
    "BadCrcError",
    "BadSyncError",
    "BridgeConfig",
    "CommandScript",
    "DecodeError",
    "FaultProfile",
    "Frame",
    "Heartbeat",
    "InsufficientOverlapError",
    "LocalPosition",
    "LoopbackTransport",
    "LoopbackTwinLink",
    "MSG_ATTITUDE",
    "MSG_HEARTBEAT",
    "MSG_LOCAL_POSITION",
    "MSG_SETPOINT",
    "OffboardMode",
    "OffboardState",
    "RxCounters",
    "SessionConfig",
    "SessionResult",
    "ShortBufferError",
    "StreamScheduler",
    "TeleopSession",
    "TimedCommand",
    "TwinSyncMetrics",
    "TwinLink",
    "UdpTransport",
    "UdpTwinLink",
    "UnknownMessageError",
    "clamp_setpoint",
    "compute_sync_metrics",
    "crc16_ccitt_false",
    "decode_frame",
    "decode_message",
    "encode_frame",
    "encode_message",
    "offboard_feed",
    "offboard_watchdog",
]
