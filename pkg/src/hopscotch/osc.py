"""OSC 1.0 codec and SLIP framing for the pad protocol.

The pad hardware (or its simulator) speaks single OSC messages, one per
UDP datagram or SLIP frame.  Addresses follow a fixed schema: twelve
"/triggerN" pad addresses plus six named analog sensor channels.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

PAD_COUNT = 12
TRIGGER_PREFIX = "/trigger"

#: Analog channel addresses, in the order the firmware emits them each poll.
SENSOR_ADDRESSES = (
    "/bend_data1",
    "/bend_data2",
    "/optic_data",
    "/piezo_data",
    "/fsr_data",
    "/Slider_data",
)

_FORBIDDEN_ADDRESS_BYTES = {0x20, 0x23, 0x00}

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1


class OscError(Exception):
    """Base class for codec failures."""


class OscEncodeError(OscError):
    pass


class OscDecodeError(OscError):
    pass


class SlipError(Exception):
    pass


@dataclass(frozen=True)
class OscMessage:
    """An address path plus an ordered list of int/float/str arguments."""

    address: str
    args: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


def _validate_address(address: str) -> None:
    if not address:
        raise OscEncodeError("address is empty")
    if not address.startswith("/"):
        raise OscEncodeError("address must start with '/'")
    for ch in address:
        if ord(ch) in _FORBIDDEN_ADDRESS_BYTES:
            raise OscEncodeError(
                f"address contains forbidden byte {ord(ch):#04x} ({ch!r})"
            )


def _osc_string(text: str) -> bytes:
    # Null-terminated, zero-padded to a 4-byte boundary.
    raw = text.encode("ascii")
    if b"\x00" in raw:
        raise OscEncodeError("string argument contains NUL")
    padded = raw + b"\x00"
    if len(padded) % 4:
        padded += b"\x00" * (4 - len(padded) % 4)
    return padded


def encode_message(msg: OscMessage) -> bytes:
    """Encode per OSC 1.0: padded address, ','-tag string, big-endian args."""
    _validate_address(msg.address)
    out = bytearray(_osc_string(msg.address))
    tags = ","
    payload = bytearray()
    for arg in msg.args:
        if isinstance(arg, bool):
            raise OscEncodeError(f"unsupported argument type: {type(arg).__name__}")
        if isinstance(arg, int):
            if not INT32_MIN <= arg <= INT32_MAX:
                raise OscEncodeError(f"int argument {arg} outside 32-bit range")
            tags += "i"
            payload += struct.pack(">i", arg)
        elif isinstance(arg, float):
            tags += "f"
            payload += struct.pack(">f", arg)
        elif isinstance(arg, str):
            tags += "s"
            payload += _osc_string(arg)
        else:
            raise OscEncodeError(f"unsupported argument type: {type(arg).__name__}")
    out += _osc_string(tags)
    out += payload
    assert len(out) % 4 == 0
    return bytes(out)


def _read_osc_string(data: bytes, offset: int) -> tuple[str, int]:
    end = data.find(b"\x00", offset)
    if end < 0:
        raise OscDecodeError("unterminated string")
    text = data[offset:end].decode("ascii")
    next_off = end + 1
    if next_off % 4:
        next_off += 4 - next_off % 4
    if next_off > len(data):
        raise OscDecodeError("truncated string padding")
    return text, next_off


def decode_message(data: bytes) -> OscMessage:
    """Decode a single OSC 1.0 message; inverse of :func:`encode_message`."""
    if len(data) % 4:
        raise OscDecodeError("length not multiple of 4")
    if len(data) < 8:
        raise OscDecodeError("message shorter than 8 bytes")
    address, offset = _read_osc_string(data, 0)
    if not address.startswith("/"):
        raise OscDecodeError("missing leading '/' in address")
    tags, offset = _read_osc_string(data, offset)
    if not tags.startswith(","):
        raise OscDecodeError("missing ',' type tag string")
    args = []
    for tag in tags[1:]:
        if tag == "i":
            if offset + 4 > len(data):
                raise OscDecodeError("truncated int32 argument")
            args.append(struct.unpack_from(">i", data, offset)[0])
            offset += 4
        elif tag == "f":
            if offset + 4 > len(data):
                raise OscDecodeError("truncated float32 argument")
            args.append(struct.unpack_from(">f", data, offset)[0])
            offset += 4
        elif tag == "s":
            try:
                value, offset = _read_osc_string(data, offset)
            except OscDecodeError:
                raise OscDecodeError("truncated string argument") from None
            args.append(value)
        else:
            raise OscDecodeError(f"unknown type tag {tag!r}")
    return OscMessage(address, tuple(args))


# SLIP (RFC 1055) framing for the serial transport.
SLIP_END = 0xC0
SLIP_ESC = 0xDB
SLIP_ESC_END = 0xDC
SLIP_ESC_ESC = 0xDD


def slip_frame(payload: bytes) -> bytes:
    out = bytearray()
    for b in payload:
        if b == SLIP_END:
            out += bytes((SLIP_ESC, SLIP_ESC_END))
        elif b == SLIP_ESC:
            out += bytes((SLIP_ESC, SLIP_ESC_ESC))
        else:
            out.append(b)
    out.append(SLIP_END)
    return bytes(out)


def slip_unframe(frame: bytes) -> bytes:
    if not frame or frame[-1] != SLIP_END:
        raise SlipError("frame missing END byte")
    out = bytearray()
    it = iter(frame[:-1])
    for b in it:
        if b == SLIP_ESC:
            try:
                nxt = next(it)
            except StopIteration:
                raise SlipError("dangling escape byte") from None
            if nxt == SLIP_ESC_END:
                out.append(SLIP_END)
            elif nxt == SLIP_ESC_ESC:
                out.append(SLIP_ESC)
            else:
                raise SlipError(f"invalid escape sequence 0xDB {nxt:#04x}")
        elif b == SLIP_END:
            raise SlipError("unescaped END inside frame")
        else:
            out.append(b)
    return bytes(out)


def iter_slip_frames(stream: bytes):
    """Split a byte stream on END bytes, yielding decoded payloads.

    Empty frames (back-to-back ENDs, used by some senders as a flush)
    are skipped.
    """
    start = 0
    for i, b in enumerate(stream):
        if b == SLIP_END:
            chunk = stream[start : i + 1]
            start = i + 1
            if len(chunk) > 1:
                yield slip_unframe(chunk)


def trigger_address(pad: int) -> str:
    if not 1 <= pad <= PAD_COUNT:
        raise ValueError(f"pad {pad} out of range 1..{PAD_COUNT}")
    return f"{TRIGGER_PREFIX}{pad}"


def parse_trigger_address(address: str) -> int | None:
    """Return the pad index for "/trigger1".."/trigger12", else None."""
    if not address.startswith(TRIGGER_PREFIX):
        return None
    suffix = address[len(TRIGGER_PREFIX):]
    if not suffix.isdigit():
        return None
    pad = int(suffix)
    if not 1 <= pad <= PAD_COUNT or suffix != str(pad):
        return None
    return pad
