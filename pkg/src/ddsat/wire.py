"""Bit-exact codecs for the three on-air packet types.

Layouts (all multi-byte integers big-endian, CRC-16/CCITT-FALSE over every
preceding byte appended last):

  beacon:  [0x01][occupied DDSAT-slot bitmap:1][M:1][M channel bytes][crc:2]
  ddsat:   [0x02][sender:1][empty-channel bitmap:1][requested:1]
           [priority index:2][occupied DDSAT-slot bitmap:1]
           [preferred channels, high nibble first choice:1][crc:2]
  data:    [0x03][sender:1][sequence:2][payload_len:1][payload][crc:2]

Bitmaps cap the slot count and channel count at 8. In the empty-channel
bitmap, bit (i-1) stands for channel i; the CCC bit is always zero. A
preferred-channel nibble of 0 means "no second choice".
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import CCC_CHANNEL

MAX_SLOTS = 8
MAX_CHANNELS = 8
MAX_SENSING_CHANNELS = 15

TYPE_BEACON = 0x01
TYPE_DDSAT = 0x02
TYPE_DATA = 0x03


class WireError(Exception):
    """Base class for codec failures."""


class BadCrc(WireError):
    pass


class BadType(WireError):
    pass


class Truncated(WireError):
    pass


class InvariantViolation(WireError):
    pass


def crc16(data: bytes) -> int:
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection or xorout."""
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ 0x1021) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
    return crc


@dataclass(frozen=True)
class BeaconPacket:
    occupied_ddsat_slots: frozenset[int] = field(default_factory=frozenset)
    sensing_channels: tuple[int, ...] = ()


@dataclass(frozen=True)
class DdsatPacket:
    sender: int
    empty_channels: frozenset[int] = field(default_factory=frozenset)
    requested_slots: int = 0
    priority_index: int = 0
    occupied_ddsat_slots: frozenset[int] = field(default_factory=frozenset)
    preferred_channels: tuple[int, int | None] = (2, 3)


@dataclass(frozen=True)
class DataPacket:
    sender: int
    sequence: int = 0
    payload: bytes = b""


def _slots_to_bitmap(slots: frozenset[int], n_slots: int) -> int:
    bitmap = 0
    for s in slots:
        if not 0 <= s < n_slots:
            raise InvariantViolation(f"slot {s} outside 0..{n_slots - 1}")
        bitmap |= 1 << s
    return bitmap

def _bitmap_to_slots(bitmap: int) -> frozenset[int]:
    return frozenset(i for i in range(8) if bitmap & (1 << i))


def _check_sensing_channel(ch: int) -> None:
    if ch == CCC_CHANNEL:
        raise InvariantViolation("CCC listed as a sensing channel")
    if not 2 <= ch <= MAX_CHANNELS:
        raise InvariantViolation(f"channel {ch} outside 2..{MAX_CHANNELS}")


def _frame(body: bytes) -> bytes:
    return body + crc16(body).to_bytes(2, "big")


def _unframe(data: bytes, expected_type: int) -> bytes:
    if len(data) < 1:
        raise Truncated("empty input")
    if data[0] != expected_type:
        raise BadType(f"expected type 0x{expected_type:02X}, got 0x{data[0]:02X}")
    if len(data) < 3:
        raise Truncated("too short to carry a CRC")
    body, crc = data[:-2], int.from_bytes(data[-2:], "big")
    if crc16(body) != crc:
        raise BadCrc("checksum mismatch")
    return body


def encode_beacon(p: BeaconPacket, n_slots: int = MAX_SLOTS) -> bytes:
    if len(p.sensing_channels) > MAX_SENSING_CHANNELS:
        raise InvariantViolation("too many sensing channels")
    if len(set(p.sensing_channels)) != len(p.sensing_channels):
        raise InvariantViolation("duplicate sensing channel")
    for ch in p.sensing_channels:
        _check_sensing_channel(ch)
    body = bytes(
        [TYPE_BEACON, _slots_to_bitmap(p.occupied_ddsat_slots, n_slots),
         len(p.sensing_channels), *p.sensing_channels]
    )
    return _frame(body)


def decode_beacon(data: bytes) -> BeaconPacket:
    body = _unframe(data, TYPE_BEACON)
    if len(body) < 3:
        raise Truncated("beacon body too short")
    count = body[2]
    if len(body) != 3 + count:
        raise Truncated("beacon length disagrees with channel count")
    channels = tuple(body[3:3 + count])
    for ch in channels:
        _check_sensing_channel(ch)
    if len(set(channels)) != len(channels):
        raise InvariantViolation("duplicate sensing channel")
    return BeaconPacket(_bitmap_to_slots(body[1]), channels)


def _check_ddsat_invariants(p: DdsatPacket, n_slots: int) -> None:
    if not 1 <= p.sender <= 254:
        raise InvariantViolation(f"bad sender id {p.sender}")
    if not 0 <= p.requested_slots <= n_slots:
        raise InvariantViolation(
            f"requested_slots {p.requested_slots} exceeds {n_slots}")
    if not 0 <= p.priority_index <= 0xFFFF:
        raise InvariantViolation("priority index outside 16 bits")
    for ch in p.empty_channels:
        _check_sensing_channel(ch)
    first, second = p.preferred_channels
    _check_sensing_channel(first)
    if second is not None:
        _check_sensing_channel(second)
        if second == first:
            raise InvariantViolation("preferred channels must be distinct")


def encode_ddsat(p: DdsatPacket, n_slots: int = MAX_SLOTS) -> bytes:
    _check_ddsat_invariants(p, n_slots)
    empty_bitmap = 0
    for ch in p.empty_channels:
        empty_bitmap |= 1 << (ch - 1)
    first, second = p.preferred_channels
    pref = (first << 4) | (second or 0)
    body = bytes(
        [TYPE_DDSAT, p.sender, empty_bitmap, p.requested_slots]
    ) + p.priority_index.to_bytes(2, "big") + bytes(
        [_slots_to_bitmap(p.occupied_ddsat_slots, n_slots), pref]
    )
    return _frame(body)


def decode_ddsat(data: bytes, n_slots: int = MAX_SLOTS) -> DdsatPacket:
    body = _unframe(data, TYPE_DDSAT)
    if len(body) != 8:
        raise Truncated("ddsat body must be 8 bytes")
    empty = frozenset(
        i + 1 for i in range(8) if body[2] & (1 << i)
    )
    first, second = body[7] >> 4, body[7] & 0x0F
    p = DdsatPacket(
        sender=body[1],
        empty_channels=empty,
        requested_slots=body[3],
        priority_index=int.from_bytes(body[4:6], "big"),
        occupied_ddsat_slots=_bitmap_to_slots(body[6]),
        preferred_channels=(first, second or None),
    )
    _check_ddsat_invariants(p, n_slots)
    return p


def encode_data(p: DataPacket) -> bytes:
    if not 1 <= p.sender <= 254:
        raise InvariantViolation(f"bad sender id {p.sender}")
    if len(p.payload) > 255:
        raise InvariantViolation("payload longer than 255 bytes")
    if not 0 <= p.sequence <= 0xFFFF:
        raise InvariantViolation("sequence outside 16 bits")
    body = bytes([TYPE_DATA, p.sender]) + p.sequence.to_bytes(2, "big") \
        + bytes([len(p.payload)]) + p.payload
    return _frame(body)


def decode_data(data: bytes) -> DataPacket:
    body = _unframe(data, TYPE_DATA)
    if len(body) < 5:
        raise Truncated("data body too short")
    if len(body) != 5 + body[4]:
        raise Truncated("data length disagrees with payload_len")
    if not 1 <= body[1] <= 254:
        raise InvariantViolation(f"bad sender id {body[1]}")
    return DataPacket(
        sender=body[1],
        sequence=int.from_bytes(body[2:4], "big"),
        payload=bytes(body[5:]),
    )
