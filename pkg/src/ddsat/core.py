"""Shared vocabulary for the DDSAT simulator: channels, nodes, traffic
classes and super-frame timing.

Channels are 1-based integers; channel 1 is always the common control
channel (CCC). Secondary nodes carry ids 1..254, the base node is id 0,
and primary nodes have no id at all (they never transmit packets).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

CCC_CHANNEL = 1
BASE_NODE_ID = 0

# Traffic-class weights. The protocol only requires real-time > normal;
# the order-of-magnitude gap lets class dominate small delay counters.
DT_NORMAL = 1
DT_REAL_TIME = 10

# Nominal timing: 1 s slots plus 0.1 s guard. Virtual only; nothing sleeps.
DEFAULT_SLOT_DURATION = 1.0
DEFAULT_GUARD = 0.1
DEFAULT_SLOTS_PER_STATE = 4


class TrafficClass(enum.Enum):
    NORMAL = "normal"
    REAL_TIME = "real_time"

    @property
    def dt_value(self) -> int:
        return DT_REAL_TIME if self is TrafficClass.REAL_TIME else DT_NORMAL


class PhaseKind(enum.Enum):
    SYNC = "sync"
    DDSAT = "ddsat"
    DATA = "data"


@dataclass(frozen=True)
class FramePhase:
    """Position within one super-frame: the sync slot, a DDSAT slot or a
    data slot. ``slot`` is meaningful only for the latter two."""

    kind: PhaseKind
    slot: int = 0

    def __post_init__(self) -> None:
        if self.slot < 0:
            raise ValueError("slot must be non-negative")


@dataclass(frozen=True)
class SuperFrameClock:
    """Maps a global slot counter onto (super-frame, phase).

    A super-frame is 1 sync slot, N DDSAT slots and N data slots, in that
    order, so it spans 1 + 2N ticks.
    """

    slots_per_state: int = DEFAULT_SLOTS_PER_STATE
    slot_duration: float = DEFAULT_SLOT_DURATION
    guard: float = DEFAULT_GUARD

    def __post_init__(self) -> None:
        if self.slots_per_state < 1:
            raise ValueError("slots_per_state must be >= 1")

    @property
    def frame_length(self) -> int:
        return 1 + 2 * self.slots_per_state

    def phase_at(self, tick: int) -> tuple[int, FramePhase]:
        """Return (frame index, phase) for a tick. Total over tick >= 0."""
        if tick < 0:
            raise ValueError("tick must be >= 0")
        n = self.slots_per_state
        frame, offset = divmod(tick, self.frame_length)
        if offset == 0:
            return frame, FramePhase(PhaseKind.SYNC)
        if offset <= n:
            return frame, FramePhase(PhaseKind.DDSAT, offset - 1)
        return frame, FramePhase(PhaseKind.DATA, offset - 1 - n)

    def virtual_time(self, tick: int) -> float:
        """Virtual seconds elapsed at the start of a tick (log metadata)."""
        return tick * (self.slot_duration + self.guard)


def validate_channel(channel: int, num_channels: int) -> None:
    if not 1 <= channel <= num_channels:
        raise ValueError(f"channel {channel} outside 1..{num_channels}")


def validate_node_id(node_id: int) -> None:
    if not 1 <= node_id <= 254:
        raise ValueError(f"secondary node id {node_id} outside 1..254")
