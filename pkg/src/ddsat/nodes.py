"""Per-role protocol state machines: secondary, base and primary nodes.

A secondary waits in sync for a beacon, claims a free DDSAT slot, then
each frame senses + broadcasts in its own slot, runs fusion and the PSA at
the end of the DDSAT state, and transmits data in any granted cells.

A reservation only counts once the next beacon's occupied bitmap confirms
it -- the beacon doubles as the implicit ACK, so a DDSAT-slot collision is
discovered when the slot stays unmarked and both claimants fall back to
sync. Requests from still-unconfirmed slots are excluded from the PSA by
everyone (the beacon bitmap is common knowledge), which keeps the
distributed tables identical and makes the join frame a pure registration
frame.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import psa, sensing, wire
from .core import TrafficClass


class SnState(enum.Enum):
    SYNC_WAIT = "sync_wait"
    DDSAT_RESERVED = "ddsat_reserved"
    DATA_ALLOCATED = "data_allocated"


@dataclass
class SecondaryNode:
    node_id: int
    traffic: TrafficClass = TrafficClass.NORMAL
    requested_slots: int = 4
    state: SnState = SnState.SYNC_WAIT
    ddsat_slot: int | None = None
    confirmed: bool = False
    pd: int = 0
    estimates: psa.ChannelEstimates = field(default_factory=psa.ChannelEstimates)
    last_fusion: sensing.FusionResult | None = None
    last_table: psa.AllocationTable | None = None
    grant: list[tuple[int, int]] = field(default_factory=list)
    data_sequence: int = 0

    @property
    def dt(self) -> int:
        return self.traffic.dt_value

    # -- sync state ------------------------------------------------------

    def on_beacon(self, beacon: wire.BeaconPacket, n_slots: int, rng) -> str:
        """React to the sync-slot beacon; returns a short event label.

        A held slot confirmed by the occupied bitmap is kept. An
        unconfirmed slot means last frame's claim collided (or was never
        heard), so the node drops to sync and re-draws uniformly among the
        free slots. No free slot leaves the node waiting with pd + 1.
        """
        self.grant = []
        occupied = beacon.occupied_ddsat_slots
        if self.ddsat_slot is not None:
            if self.ddsat_slot in occupied:
                self.confirmed = True
                self.state = SnState.DDSAT_RESERVED
                return "kept"
            # claim never registered: back to sync and retry below
            self.ddsat_slot = None
            self.confirmed = False
            self.state = SnState.SYNC_WAIT
        free = [s for s in range(n_slots) if s not in occupied]
        if not free:
            self.pd = psa.update_pd(self.pd, served=False)
            return "no_free_slot"
        self.ddsat_slot = free[int(rng.integers(len(free)))]
        self.confirmed = False
        self.state = SnState.DDSAT_RESERVED
        return f"reserved:{self.ddsat_slot}"

    # -- ddsat state -----------------------------------------------------

    def on_own_ddsat_slot(self, sensing_channels, medium_view,
                          cfg: sensing.DetectionConfig, rng) -> wire.DdsatPacket:
        """Sense every listed channel and build this frame's DDSAT packet."""
        report = sensing.sense_all(self.node_id, sensing_channels, medium_view, cfg, rng)
        empty = frozenset(
            ch for ch, v in report.verdicts.items() if v is sensing.Verdict.EMPTY
        )
        try:
            preferred = psa.preferred_channels(self.estimates, sensing_channels)
        except psa.TooFewCandidates:
            preferred = (sensing_channels[0], None)
        return wire.DdsatPacket(
            sender=self.node_id,
            empty_channels=empty,
            requested_slots=self.requested_slots,
            priority_index=psa.priority_index(self.dt, self.pd),
            occupied_ddsat_slots=frozenset({self.ddsat_slot}),
            preferred_channels=preferred,
        )

    def on_ddsat_state_end(self, heard: list[wire.DdsatPacket],
                           beacon: wire.BeaconPacket, sensing_channels,
                           n_slots: int) -> None:
        """Fuse the shared verdicts and run the PSA on the common packet set.

        ``heard`` is the set of packets delivered on the CCC this frame;
        collided packets (including the node's own) are absent. Requests
        whose occupied slots are not confirmed by this frame's beacon are
        newcomers still registering and take no part in the allocation.
        """
        if not heard:
            self.last_fusion = None
            self.last_table = None
            self.grant = []
            return
        reports = [
            sensing.SensingReport(
                node=p.sender,
                verdicts={
                    ch: (sensing.Verdict.EMPTY if ch in p.empty_channels
                         else sensing.Verdict.OCCUPIED)
                    for ch in sensing_channels
                },
            )
            for p in heard
        ]
        fusion = sensing.fuse_majority(reports, sensing_channels)
        eligible = [
            p for p in heard
            if p.occupied_ddsat_slots <= beacon.occupied_ddsat_slots
        ]
        requests = [
            psa.SlotRequest(
                node=p.sender,
                priority_index=p.priority_index,
                requested_slots=p.requested_slots,
                preferred=p.preferred_channels,
            )
            for p in eligible
        ]
        table = psa.allocate(requests, fusion.empty_channels, n_slots)
        self.last_fusion = fusion
        self.last_table = table
        transmitted = any(p.sender == self.node_id for p in heard)
        eligible_here = any(p.sender == self.node_id for p in eligible)
        served = eligible_here and self.node_id not in table.unserved
        self.grant = table.slots_of(self.node_id) if served else []
        if self.grant:
            self.state = SnState.DATA_ALLOCATED
        else:
            if self.ddsat_slot is not None:
                self.state = SnState.DDSAT_RESERVED
            if transmitted and not served:
                # went out of the frame: raise priority for next time
                self.pd = psa.update_pd(self.pd, served=False)

    # -- data state ------------------------------------------------------

    def on_data_slot(self, slot: int) -> wire.DataPacket | None:
        """Transmit one data packet if this slot is granted on our channel."""
        for ch, s in self.grant:
            if s == slot:
                packet = wire.DataPacket(
                    sender=self.node_id,
                    sequence=self.data_sequence & 0xFFFF,
                    payload=b"",
                )
                self.data_sequence += 1
                return packet
        return None

    def granted_channel(self) -> int | None:
        return self.grant[0][0] if self.grant else None


# How many consecutive frames a DDSAT slot may stay silent (or collided)
# before the base node reclaims it.
RESERVATION_LEASE_FRAMES = 2


@dataclass
class BaseNode:
    sensing_channels: tuple[int, ...]
    reservations: dict[int, tuple[int, int]] = field(default_factory=dict)

    def make_beacon(self) -> wire.BeaconPacket:
        return wire.BeaconPacket(
            occupied_ddsat_slots=frozenset(self.reservations),
            sensing_channels=self.sensing_channels,
        )

    def on_ddsat_slot_result(self, slot: int, packet: wire.DdsatPacket | None,
                             collided: bool) -> None:
        """Track slot ownership from what the CCC delivered this slot.

        Exactly one valid packet (re)claims the slot; silence or a
        collision ages the lease until the slot is reclaimed.
        """
        if packet is not None and not collided:
            self.reservations[slot] = (packet.sender, 0)
        elif slot in self.reservations:
            owner, missed = self.reservations[slot]
            if missed + 1 >= RESERVATION_LEASE_FRAMES:
                del self.reservations[slot]
            else:
                self.reservations[slot] = (owner, missed + 1)


class PrimaryActivity(enum.Enum):
    ALWAYS_ON = "always_on"
    BERNOULLI = "bernoulli"


@dataclass
class PrimaryNode:
    """Licensed user modeled as a packetless energy source."""

    channel: int
    power_dbm: float = -50.0
    activity: PrimaryActivity = PrimaryActivity.ALWAYS_ON
    p_on: float = 1.0

    def active(self, frame_index: int, rng) -> bool:
        if self.activity is PrimaryActivity.ALWAYS_ON:
            return True
        return bool(rng.random() < self.p_on)
