"""Simulated radio medium and the deterministic discrete-event engine.

One run is single-threaded and a pure function of (scenario, seed): the
engine steps tick by tick through the super-frames, resolving the common
control channel per slot (silence / delivered / collision, no capture
effect) and sampling received powers as loudest-active-source plus
lognormal shadowing. RNG streams are split per purpose (slot choice,
shadowing, primary activity) so changing one knob leaves the others'
draws untouched.

Event order within a frame is fixed: beacon, then DDSAT slots in slot
order (owners processed by ascending node id), end-of-state fusion + PSA
by ascending node id, then data slots in slot order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import metrics, psa, sensing, wire
from .core import SuperFrameClock, TrafficClass
from .nodes import BaseNode, PrimaryNode, SecondaryNode, SnState
from .scenario import ScenarioConfig

# Mean received power, at every receiver, of a transmitting secondary.
PEER_TX_POWER_DBM = -55.0


class InvalidScenario(ValueError):
    pass


@dataclass
class Monitor:
    """Global observer used by the acceptance properties."""

    data_tx_by_channel: dict[int, int] = field(default_factory=dict)
    first_data_tx_frame: dict[int, int] = field(default_factory=dict)
    consistency_violations: int = 0
    cell_violations: int = 0
    occupied_channel_tx: int = 0

    def record_data_tx(self, frame: int, node: int, channel: int) -> None:
        self.data_tx_by_channel[channel] = self.data_tx_by_channel.get(channel, 0) + 1
        self.first_data_tx_frame.setdefault(node, frame)


@dataclass
class RunResult:
    log: metrics.MetricsLog
    monitor: Monitor
    trace: list[str]


class Medium:
    """Per-slot power model: loudest active source, else the noise floor,
    plus Gaussian shadowing in dB."""

    def __init__(self, noise_floor_dbm: float, shadow_sigma_db: float):
        self.noise_floor_dbm = noise_floor_dbm
        self.shadow_sigma_db = shadow_sigma_db
        self.sources: dict[int, list[float]] = {}

    def clear(self) -> None:
        self.sources = {}

    def add_source(self, channel: int, power_dbm: float) -> None:
        self.sources.setdefault(channel, []).append(power_dbm)

    def sample(self, receiver: int, channel: int, rng) -> float:
        powers = self.sources.get(channel)
        mean = max(powers) if powers else self.noise_floor_dbm
        return mean + rng.normal(0.0, self.shadow_sigma_db)


class Engine:
    def __init__(self, cfg: ScenarioConfig, seed: int | None = None):
        try:
            from .scenario import validate_scenario
            validate_scenario(cfg)
        except ValueError as exc:
            raise InvalidScenario(str(exc)) from exc
        self.cfg = cfg
        self.seed = cfg.seed if seed is None else seed
        self.clock = SuperFrameClock(slots_per_state=cfg.slots_per_state)
        self.detection = sensing.DetectionConfig(cfg.radio.threshold_dbm)
        self.medium = Medium(cfg.radio.noise_floor_dbm, cfg.radio.shadow_sigma_db)
        self.bn = BaseNode(sensing_channels=cfg.sensing_channels)
        self.sns = [
            SecondaryNode(
                node_id=sn.node_id,
                traffic=TrafficClass(sn.traffic),
                requested_slots=sn.requested_slots,
            )
            for sn in sorted(cfg.secondaries, key=lambda s: s.node_id)
        ]
        self.pn: PrimaryNode | None = None
        if cfg.primary is not None:
            self.pn = PrimaryNode(
                channel=cfg.primary.channel,
                power_dbm=cfg.primary.power_dbm,
                activity=cfg.primary.activity_kind,
                p_on=cfg.primary.p_on,
            )
        streams = np.random.SeedSequence(self.seed).spawn(3)
        self.rng_slots = np.random.default_rng(streams[0])
        self.rng_shadow = np.random.default_rng(streams[1])
        self.rng_pn = np.random.default_rng(streams[2])
        self.monitor = Monitor()
        self.trace: list[str] = []
        self.log = metrics.MetricsLog(seed=self.seed,
                                      scenario_hash=cfg.scenario_hash())

    # ------------------------------------------------------------------

    def run(self, frames: int | None = None) -> RunResult:
        total = self.cfg.frames if frames is None else frames
        for frame in range(total):
            self._step_frame(frame)
        return RunResult(log=self.log, monitor=self.monitor, trace=self.trace)

    def _step_frame(self, frame: int) -> None:
        cfg = self.cfg
        n = cfg.slots_per_state
        pn_active = self.pn is not None and self.pn.active(frame, self.rng_pn)

        # sync slot: beacon over the error-free CCC
        beacon = wire.decode_beacon(wire.encode_beacon(self.bn.make_beacon(), n))
        occ = sorted(beacon.occupied_ddsat_slots)
        self.trace.append(f"frame {frame} beacon occupied={occ} "
                          f"channels={list(beacon.sensing_channels)}")
        for sn in self.sns:
            event = sn.on_beacon(beacon, n, self.rng_slots)
            if event != "kept":
                self.trace.append(f"frame {frame} sync: sn{sn.node_id} {event}")

        # ddsat slots: sense in own slot, broadcast, resolve the CCC
        self.medium.clear()
        if pn_active:
            self.medium.add_source(self.pn.channel, self.pn.power_dbm)
        heard: list[wire.DdsatPacket] = []
        for slot in range(n):
            owners = [sn for sn in self.sns
                      if sn.state is not SnState.SYNC_WAIT and sn.ddsat_slot == slot]
            sent = []
            for sn in owners:
                packet = sn.on_own_ddsat_slot(
                    cfg.sensing_channels, self.medium.sample,
                    self.detection, self.rng_shadow)
                sent.append(wire.decode_ddsat(wire.encode_ddsat(packet, n), n))
            if len(sent) == 1:
                heard.append(sent[0])
                self.bn.on_ddsat_slot_result(slot, sent[0], collided=False)
            elif not sent:
                self.bn.on_ddsat_slot_result(slot, None, collided=False)
            else:
                self.bn.on_ddsat_slot_result(slot, None, collided=True)
                self.trace.append(
                    f"frame {frame} ddsat slot {slot}: collision between "
                    f"{sorted(s.sender for s in sent)}")

        # end of DDSAT state: every secondary fuses and allocates on its own
        for sn in self.sns:
            sn.on_ddsat_state_end(heard, beacon, cfg.sensing_channels, n)
        fusion, table = self._check_consistency(frame)
        if fusion is not None:
            self.trace.append(
                f"frame {frame} fusion empty={sorted(fusion.empty_channels)}")
        if table is not None and table.grid:
            grants = {sn.node_id: sn.grant for sn in self.sns if sn.grant}
            self.trace.append(f"frame {frame} allocation {grants}")

        # data slots
        for slot in range(n):
            self.medium.clear()
            if pn_active:
                self.medium.add_source(self.pn.channel, self.pn.power_dbm)
            cells: dict[tuple[int, int], int] = {}
            transmitters: set[int] = set()
            for sn in self.sns:
                packet = sn.on_data_slot(slot)
                if packet is None:
                    continue
                transmitters.add(sn.node_id)
                wire.decode_data(wire.encode_data(packet))
                channel = sn.granted_channel()
                self.medium.add_source(channel, PEER_TX_POWER_DBM)
                self.monitor.record_data_tx(frame, sn.node_id, channel)
                if (channel, slot) in cells:
                    self.monitor.cell_violations += 1
                cells[(channel, slot)] = sn.node_id
                if sn.last_fusion is not None and \
                        channel not in sn.last_fusion.empty_channels:
                    self.monitor.occupied_channel_tx += 1
            # everyone else listens on a rotating channel to learn the network
            sensing_list = cfg.sensing_channels
            for sn in self.sns:
                if sn.node_id in transmitters:
                    continue
                ch = sensing_list[(frame + slot) % len(sensing_list)]
                sn.estimates.update(ch, self.medium.sample(
                    sn.node_id, ch, self.rng_shadow))

        # ground truth and per-frame records
        truly_occupied = {self.pn.channel} if pn_active else set()
        truth_empty = frozenset(set(cfg.sensing_channels) - truly_occupied)
        fusion_correct = None
        if fusion is not None:
            fusion_correct = fusion.empty_channels == truth_empty
        for sn in self.sns:
            self.log.append(metrics.FrameRecord(
                frame=frame,
                node=sn.node_id,
                state=sn.state.value,
                granted_slots=len(sn.grant),
                pd=sn.pd,
                priority_index=psa.priority_index(sn.dt, sn.pd),
                channel=sn.granted_channel(),
                fusion_correct=fusion_correct,
            ))

    def _check_consistency(self, frame: int):
        """All secondaries must agree on fusion and table every frame."""
        fusions = {sn.node_id: sn.last_fusion for sn in self.sns}
        tables = {sn.node_id: sn.last_table for sn in self.sns}
        distinct_f = {f.empty_channels if f else None for f in fusions.values()}
        distinct_t = {
            (tuple(sorted(t.grid.items())), t.unserved) if t else None
            for t in tables.values()
        }
        if len(distinct_f) > 1 or len(distinct_t) > 1:
            self.monitor.consistency_violations += 1
            self.trace.append(f"frame {frame} CONSISTENCY VIOLATION")
        any_sn = self.sns[0] if self.sns else None
        if any_sn is None:
            return None, None
        return any_sn.last_fusion, any_sn.last_table


def run(cfg: ScenarioConfig, seed: int | None = None,
        frames: int | None = None) -> RunResult:
    """Run one scenario to completion; deterministic given (cfg, seed)."""
    return Engine(cfg, seed=seed).run(frames)
