"""Energy detection and cooperative majority fusion.

A channel is declared occupied when the sampled received power strictly
exceeds the detection threshold. Per-node verdicts are fused with a
majority rule: a channel counts as empty only when strictly more than half
of the contributing reports say so, so an even split protects the primary.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .core import CCC_CHANNEL


class Verdict(enum.Enum):
    EMPTY = "empty"
    OCCUPIED = "occupied"


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class DetectionConfig:
    threshold_dbm: float = -60.0


@dataclass(frozen=True)
class SensingReport:
    node: int
    verdicts: dict[int, Verdict] = field(default_factory=dict)


@dataclass(frozen=True)
class FusionResult:
    empty_channels: frozenset[int]


def detect(measured_power_dbm: float, cfg: DetectionConfig) -> Verdict:
    """Occupied iff measured power is strictly above the threshold."""
    if measured_power_dbm > cfg.threshold_dbm:
        return Verdict.OCCUPIED
    return Verdict.EMPTY


def sense_all(node: int, channels, medium_view, cfg: DetectionConfig, rng) -> SensingReport:
    """One detect() verdict per channel from that slot's power samples.

    ``medium_view`` is any callable (receiver, channel, rng) -> dBm.
    """
    verdicts = {
        ch: detect(medium_view(node, ch, rng), cfg) for ch in channels
    }
    return SensingReport(node=node, verdicts=verdicts)


def fuse_majority(reports: list[SensingReport], channels) -> FusionResult:
    """Majority vote per channel over the given reports.

    A channel is fused empty only when strictly more than half of the
    reports mark it empty; exact ties stay occupied.
    """
    if not reports:
        raise EmptyInput("no sensing reports to fuse")
    empty = set()
    for ch in channels:
        if ch == CCC_CHANNEL:
            raise ValueError("CCC is never sensed")
        votes = sum(
            1 for r in reports if r.verdicts.get(ch) is Verdict.EMPTY
        )
        if 2 * votes > len(reports):
            empty.add(ch)
    return FusionResult(empty_channels=frozenset(empty))
