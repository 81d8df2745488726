"""Priority Scheduling Algorithm: priority index, channel preference
estimation from received power, and the all-or-nothing channel/slot
allocation every secondary runs independently at the end of the DDSAT
state.

The priority index is DT + PD. PD counts frames a node went unserved and
is NOT reset when a grant lands: keeping the accumulated count is what
makes the over-subscribed schedule rotate fairly instead of pinning the
lowest node id to a permanent win (see the starvation tests).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import CCC_CHANNEL

PRIORITY_MAX = 0xFFFF

# Unexplored channels report this optimistic received power so they get
# tried before the estimator has any samples.
OPTIMISTIC_ESTIMATE_DBM = 0.0
EWMA_ALPHA = 0.25

FREE = None


class TooFewCandidates(ValueError):
    pass


class CccChannel(ValueError):
    pass


class DuplicateNode(ValueError):
    pass


def priority_index(dt: int, pd: int) -> int:
    """DT + PD, saturating at the 16-bit wire field."""
    if dt < 0 or pd < 0:
        raise ValueError("dt and pd must be non-negative")
    return min(dt + pd, PRIORITY_MAX)


def update_pd(pd: int, served: bool) -> int:
    """Advance the starvation counter after one allocation round.

    Unserved nodes gain one; served nodes keep their count (saturating),
    which preserves long-run rotation under contention.
    """
    if served:
        return pd
    return min(pd + 1, PRIORITY_MAX)


@dataclass
class ChannelEstimates:
    """Per-channel EWMA of measured received power, in dBm."""

    means: dict[int, float] = field(default_factory=dict)
    counts: dict[int, int] = field(default_factory=dict)

    def estimate(self, channel: int) -> float:
        return self.means.get(channel, OPTIMISTIC_ESTIMATE_DBM)

    def update(self, channel: int, measured_dbm: float) -> None:
        """First sample replaces the optimistic default; later samples EWMA in."""
        if channel == CCC_CHANNEL:
            raise CccChannel("no estimates for the control channel")
        if channel in self.means:
            old = self.means[channel]
            self.means[channel] = (1 - EWMA_ALPHA) * old + EWMA_ALPHA * measured_dbm
            self.counts[channel] += 1
        else:
            self.means[channel] = measured_dbm
            self.counts[channel] = 1


def preferred_channels(est: ChannelEstimates, candidates) -> tuple[int, int]:
    """The two candidates with the highest estimated received power.

    Ties break toward the lower channel index. Raises TooFewCandidates
    below two candidates; callers fall back to a (c, None) pair.
    """
    cands = sorted(candidates)
    if CCC_CHANNEL in cands:
        raise CccChannel("the control channel is never a data candidate")
    if len(cands) < 2:
        raise TooFewCandidates(f"need two candidates, got {len(cands)}")
    ranked = sorted(cands, key=lambda ch: (-est.estimate(ch), ch))
    return ranked[0], ranked[1]


@dataclass(frozen=True)
class SlotRequest:
    node: int
    priority_index: int
    requested_slots: int
    preferred: tuple[int, int | None]


@dataclass(frozen=True)
class AllocationTable:
    """(channel, data slot) grid with at most one owner per cell."""

    grid: dict[tuple[int, int], int]
    unserved: frozenset[int]

    def slots_of(self, node: int) -> list[tuple[int, int]]:
        return sorted(cell for cell, owner in self.grid.items() if owner == node)

    def channel_of(self, node: int) -> int | None:
        for (ch, _slot), owner in self.grid.items():
            if owner == node:
                return ch
        return None


def allocate(requests: list[SlotRequest], empty_channels, slots_per_channel: int) -> AllocationTable:
    """Grant channels and data slots by descending priority index.

    Requests are processed in descending priority, ties toward the lower
    node id. Each node gets all of its requested slots contiguously from
    the lowest free index on its first preferred channel, failing that the
    second, failing that any remaining empty channel in ascending order.
    Nodes that fit nowhere are left unserved; there are no partial grants.
    """
    ids = [r.node for r in requests]
    if len(set(ids)) != len(ids):
        raise DuplicateNode("duplicate node id in request set")
    channels = sorted(ch for ch in empty_channels if ch != CCC_CHANNEL)
    next_free = {ch: 0 for ch in channels}
    grid: dict[tuple[int, int], int] = {}
    unserved = set()
    for req in sorted(requests, key=lambda r: (-r.priority_index, r.node)):
        prefs = [ch for ch in req.preferred if ch is not None and ch in next_free]
        ordered = prefs + [ch for ch in channels if ch not in prefs]
        for ch in ordered:
            start = next_free[ch]
            if slots_per_channel - start >= req.requested_slots:
                for s in range(start, start + req.requested_slots):
                    grid[(ch, s)] = req.node
                next_free[ch] = start + req.requested_slots
                break
        else:
            unserved.add(req.node)
    return AllocationTable(grid=grid, unserved=frozenset(unserved))
