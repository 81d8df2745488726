"""Per-frame measurement records and the three headline metrics:
throughput (granted data slots per frame), Jain fairness, and cooperative
sensing accuracy. CSV output is byte-stable for identical logs."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

DEFAULT_WARMUP_FRAMES = 10

FRAMES_HEADER = ["frame", "node", "granted_slots", "pd", "priority_index",
                 "channel", "fusion_correct"]
SUMMARY_HEADER = ["node", "mean_throughput", "jain_contribution"]
SWEEP_HEADER = ["param", "value", "metric", "mean", "ci95"]


class EmptyLog(ValueError):
    pass


class AllZero(ValueError):
    pass


@dataclass(frozen=True)
class FrameRecord:
    frame: int
    node: int
    state: str
    granted_slots: int
    pd: int
    priority_index: int
    channel: int | None
    fusion_correct: bool | None


@dataclass
class MetricsLog:
    seed: int
    scenario_hash: str
    records: list[FrameRecord] = field(default_factory=list)

    def append(self, record: FrameRecord) -> None:
        self.records.append(record)

    def nodes(self) -> list[int]:
        return sorted({r.node for r in self.records})


def throughput(log: MetricsLog, node: int,
               warmup: int = DEFAULT_WARMUP_FRAMES) -> float:
    """Mean granted slots per frame for one node, after the warm-up."""
    samples = [r.granted_slots for r in log.records
               if r.node == node and r.frame >= warmup]
    if not samples:
        raise EmptyLog(f"no records for node {node} after frame {warmup}")
    return sum(samples) / len(samples)


def jain_index(values) -> float:
    """Jain's fairness index (sum x)^2 / (n * sum x^2), in (0, 1]."""
    xs = list(values)
    if not xs:
        raise EmptyLog("no values")
    if any(x < 0 for x in xs):
        raise ValueError("values must be non-negative")
    square_sum = sum(x * x for x in xs)
    if square_sum == 0:
        raise AllZero("all values are zero")
    return sum(xs) ** 2 / (len(xs) * square_sum)


def sensing_accuracy(log: MetricsLog, warmup: int = 0) -> float:
    """Fraction of frames whose fused empty set matched ground truth.

    Correctness is exact-set equality; frames with no fusion (nothing
    heard on the CCC) are skipped.
    """
    by_frame: dict[int, bool] = {}
    for r in log.records:
        if r.frame >= warmup and r.fusion_correct is not None:
            by_frame[r.frame] = r.fusion_correct
    if not by_frame:
        raise EmptyLog("no frames carry a fusion verdict")
    return sum(by_frame.values()) / len(by_frame)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _render_csv(header: list[str], rows, meta: str | None = None) -> str:
    buf = io.StringIO()
    if meta:
        buf.write(f"# {meta}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_frames_csv(log: MetricsLog) -> str:
    rows = [
        (r.frame, r.node, r.granted_slots, r.pd, r.priority_index,
         r.channel, r.fusion_correct)
        for r in sorted(log.records, key=lambda r: (r.frame, r.node))
    ]
    meta = f"seed={log.seed} scenario={log.scenario_hash}"
    return _render_csv(FRAMES_HEADER, rows, meta)


def render_summary_csv(log: MetricsLog,
                       warmup: int = DEFAULT_WARMUP_FRAMES) -> str:
    nodes = log.nodes()
    tps = {n: throughput(log, n, warmup) for n in nodes}
    total = sum(tps.values())
    rows = []
    for n in nodes:
        share = tps[n] * len(nodes) / total if total else 0.0
        rows.append((n, tps[n], share))
    meta = f"seed={log.seed} scenario={log.scenario_hash}"
    return _render_csv(SUMMARY_HEADER, rows, meta)


def render_sweep_csv(rows, meta: str | None = None) -> str:
    return _render_csv(SWEEP_HEADER, rows, meta)


def write_csv(text: str, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def parse_frames_csv(text: str) -> list[FrameRecord]:
    """Inverse of render_frames_csv for the written fields (state omitted)."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    records = []
    for row in reader:
        records.append(FrameRecord(
            frame=int(row["frame"]),
            node=int(row["node"]),
            state="",
            granted_slots=int(row["granted_slots"]),
            pd=int(row["pd"]),
            priority_index=int(row["priority_index"]),
            channel=int(row["channel"]) if row["channel"] else None,
            fusion_correct=(bool(int(row["fusion_correct"]))
                            if row["fusion_correct"] else None),
        ))
    return records
