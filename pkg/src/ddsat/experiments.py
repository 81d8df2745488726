"""Experiment drivers behind the CLI: the node-count sweep (throughput and
fairness curves) and the cooperative-sensing accuracy Monte-Carlo."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import metrics, sensing, sim
from .scenario import PrimaryConfig, ScenarioConfig, SecondaryConfig, RadioConfig


@dataclass(frozen=True)
class SweepPoint:
    param: str
    value: float
    metric: str
    mean: float
    ci95: float


def _mean_ci(values) -> tuple[float, float]:
    xs = list(values)
    mean = sum(xs) / len(xs)
    if len(xs) < 2:
        return mean, 0.0
    sd = math.sqrt(sum((x - mean) ** 2 for x in xs) / (len(xs) - 1))
    return mean, 1.96 * sd / math.sqrt(len(xs))


def reference_scenario(num_secondaries: int, frames: int = 300,
                       seed: int = 0) -> ScenarioConfig:
    """Perfect-sensing benchmark: always-on primary on channel 4, every
    secondary requesting a full data state."""
    return ScenarioConfig(
        num_channels=4,
        slots_per_state=4,
        frames=frames,
        seed=seed,
        secondaries=[SecondaryConfig(node_id=i, requested_slots=4)
                     for i in range(1, num_secondaries + 1)],
        primary=PrimaryConfig(channel=4, activity="always_on", power_dbm=-50.0),
        radio=RadioConfig(noise_floor_dbm=-90.0, shadow_sigma_db=0.0,
                          threshold_dbm=-60.0),
    )


def sweep_nodes(min_nodes: int, max_nodes: int, frames: int = 300,
                seeds: int = 5, base_seed: int = 100,
                warmup: int = metrics.DEFAULT_WARMUP_FRAMES) -> list[SweepPoint]:
    """Per-node throughput and Jain index versus network size."""
    points = []
    for k in range(min_nodes, max_nodes + 1):
        per_seed_tp = []
        per_seed_jain = []
        for i in range(seeds):
            cfg = reference_scenario(k, frames=frames, seed=base_seed + i)
            result = sim.run(cfg)
            tps = [metrics.throughput(result.log, n, warmup)
                   for n in result.log.nodes()]
            per_seed_tp.append(sum(tps) / len(tps))
            per_seed_jain.append(metrics.jain_index(tps))
        mean_tp, ci_tp = _mean_ci(per_seed_tp)
        mean_j, ci_j = _mean_ci(per_seed_jain)
        points.append(SweepPoint("num_secondaries", k, "mean_throughput", mean_tp, ci_tp))
        points.append(SweepPoint("num_secondaries", k, "jain_index", mean_j, ci_j))
    return points


def fused_sensing_accuracy(m_nodes: int, sigma_db: float, trials: int,
                           seed: int = 0, threshold_dbm: float = -60.0,
                           primary_power_dbm: float = -50.0,
                           noise_floor_dbm: float = -90.0,
                           channels: tuple[int, ...] = (2, 3, 4),
                           primary_channel: int = 4) -> float:
    """Monte-Carlo estimate of exact-set fused accuracy for m cooperators.

    Each trial draws one shadowed power sample per (node, channel), runs
    the real detect + majority-fusion pipeline, and scores an exact match
    of the fused empty set against ground truth.
    """
    rng = np.random.default_rng(seed)
    cfg = sensing.DetectionConfig(threshold_dbm)
    truth = frozenset(ch for ch in channels if ch != primary_channel)
    hits = 0
    for _ in range(trials):
        reports = []
        for node in range(1, m_nodes + 1):
            verdicts = {}
            for ch in channels:
                mean = primary_power_dbm if ch == primary_channel else noise_floor_dbm
                verdicts[ch] = sensing.detect(
                    mean + rng.normal(0.0, sigma_db), cfg)
            reports.append(sensing.SensingReport(node=node, verdicts=verdicts))
        fused = sensing.fuse_majority(reports, channels)
        if fused.empty_channels == truth:
            hits += 1
    return hits / trials


def sweep_sensing(node_counts, sigma_db: float, trials: int = 10_000,
                  seed: int = 0, threshold_dbm: float = -60.0,
                  primary_power_dbm: float = -50.0,
                  noise_floor_dbm: float = -90.0) -> list[SweepPoint]:
    """Fused sensing accuracy versus the number of cooperating nodes."""
    points = []
    for m in node_counts:
        if m < 1:
            raise ValueError("node counts must be >= 1")
        acc = fused_sensing_accuracy(
            m, sigma_db, trials, seed=seed + m,
            threshold_dbm=threshold_dbm,
            primary_power_dbm=primary_power_dbm,
            noise_floor_dbm=noise_floor_dbm)
        # binomial standard error of the Monte-Carlo estimate
        ci = 1.96 * math.sqrt(max(acc * (1 - acc), 1e-12) / trials)
        points.append(SweepPoint("cooperating_nodes", m, "fused_accuracy", acc, ci))
    return points


def sweep_rows(points: list[SweepPoint]):
    return [(p.param, p.value, p.metric, p.mean, p.ci95) for p in points]
