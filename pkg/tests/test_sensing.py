import math
from itertools import permutations

import numpy as np
import pytest

from ddsat import sensing
from ddsat.sensing import (
    DetectionConfig, EmptyInput, FusionResult, SensingReport, Verdict,
    detect, fuse_majority, sense_all,
)

CFG = DetectionConfig(threshold_dbm=-60.0)


def majority_prob(m, q):
    """Independent binomial oracle: P(strict majority of m is correct)."""
    return sum(math.comb(m, i) * q**i * (1 - q)**(m - i)
               for i in range(m // 2 + 1, m + 1))


def normal_tail(x):
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def report(node, **verdicts):
    return SensingReport(node, {int(k[2:]): v for k, v in verdicts.items()})


def test_detect_above_threshold():
    assert detect(-55.0, CFG) is Verdict.OCCUPIED


def test_detect_below_threshold():
    assert detect(-70.0, CFG) is Verdict.EMPTY


def test_detect_boundary_is_empty():
    assert detect(-60.0, CFG) is Verdict.EMPTY


def test_fuse_two_of_three():
    reports = [report(1, ch2=Verdict.EMPTY), report(2, ch2=Verdict.EMPTY),
               report(3, ch2=Verdict.OCCUPIED)]
    assert fuse_majority(reports, [2]).empty_channels == frozenset({2})


def test_fuse_tie_is_occupied():
    reports = [report(1, ch2=Verdict.EMPTY), report(2, ch2=Verdict.OCCUPIED)]
    assert fuse_majority(reports, [2]).empty_channels == frozenset()


def test_fuse_empty_input():
    with pytest.raises(EmptyInput):
        fuse_majority([], [2])


def test_fuse_majority_matches_binomial_oracle():
    # five cooperators, each independently right with probability 0.8
    q, m, trials = 0.8, 5, 10_000
    rng = np.random.default_rng(42)
    hits = 0
    for _ in range(trials):
        reports = [
            report(i, ch2=Verdict.EMPTY if rng.random() < q else Verdict.OCCUPIED)
            for i in range(m)
        ]
        if 2 in fuse_majority(reports, [2]).empty_channels:
            hits += 1
    expected = majority_prob(m, q)
    assert expected == pytest.approx(0.94208, abs=1e-4)
    assert hits / trials == pytest.approx(expected, abs=0.02)


def test_fusion_with_three_nodes_beats_one():
    q, trials = 0.8, 10_000
    rng = np.random.default_rng(3)

    def accuracy(m):
        hits = 0
        for _ in range(trials):
            reports = [
                report(i, ch2=Verdict.EMPTY if rng.random() < q else Verdict.OCCUPIED)
                for i in range(m)
            ]
            if 2 in fuse_majority(reports, [2]).empty_channels:
                hits += 1
        return hits / trials

    acc1, acc3 = accuracy(1), accuracy(3)
    assert acc3 > acc1
    assert acc1 == pytest.approx(q, abs=0.02)
    assert acc3 == pytest.approx(majority_prob(3, q), abs=0.02)


def test_fuse_monotone_in_empty_votes():
    base = [report(1, ch2=Verdict.EMPTY), report(2, ch2=Verdict.OCCUPIED)]
    extra = report(3, ch2=Verdict.EMPTY)
    before = fuse_majority(base, [2]).empty_channels
    after = fuse_majority(base + [extra], [2]).empty_channels
    assert before <= after


def test_fuse_permutation_invariant():
    reports = [report(1, ch2=Verdict.EMPTY, ch3=Verdict.OCCUPIED),
               report(2, ch2=Verdict.EMPTY, ch3=Verdict.EMPTY),
               report(3, ch2=Verdict.OCCUPIED, ch3=Verdict.EMPTY)]
    results = {fuse_majority(list(p), [2, 3]).empty_channels
               for p in permutations(reports)}
    assert len(results) == 1


def flat_medium(levels):
    return lambda node, ch, rng: levels[ch] + rng.normal(0.0, 0.0)


def test_sense_all_quiet_network():
    rng = np.random.default_rng(0)
    medium = flat_medium({2: -90.0, 3: -90.0, 4: -90.0})
    rep = sense_all(1, [2, 3, 4], medium, CFG, rng)
    assert all(v is Verdict.EMPTY for v in rep.verdicts.values())


def test_sense_all_primary_on_channel_4():
    rng = np.random.default_rng(0)
    medium = flat_medium({2: -90.0, 3: -90.0, 4: -50.0})
    rep = sense_all(1, [2, 3, 4], medium, CFG, rng)
    assert rep.verdicts[4] is Verdict.OCCUPIED
    assert rep.verdicts[2] is Verdict.EMPTY
    assert rep.verdicts[3] is Verdict.EMPTY


def test_sense_all_false_alarm_rate():
    # noise floor -65 dBm under 15 dB shadowing against a -60 dBm threshold
    rng = np.random.default_rng(11)
    sigma, floor, trials = 15.0, -65.0, 10_000
    medium = lambda node, ch, r: floor + r.normal(0.0, sigma)
    alarms = sum(
        sense_all(1, [2], medium, CFG, rng).verdicts[2] is Verdict.OCCUPIED
        for _ in range(trials)
    )
    expected = normal_tail((CFG.threshold_dbm - floor) / sigma)
    assert expected == pytest.approx(0.36944, abs=1e-4)
    assert alarms / trials == pytest.approx(expected, abs=0.02)
