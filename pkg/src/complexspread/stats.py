"""Region labels, KS testing, speed of spread and the minimum reinforcement ratio."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.special import kolmogorov

from .contagion import TrialRecord

# guards float noise in differences of proportions such as 0.35 - 0.30
_EPS = 1e-12


class RegionLabel(enum.IntEnum):
    CLUSTER_ADVANTAGE = 1
    RANDOM_ADVANTAGE = 2
    FULL_EQUAL = 3
    MINIMAL_EQUAL = 4


def _equal_label(mean_clustered: float, mean_random: float, saturation: float) -> RegionLabel:
    if mean_clustered >= saturation - _EPS and mean_random >= saturation - _EPS:
        return RegionLabel.FULL_EQUAL
    return RegionLabel.MINIMAL_EQUAL


def classify_region_margin(mean_clustered: float, mean_random: float, margin: float = 0.05,
                           saturation: float = 0.60) -> RegionLabel:
    diff = mean_clustered - mean_random
    if abs(diff) >= margin - _EPS:
        return RegionLabel.CLUSTER_ADVANTAGE if diff > 0 else RegionLabel.RANDOM_ADVANTAGE
    return _equal_label(mean_clustered, mean_random, saturation)


class KSResult(NamedTuple):
    D: float
    p: float


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> KSResult:
    """Two-sided two-sample KS test with the asymptotic Kolmogorov p-value.

    ``D`` is evaluated at every pooled observation, so tied samples are exact.
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("KS test needs two non-empty samples")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = a.size * b.size / (a.size + b.size)
    return KSResult(d, float(kolmogorov(math.sqrt(en) * d)))


def classify_samples_ks(clustered: Sequence[float], random: Sequence[float], alpha: float = 0.05,
                        saturation: float = 0.60) -> tuple[RegionLabel, KSResult]:
    res = ks_two_sample(clustered, random)
    mc, mr = float(np.mean(clustered)), float(np.mean(random))
    if res.p < alpha and mc != mr:
        label = RegionLabel.CLUSTER_ADVANTAGE if mc > mr else RegionLabel.RANDOM_ADVANTAGE
    else:
        label = _equal_label(mc, mr, saturation)
    return label, res


def time_to_saturation(record: TrialRecord | Sequence[int], fraction: float = 0.60,
                       n: int | None = None) -> Optional[int]:
    """First step at which cumulative adopters reach ``fraction * n``; None if never."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    if isinstance(record, TrialRecord):
        series, n = record.cumulative, record.n
    else:
        series = np.asarray(record)
        if n is None:
            raise ValueError("n is required with a bare series")
    target = math.ceil(fraction * n - 1e-9)
    hits = np.flatnonzero(np.asarray(series) >= target)
    return int(hits[0]) if hits.size else None


# ---------------------------------------------------------------------------
# per-cell summaries
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class ConditionSummary:
    """Trials of one cell on one network condition (a rewiring fraction)."""

    fraction: float
    finals: np.ndarray
    times: list  # time to the sweep's speed fraction, None where never reached
    steps: list
    seeds: list  # per-trial derived rng seeds

    @property
    def trials(self) -> int:
        return len(self.finals)

    @property
    def mean_final(self) -> float:
        return float(np.mean(self.finals)) if len(self.finals) else float("nan")

    def reached_times(self) -> list[int]:
        return [t for t in self.times if t is not None]

    def __eq__(self, other):
        if not isinstance(other, ConditionSummary):
            return NotImplemented
        return (self.fraction == other.fraction and np.array_equal(self.finals, other.finals)
                and self.times == other.times and self.steps == other.steps
                and self.seeds == other.seeds)


@dataclass(eq=True)
class CellSummary:
    index: int
    k: int
    i: int
    T: float
    n: int
    topology: str
    p1: Optional[float] = None
    p2: Optional[float] = None
    m: Optional[float] = None
    sigma: float = 0.0
    speed_fraction: float = 0.60
    conditions: dict = field(default_factory=dict)
    failed: Optional[str] = None

    @property
    def clustered(self) -> ConditionSummary:
        return self.conditions[min(self.conditions)]

    @property
    def random(self) -> ConditionSummary:
        return self.conditions[max(self.conditions)]

    @property
    def mean_clustered(self) -> float:
        return self.clustered.mean_final

    @property
    def mean_random(self) -> float:
        return self.random.mean_final

    def region_margin(self, margin: float = 0.05, saturation: float = 0.60) -> RegionLabel:
        return classify_region_margin(self.mean_clustered, self.mean_random, margin, saturation)


def classify_region_ks(summary: CellSummary, alpha: float = 0.05,
                       saturation: float = 0.60) -> RegionLabel:
    return classify_samples_ks(summary.clustered.finals, summary.random.finals, alpha,
                               saturation)[0]


def region_shares(cells: Iterable[CellSummary], rule: str = "margin", margin: float = 0.05,
                  alpha: float = 0.05, saturation: float = 0.60) -> dict[RegionLabel, float]:
    labels = []
    for cell in cells:
        if cell.failed:
            continue
        if rule == "margin":
            labels.append(cell.region_margin(margin, saturation))
        elif rule == "ks":
            labels.append(classify_region_ks(cell, alpha, saturation))
        else:
            raise ValueError(f"unknown classification rule {rule!r}")
    total = len(labels)
    return {lab: (labels.count(lab) / total if total else 0.0) for lab in RegionLabel}


class SpeedStat(NamedTuple):
    mean: Optional[float]
    reached: int
    trials: int


def mean_time_to_saturation(cond: ConditionSummary, fraction: float) -> SpeedStat:
    """Mean steps to saturation over trials that got there.

    The whole condition is excluded (mean None) when its mean final
    proportion is below ``fraction``.
    """
    reached = cond.reached_times()
    if not reached or cond.mean_final < fraction - _EPS:
        return SpeedStat(None, len(reached), cond.trials)
    return SpeedStat(float(np.mean(reached)), len(reached), cond.trials)


# ---------------------------------------------------------------------------
# minimum p2/p1 ratio with clustered advantage
# ---------------------------------------------------------------------------

class RatioEstimate(NamedTuple):
    estimate: float
    ci_low: float
    ci_high: float
    replicates: int


def bootstrap_min_ratio(cells: Iterable[CellSummary], margin: float = 0.05, subsample: int = 10,
                        reps: int = 1000, rng: np.random.Generator | None = None,
                        statistic: str = "mean") -> Optional[RatioEstimate]:
    """Smallest ``p2/p1`` at which clustered networks outspread random ones by ``margin``.

    Each replicate draws ``subsample`` trials per network type per cell
    (without replacement), compares the subsample means and keeps the
    smallest ratio over qualifying cells. Replicates with no qualifying cell
    are dropped; None if all are.
    """
    if rng is None:
        rng = np.random.default_rng()
    usable = [c for c in cells if not c.failed and c.p1 is not None and c.p1 > 0]
    if not usable:
        return None
    ratios = np.array([c.p2 / c.p1 for c in usable])
    diffs = np.empty((len(usable), reps))
    for row, cell in enumerate(usable):
        means = []
        for cond in (cell.clustered, cell.random):
            if cond.trials < subsample:
                raise ValueError(f"cell {cell.index} has {cond.trials} trials, need {subsample}")
            idx = np.argsort(rng.random((reps, cond.trials)), axis=1)[:, :subsample]
            means.append(np.asarray(cond.finals)[idx].mean(axis=1))
        diffs[row] = means[0] - means[1]
    qualifies = diffs >= margin - _EPS
    masked = np.where(qualifies, ratios[:, None], np.inf)
    minima = masked.min(axis=0)
    minima = minima[np.isfinite(minima)]
    if minima.size == 0:
        return None
    centre = float(np.mean(minima)) if statistic == "mean" else float(np.median(minima))
    lo, hi = np.percentile(minima, [2.5, 97.5])
    return RatioEstimate(centre, float(lo), float(hi), int(minima.size))
