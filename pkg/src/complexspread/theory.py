"""Closed-form adoption probabilities, initial-adopter counts and spread boundaries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .contagion import AdoptionRule, adoption_probability


def p1_star(k: int, T: float) -> float:
    """Base rate above which spread on a random regular network is sustained."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if T == math.inf:
        return 0.0
    return 1.0 - (1.0 - 1.0 / (k - 1)) ** (1.0 / T)


def cumulative_adoption_F(a: int, p1: float, p2: float, i: int, T: int) -> float:
    """Probability of adopting from exactly ``a`` seeds, each influential for ``T`` steps."""
    if not 1 <= a <= i:
        raise ValueError(f"a must lie in [1, i], got a={a}, i={i}")
    if a < i:
        return 1.0 - (1.0 - p1) ** (T * a)
    return 1.0 - (1.0 - p1) ** (i - 1) * (1.0 - p2) ** (T * i - (i - 1))


def cumulative_curve(rule: AdoptionRule, c_max: int) -> list[tuple[int, float]]:
    """``F(c) = 1 - prod_{j<=c} (1 - p(j))``, one new neighbour per exposure."""
    if c_max < 1:
        raise ValueError("c_max must be >= 1")
    out = []
    survive = 1.0
    for c in range(1, c_max + 1):
        survive *= 1.0 - adoption_probability(rule, c)
        out.append((c, 1.0 - survive))
    return out


def expected_initial_adopters_random(p1: float, k: int, i: int, T: int) -> float:
    return (1.0 - (1.0 - p1) ** T) * i * k


def _below_threshold_sum(p1: float, i: int, T: int) -> float:
    return 2.0 * sum(1.0 - (1.0 - p1) ** (T * a) for a in range(1, i))


def expected_initial_adopters_clustered(p1: float, p2: float, k: int, i: int, T: int) -> float:
    """Ring lattice with ``i`` adjacent seeds."""
    band = k - 2 * i + 2
    if band < 0:
        raise ValueError(f"need k >= 2i - 2, got k={k}, i={i}")
    full = 1.0 - (1.0 - p1) ** (i - 1) * (1.0 - p2) ** (T * i - i + 1)
    return _below_threshold_sum(p1, i, T) + full * band


class BoundaryValue(NamedTuple):
    p2: float
    reachable: bool


def clustered_boundary_p2(p1: float, k: int, i: int, T: int) -> BoundaryValue:
    """``p2`` at which the clustered initial-adopter count equals ``i``.

    Clamped to 0 when the seeds already produce ``i`` adopters at ``p2 = 0``.
    When even ``p2 = 1`` falls short the result is ``(inf, False)``.
    """
    if not 0.0 <= p1 < 1.0:
        raise ValueError("p1 must lie in [0, 1)")
    band = k - 2 * i + 2
    if band < 0:
        raise ValueError(f"need k >= 2i - 2, got k={k}, i={i}")
    if expected_initial_adopters_clustered(p1, 0.0, k, i, T) >= i:
        return BoundaryValue(0.0, True)
    if band == 0 or expected_initial_adopters_clustered(p1, 1.0, k, i, T) < i:
        return BoundaryValue(math.inf, False)
    s = _below_threshold_sum(p1, i, T)
    ratio = (s - 3 * i + k + 2) / (band * (1.0 - p1) ** (i - 1))
    p2 = 1.0 - ratio ** (1.0 / (T * i - i + 1))
    return BoundaryValue(min(max(p2, 0.0), 1.0), True)


@dataclass
class BoundaryCurve:
    network_type: str
    k: int
    i: int
    T: float
    samples: list[tuple[float, float, bool]] = field(default_factory=list)

    def rows(self) -> Iterable[dict]:
        for p1, p2, ok in self.samples:
            yield {"network_type": self.network_type, "k": self.k, "i": self.i, "T": self.T,
                   "p1": p1, "p2_star": p2, "reachable": ok}


def clustered_boundary_curve(k: int, i: int, T: int, p1_values: Iterable[float]) -> BoundaryCurve:
    curve = BoundaryCurve("clustered", k, i, T)
    for p1 in p1_values:
        if p1 >= 1.0:
            continue
        value = clustered_boundary_p2(float(p1), k, i, T)
        curve.samples.append((float(p1), value.p2, value.reachable))
    return curve


def random_boundary_curve(k: int, i: int, T: float, p2_values: Iterable[float]) -> BoundaryCurve:
    """Vertical line at ``p1 = p1*``, independent of ``p2``."""
    x = p1_star(k, T)
    return BoundaryCurve("random", k, i, T, [(x, float(p2), True) for p2 in p2_values])


def grid(step: float, start: float = 0.0, stop: float = 1.0) -> np.ndarray:
    count = int(round((stop - start) / step))
    return np.round(start + step * np.arange(count + 1), 10)
