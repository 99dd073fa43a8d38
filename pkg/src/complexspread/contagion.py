"""Adoption rules, seeding, and the synchronous diffusion process."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from .netgen import Kind, Network

UNBOUNDED = math.inf


@dataclass(frozen=True)
class StepRule:
    """Per-exposure probability 0 / ``p1`` / ``p2`` by distinct-contact count.

    ``sigma`` > 0 replaces each draw's probability with a clipped normal
    sample centred on the rule's value.
    """

    p1: float
    p2: float
    i: int = 2
    sigma: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise ValueError(f"p1, p2 must lie in [0, 1], got {self.p1}, {self.p2}")
        if int(self.i) != self.i or self.i < 1:
            raise ValueError(f"threshold i must be an integer >= 1, got {self.i}")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


@dataclass(frozen=True)
class LogisticRule:
    """``p(c) = 1 / (1 + exp((2 - c) m))`` for c >= 1, and 0 at c = 0."""

    m: float

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"slope m must be > 0, got {self.m}")

    @property
    def sigma(self) -> float:
        return 0.0


AdoptionRule = Union[StepRule, LogisticRule]


def adoption_probability(rule: AdoptionRule, c: int) -> float:
    if c < 0:
        raise ValueError("contact count must be >= 0")
    if c == 0:
        return 0.0
    if isinstance(rule, StepRule):
        return rule.p1 if c < rule.i else rule.p2
    return 1.0 / (1.0 + math.exp((2 - c) * rule.m))


def probability_table(rule: AdoptionRule, c_max: int) -> np.ndarray:
    return np.array([adoption_probability(rule, c) for c in range(c_max + 1)])


class Seeding(str, enum.Enum):
    NEIGHBOR = "neighbor"
    RANDOM = "random"
    ADJACENT = "adjacent"


@dataclass(frozen=True)
class SimConfig:
    T: float = 1
    seeding: Seeding = Seeding.NEIGHBOR
    max_steps: Optional[int] = None
    rng_seed: Optional[int] = None
    n_seeds: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "seeding", Seeding(self.seeding))
        if self.T != UNBOUNDED and (int(self.T) != self.T or self.T < 1):
            raise ValueError(f"T must be a positive integer or unbounded, got {self.T}")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.n_seeds is not None and self.n_seeds < 1:
            raise ValueError("n_seeds must be >= 1")

    def seed_count(self, rule: AdoptionRule) -> int:
        if self.n_seeds is not None:
            return self.n_seeds
        return rule.i if isinstance(rule, StepRule) else 2

    def steps_cap(self, n: int) -> int:
        return self.max_steps if self.max_steps is not None else 10 * n


def kernel_T(T: float) -> int:
    return -1 if T == UNBOUNDED else int(T)


@dataclass(eq=False)
class TrialRecord:
    n: int
    cumulative: np.ndarray
    influential: np.ndarray
    seeds: tuple
    rng_seed: Optional[int] = None
    hit_max_steps: bool = False

    @property
    def steps(self) -> int:
        return len(self.cumulative) - 1

    @property
    def final_adopters(self) -> int:
        return int(self.cumulative[-1])

    @property
    def final_proportion(self) -> float:
        return self.final_adopters / self.n

    def __eq__(self, other):
        if not isinstance(other, TrialRecord):
            return NotImplemented
        return (self.n == other.n and self.seeds == other.seeds
                and self.rng_seed == other.rng_seed
                and self.hit_max_steps == other.hit_max_steps
                and np.array_equal(self.cumulative, other.cumulative)
                and np.array_equal(self.influential, other.influential))

    def write_timeseries(self, path: str | Path) -> None:
        """One JSON object per line: step, cumulative_adopters, influential_count."""
        with open(path, "w") as fh:
            for t, (c, i) in enumerate(zip(self.cumulative, self.influential)):
                fh.write(json.dumps({"step": t, "cumulative_adopters": int(c),
                                     "influential_count": int(i)}) + "\n")


def read_timeseries(path: str | Path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def select_seeds(net: Network, strategy: Seeding | str, count: int,
                 rng: np.random.Generator) -> np.ndarray:
    strategy = Seeding(strategy)
    if count < 1 or count > net.n:
        raise ValueError(f"cannot pick {count} seeds from {net.n} nodes")
    if strategy is Seeding.NEIGHBOR:
        if count - 1 > net.k:
            raise ValueError(f"neighbour seeding needs count - 1 <= k, got {count}")
        v = int(rng.integers(net.n))
        others = rng.choice(net.adjacency[v], size=count - 1, replace=False)
        return np.concatenate([[v], others]).astype(np.int64)
    if strategy is Seeding.RANDOM:
        return rng.choice(net.n, size=count, replace=False).astype(np.int64)
    if net.topology.kind is not Kind.RING:
        raise ValueError("adjacent seeding is only defined on ring lattices")
    start = int(rng.integers(net.n))
    return (start + np.arange(count)) % net.n


def run_trial(net: Network, rule: AdoptionRule, cfg: SimConfig,
              rng: np.random.Generator | None = None,
              seeds: Sequence[int] | None = None) -> TrialRecord:
    """Simulate one diffusion from seeding until no influential or no susceptible nodes remain."""
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    if seeds is None:
        seeds = select_seeds(net, cfg.seeding, cfg.seed_count(rule), rng)
    seeds = np.asarray(seeds, dtype=np.int64)
    if len(np.unique(seeds)) != len(seeds):
        raise ValueError("seed nodes must be distinct")
    cap = cfg.steps_cap(net.n)
    cum, infl, steps = _kernels.trial_kernel(
        net.adjacency, probability_table(rule, net.k), float(rule.sigma),
        kernel_T(cfg.T), seeds, cap, False, rng)
    hit = steps == cap and infl[-1] > 0 and cum[-1] < net.n
    return TrialRecord(net.n, cum, infl, tuple(sorted(int(s) for s in seeds)),
                       cfg.rng_seed, bool(hit))


def initial_adopters(net: Network, rule: AdoptionRule, T: int, runs: int,
                     rng: np.random.Generator, strategy: Seeding | str = Seeding.RANDOM,
                     n_seeds: int | None = None,
                     seeds: Sequence[int] | None = None) -> np.ndarray:
    """Adopters produced by the seeds alone during their ``T`` influential steps.

    Adopters never become influential here. Returns one count per run.
    With explicit ``seeds`` the same set is used for every run.
    """
    if T == UNBOUNDED or T < 1:
        raise ValueError("initial adopters need a finite T >= 1")
    if seeds is not None:
        rows = np.tile(np.asarray(seeds, dtype=np.int64), (runs, 1))
    else:
        count = n_seeds if n_seeds is not None else (rule.i if isinstance(rule, StepRule) else 2)
        rows = np.array([select_seeds(net, strategy, count, rng) for _ in range(runs)],
                        dtype=np.int64)
    return _kernels.seed_adopters_batch(net.adjacency, probability_table(rule, net.k),
                                        float(rule.sigma), int(T), rows, rng)
