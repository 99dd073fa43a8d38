"""Parameter sweeps over (p1, p2) or logistic slopes with reproducible seeding."""

from __future__ import annotations

import hashlib
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Optional

import numpy as np

from .contagion import LogisticRule, SimConfig, StepRule, run_trial
from .netgen import Kind, Network, build_lattice, rewire, swaps_for_fraction
from .stats import CellSummary, ConditionSummary, time_to_saturation
from .theory import grid

log = logging.getLogger(__name__)


@dataclass
class SweepSpec:
    label: str = "sweep"
    rule: str = "step"
    p1_grid: tuple = (0.0, 1.0, 0.02)
    p2_grid: tuple = (0.0, 1.0, 0.02)
    restrict_p1_le_p2: bool = True
    points: Optional[tuple] = None  # explicit (p1, p2) cells; overrides the grids
    m_values: tuple = ()
    k: int = 8
    i: int = 2
    T: float = 1
    topology: str = "ring"
    rows: Optional[int] = None
    cols: Optional[int] = None
    n: Optional[int] = None
    rewire_fractions: tuple = (0.0, 1.0)
    trials: int = 100
    seeding: str = "neighbor"
    n_seeds: Optional[int] = None
    sigma: float = 0.0
    speed_fraction: float = 0.60
    max_steps: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        self.p1_grid = tuple(self.p1_grid)
        self.p2_grid = tuple(self.p2_grid)
        if self.points is not None:
            self.points = tuple(tuple(float(x) for x in p) for p in self.points)
        self.m_values = tuple(float(m) for m in self.m_values)
        self.rewire_fractions = tuple(sorted(float(f) for f in self.rewire_fractions))
        if isinstance(self.T, str):
            self.T = math.inf if self.T in ("inf", "unbounded") else int(self.T)
        self.validate()

    def validate(self) -> None:
        if self.rule not in ("step", "logistic"):
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for lo, hi, step in (self.p1_grid, self.p2_grid):
            if not (0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0 and step > 0):
                raise ValueError("grids must lie within [0, 1] with a positive step")
        for f in self.rewire_fractions:
            if not 0.0 <= f <= 1.0:
                raise ValueError("rewire fractions must lie in [0, 1]")
        if not self.rewire_fractions:
            raise ValueError("need at least one rewire fraction")
        Kind(self.topology)
        if self.topology == "moore" and self.k != 8:
            raise ValueError("Moore lattices have k = 8")
        if self.topology == "hex" and self.k != 6:
            raise ValueError("hex lattices have k = 6")

    # -- derived ----------------------------------------------------------

    @property
    def network_size(self) -> int:
        if self.topology == "ring":
            return self.n if self.n is not None else 250 * self.k
        rows, cols = self.lattice_dims()
        return rows * cols

    def lattice_dims(self) -> tuple[int, int]:
        if self.rows is not None and self.cols is not None:
            return self.rows, self.cols
        n = self.n if self.n is not None else 250 * self.k
        rows = max(d for d in range(3, math.isqrt(n) + 1) if n % d == 0)
        return rows, n // rows

    def build_network(self) -> Network:
        if self.topology == "ring":
            return build_lattice(Kind.RING, n=self.network_size, k=self.k)
        rows, cols = self.lattice_dims()
        return build_lattice(self.topology, rows=rows, cols=cols)

    def cells(self) -> list[dict]:
        """Cell coordinates in deterministic order (p1 outer, p2 inner)."""
        if self.rule == "logistic":
            return [{"m": m} for m in self.m_values]
        if self.points is not None:
            return [{"p1": p1, "p2": p2} for p1, p2 in self.points]
        out = []
        for p1 in grid(self.p1_grid[2], self.p1_grid[0], self.p1_grid[1]):
            for p2 in grid(self.p2_grid[2], self.p2_grid[0], self.p2_grid[1]):
                if self.restrict_p1_le_p2 and p1 > p2 + 1e-12:
                    continue
                out.append({"p1": float(p1), "p2": float(p2)})
        return out

    def rule_for(self, cell: dict):
        if self.rule == "logistic":
            return LogisticRule(cell["m"])
        return StepRule(cell["p1"], cell["p2"], self.i, self.sigma)

    def sim_config(self) -> SimConfig:
        return SimConfig(T=self.T, seeding=self.seeding, max_steps=self.max_steps,
                         n_seeds=self.n_seeds)

    def cell_key(self, cell: dict) -> str:
        coords = ";".join(f"{name}={cell[name]!r}" for name in sorted(cell))
        return (f"{coords};k={self.k};i={self.i};T={self.T!r};sigma={self.sigma!r};"
                f"topology={self.topology};n={self.network_size};seeding={self.seeding};"
                f"seeds={self.n_seeds};rule={self.rule}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["T"] = "unbounded" if self.T == math.inf else self.T
        for name in ("p1_grid", "p2_grid", "m_values", "rewire_fractions"):
            d[name] = list(d[name])
        if d["points"] is not None:
            d["points"] = [list(p) for p in d["points"]]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown sweep fields: {sorted(unknown)}")
        return cls(**data)


def derive_seed(master: int, cell_key: str, fraction: float, trial: int) -> int:
    """128-bit seed from a stable hash; independent of any other cell."""
    text = f"{master}|{cell_key}|fraction={fraction!r}|trial={trial}"
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:16], "little")


@dataclass
class SweepResult:
    spec: SweepSpec
    cells: list = field(default_factory=list)
    wall_time: float = field(default=0.0, compare=False)

    @property
    def failed(self) -> int:
        return sum(1 for c in self.cells if c.failed)

    @property
    def completed(self) -> int:
        return len(self.cells) - self.failed


_LATTICES: dict = {}


def _lattice(spec: SweepSpec) -> Network:
    key = (spec.topology, spec.network_size, spec.k, spec.lattice_dims() if spec.topology != "ring" else None)
    if key not in _LATTICES:
        _LATTICES[key] = spec.build_network()
    return _LATTICES[key]


def run_cell(spec: SweepSpec, index: int, cell: dict) -> CellSummary:
    lattice = _lattice(spec)
    summary = CellSummary(index=index, k=lattice.k, i=spec.i, T=spec.T, n=lattice.n,
                          topology=spec.topology, p1=cell.get("p1"), p2=cell.get("p2"),
                          m=cell.get("m"), sigma=spec.sigma, speed_fraction=spec.speed_fraction)
    try:
        rule = spec.rule_for(cell)
        cfg = spec.sim_config()
        key = spec.cell_key(cell)
        for fraction in spec.rewire_fractions:
            swaps = swaps_for_fraction(lattice, fraction)
            finals, times, steps, seeds = [], [], [], []
            for trial in range(spec.trials):
                seed = derive_seed(spec.seed, key, fraction, trial)
                rng = np.random.default_rng(seed)
                net = rewire(lattice, swaps, rng) if swaps else lattice
                rec = run_trial(net, rule, cfg, rng)
                finals.append(rec.final_proportion)
                times.append(time_to_saturation(rec, spec.speed_fraction))
                steps.append(rec.steps)
                seeds.append(seed)
            summary.conditions[fraction] = ConditionSummary(fraction, np.array(finals), times,
                                                            steps, seeds)
    except Exception as exc:  # recorded per cell; the sweep carries on
        log.warning("cell %d failed: %s", index, exc)
        summary.conditions = {}
        summary.failed = f"{type(exc).__name__}: {exc}"
    return summary


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(spec: SweepSpec, workers: int | None = 1,
              progress: Callable[[int, int], None] | None = None) -> SweepResult:
    """Run every cell; output does not depend on ``workers``."""
    started = time.perf_counter()
    cells = spec.cells()
    jobs = [(spec, idx, cell) for idx, cell in enumerate(cells)]
    workers = workers or os.cpu_count() or 1
    results: list[CellSummary] = []
    if workers == 1 or len(jobs) <= 1:
        for done, job in enumerate(jobs, 1):
            results.append(run_cell(*job))
            if progress:
                progress(done, len(jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for done, summary in enumerate(pool.map(_run_cell_args, jobs, chunksize=1), 1):
                results.append(summary)
                if progress:
                    progress(done, len(jobs))
    results.sort(key=lambda c: c.index)
    return SweepResult(spec, results, time.perf_counter() - started)
