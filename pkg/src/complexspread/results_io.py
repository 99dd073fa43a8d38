"""Sweep persistence: ``spec.json`` + ``cells.csv`` + ``trials.csv`` in one directory.

Floats are written with ``repr`` so a read-back result compares equal to the
one written. Wall time goes to ``meta.json``, which is the only file that
differs between identical runs.
"""

from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from pathlib import Path

import numpy as np

from .stats import CellSummary, ConditionSummary
from .sweep import SweepResult, SweepSpec

SCHEMA_VERSION = 1

CELL_COLUMNS = ["cell", "fraction", "p1", "p2", "m", "k", "i", "T", "n", "topology", "sigma",
                "speed_fraction", "trials", "mean_final", "reached", "failed"]
TRIAL_COLUMNS = ["cell", "fraction", "trial", "rng_seed", "final", "steps", "time_to_saturation"]


class SchemaError(ValueError):
    pass


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _opt_float(text: str):
    return None if text == "" else float(text)


def _opt_int(text: str):
    return None if text == "" else int(text)


def write_results(result: SweepResult, path: str | Path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    spec_doc = {"schema_version": SCHEMA_VERSION, "spec": result.spec.to_dict()}
    (out / "spec.json").write_text(json.dumps(spec_doc, indent=2, sort_keys=True) + "\n")
    (out / "meta.json").write_text(json.dumps({"wall_time_s": result.wall_time,
                                               "cells": len(result.cells),
                                               "failed": result.failed}) + "\n")

    with open(out / "cells.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CELL_COLUMNS)
        for cell in result.cells:
            base = [cell.index, None, cell.p1, cell.p2, cell.m, cell.k, cell.i, float(cell.T),
                    cell.n, cell.topology, float(cell.sigma), float(cell.speed_fraction)]
            if not cell.conditions:
                writer.writerow([_fmt(v) for v in base + [0, None, None, cell.failed]])
                continue
            for fraction, cond in sorted(cell.conditions.items()):
                row = list(base)
                row[1] = fraction
                row += [cond.trials, cond.mean_final, len(cond.reached_times()), cell.failed]
                writer.writerow([_fmt(v) for v in row])

    with open(out / "trials.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRIAL_COLUMNS)
        for cell in result.cells:
            for fraction, cond in sorted(cell.conditions.items()):
                for t in range(cond.trials):
                    writer.writerow([_fmt(v) for v in (
                        cell.index, fraction, t, cond.seeds[t], float(cond.finals[t]),
                        cond.steps[t], cond.times[t])])
    return out


def _read_csv(path: Path, columns: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != columns:
            raise SchemaError(f"{path.name}: unexpected columns {reader.fieldnames}")
        return list(reader)


def read_results(path: str | Path) -> SweepResult:
    src = Path(path)
    try:
        spec_doc = json.loads((src / "spec.json").read_text())
    except FileNotFoundError as exc:
        raise SchemaError(f"no spec.json in {src}") from exc
    version = spec_doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"schema version {version!r}, expected {SCHEMA_VERSION}")
    spec = SweepSpec.from_dict(spec_doc["spec"])

    cells: dict[int, CellSummary] = {}
    for row in _read_csv(src / "cells.csv", CELL_COLUMNS):
        idx = int(row["cell"])
        if idx not in cells:
            T = float(row["T"])
            cells[idx] = CellSummary(
                index=idx, k=int(row["k"]), i=int(row["i"]),
                T=T if T == math.inf else int(T), n=int(row["n"]), topology=row["topology"],
                p1=_opt_float(row["p1"]), p2=_opt_float(row["p2"]), m=_opt_float(row["m"]),
                sigma=float(row["sigma"]), speed_fraction=float(row["speed_fraction"]),
                failed=row["failed"] or None)

    trials = defaultdict(list)
    for row in _read_csv(src / "trials.csv", TRIAL_COLUMNS):
        trials[(int(row["cell"]), float(row["fraction"]))].append(row)
    for (idx, fraction), rows in sorted(trials.items()):
        rows.sort(key=lambda r: int(r["trial"]))
        cells[idx].conditions[fraction] = ConditionSummary(
            fraction,
            np.array([float(r["final"]) for r in rows]),
            [_opt_int(r["time_to_saturation"]) for r in rows],
            [int(r["steps"]) for r in rows],
            [int(r["rng_seed"]) for r in rows])
    return SweepResult(spec, [cells[i] for i in sorted(cells)])
