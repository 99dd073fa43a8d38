"""Command-line entry point. Exit codes: 0 success, 1 usage error, 2 runtime failure."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import presets, results_io, stats, theory
from .contagion import LogisticRule, SimConfig, StepRule, run_trial
from .netgen import (Kind, build_lattice, read_edge_list, rewire, rewire_fraction,
                     write_edge_list)
from .sweep import SweepSpec, run_sweep

log = logging.getLogger("complexspread")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _T(text: str) -> float:
    if text.lower() in ("inf", "unbounded"):
        return math.inf
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("T must be >= 1 or 'unbounded'")
    return value


def _add_lattice_args(p):
    p.add_argument("--topology", choices=["ring", "moore", "hex"], default="ring")
    p.add_argument("--n", type=int, help="ring size (default 250*k)")
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)


def _lattice_from_args(args):
    if args.topology == "ring":
        return build_lattice(Kind.RING, n=args.n or 250 * args.k, k=args.k)
    if args.rows is None or args.cols is None:
        raise UsageError(f"--rows and --cols are required for {args.topology}")
    return build_lattice(args.topology, rows=args.rows, cols=args.cols)


def _write_csv(rows: list[dict], columns: list[str], out: str | None) -> None:
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    finally:
        if out:
            fh.close()


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_net(args) -> None:
    if args.net_cmd == "build":
        net = _lattice_from_args(args)
    else:
        src = read_edge_list(args.input)
        rng = np.random.default_rng(args.seed)
        if args.swaps is not None:
            net = rewire(src, args.swaps, rng)
        else:
            net = rewire_fraction(src, args.fraction, rng)
    write_edge_list(net, args.out)
    print(f"wrote {net!r} to {args.out}")


def cmd_simulate(args) -> None:
    if args.network:
        net = read_edge_list(args.network)
    else:
        net = _lattice_from_args(args)
    rng = np.random.default_rng(args.seed)
    if args.rewire_fraction:
        net = rewire_fraction(net, args.rewire_fraction, rng)
    if args.m is not None:
        rule = LogisticRule(args.m)
    else:
        if args.p1 is None or args.p2 is None:
            raise UsageError("give --p1 and --p2, or --m for the logistic rule")
        rule = StepRule(args.p1, args.p2, args.i, args.sigma)
    cfg = SimConfig(T=args.T, seeding=args.seeding, max_steps=args.max_steps,
                    rng_seed=args.seed, n_seeds=args.n_seeds)
    rec = run_trial(net, rule, cfg, rng)
    if args.out:
        rec.write_timeseries(args.out)
    else:
        for t, (c, i) in enumerate(zip(rec.cumulative, rec.influential)):
            print(json.dumps({"step": t, "cumulative_adopters": int(c),
                              "influential_count": int(i)}))
    log.info("final proportion %.4f after %d steps", rec.final_proportion, rec.steps)


def _spec_from_args(args) -> SweepSpec:
    if args.config:
        data = json.loads(Path(args.config).read_text())
        data = data.get("spec", data)
    else:
        data = {}
    for name in ("label", "rule", "k", "i", "T", "topology", "rows", "cols", "n", "trials",
                 "seeding", "n_seeds", "sigma", "speed_fraction", "max_steps", "seed"):
        value = getattr(args, name, None)
        if value is not None:
            data[name] = "unbounded" if name == "T" and value == math.inf else value
    if args.step is not None:
        data["p1_grid"] = (0.0, 1.0, args.step)
        data["p2_grid"] = (0.0, 1.0, args.step)
    if args.p1_range:
        data["p1_grid"] = tuple(args.p1_range)
    if args.p2_range:
        data["p2_grid"] = tuple(args.p2_range)
    if args.fractions:
        data["rewire_fractions"] = tuple(args.fractions)
    if args.m_values:
        data["m_values"] = tuple(args.m_values)
        data.setdefault("rule", "logistic")
    if args.all_pairs:
        data["restrict_p1_le_p2"] = False
    return SweepSpec.from_dict(data)


def _progress(done: int, total: int) -> None:
    if done == total or done % max(1, total // 20) == 0:
        log.info("%d/%d cells", done, total)


def cmd_sweep(args) -> None:
    spec = _spec_from_args(args)
    result = run_sweep(spec, workers=args.workers, progress=_progress)
    out = results_io.write_results(result, args.out)
    print(f"{result.completed} cells complete, {result.failed} failed -> {out}")


def region_rows(cells, margin=0.05, alpha=0.05, saturation=0.60) -> list[dict]:
    rows = []
    for cell in cells:
        if cell.failed:
            continue
        ks_label, ks = stats.classify_samples_ks(cell.clustered.finals, cell.random.finals,
                                                 alpha, saturation)
        rows.append({"p1": cell.p1, "p2": cell.p2, "k": cell.k, "i": cell.i, "T": cell.T,
                     "mean_clustered": cell.mean_clustered, "mean_random": cell.mean_random,
                     "region_margin": int(cell.region_margin(margin, saturation)),
                     "region_ks": int(ks_label), "ks_D": ks.D, "ks_p": ks.p})
    return rows


REGION_COLUMNS = ["p1", "p2", "k", "i", "T", "mean_clustered", "mean_random", "region_margin",
                  "region_ks", "ks_D", "ks_p"]


def cmd_classify(args) -> None:
    result = results_io.read_results(args.results)
    rows = region_rows(result.cells, args.margin, args.alpha, args.saturation)
    _write_csv(rows, REGION_COLUMNS, args.out)
    shares = stats.region_shares(result.cells, args.rule, args.margin, args.alpha, args.saturation)
    for label, share in shares.items():
        log.info("%-18s %.3f", label.name, share)


def cmd_boundary(args) -> None:
    values = theory.grid(args.step)
    curves = [theory.random_boundary_curve(args.k, args.i, args.T, values)]
    if args.T != math.inf:
        curves.append(theory.clustered_boundary_curve(args.k, args.i, int(args.T), values))
    rows = [row for curve in curves for row in curve.rows()]
    _write_csv(rows, ["network_type", "k", "i", "T", "p1", "p2_star", "reachable"], args.out)


def cmd_speed(args) -> None:
    result = results_io.read_results(args.results)
    fraction = args.fraction or result.spec.speed_fraction
    if fraction != result.spec.speed_fraction:
        raise UsageError(f"results hold times to {result.spec.speed_fraction}, not {fraction}")
    rows = []
    for cell in result.cells:
        for f, cond in sorted(cell.conditions.items()):
            s = stats.mean_time_to_saturation(cond, fraction)
            rows.append({"p1": cell.p1, "p2": cell.p2, "m": cell.m, "fraction": f,
                         "mean_final": cond.mean_final, "mean_time": s.mean,
                         "reached": s.reached, "trials": s.trials})
    _write_csv(rows, ["p1", "p2", "m", "fraction", "mean_final", "mean_time", "reached",
                      "trials"], args.out)


def cmd_bootstrap(args) -> None:
    cells = []
    for path in args.results:
        cells.extend(results_io.read_results(path).cells)
    est = stats.bootstrap_min_ratio(cells, args.margin, args.subsample, args.reps,
                                    np.random.default_rng(args.seed), args.statistic)
    if est is None:
        print("no cell shows a clustered advantage at this margin")
        return
    print(json.dumps({"margin": args.margin, "estimate": est.estimate, "ci_low": est.ci_low,
                      "ci_high": est.ci_high, "replicates": est.replicates}))


def cmd_preset(args) -> None:
    specs = presets.preset(args.name)
    if not args.run:
        doc = [s.to_dict() for s in specs]
        text = json.dumps(doc, indent=2)
        if args.out:
            Path(args.out).write_text(text + "\n")
        else:
            print(text)
        return
    if not args.out:
        raise UsageError("--run needs --out DIR")
    for spec in specs:
        if args.trials:
            spec.trials = args.trials
        if args.step:
            spec.p1_grid = (0.0, 1.0, args.step)
            spec.p2_grid = (0.0, 1.0, args.step)
        log.info("running %s (%d cells)", spec.label, len(spec.cells()))
        result = run_sweep(spec, workers=args.workers, progress=_progress)
        results_io.write_results(result, Path(args.out) / spec.label)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="complexspread", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    # -v is accepted after the subcommand too
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **kw: _add(*a, parents=[common], **kw)

    net = sub.add_parser("net", help="build or rewire networks (edge-list files)")
    net_sub = net.add_subparsers(dest="net_cmd", required=True, parser_class=_Parser)
    build = net_sub.add_parser("build")
    _add_lattice_args(build)
    build.add_argument("--out", required=True)
    rw = net_sub.add_parser("rewire")
    rw.add_argument("--in", dest="input", required=True)
    group = rw.add_mutually_exclusive_group(required=True)
    group.add_argument("--swaps", type=int)
    group.add_argument("--fraction", type=float)
    rw.add_argument("--seed", type=int, default=0)
    rw.add_argument("--out", required=True)
    net.set_defaults(func=cmd_net)

    sim = sub.add_parser("simulate", help="run one trial and emit its time series")
    _add_lattice_args(sim)
    sim.add_argument("--network", help="edge-list file instead of building a lattice")
    sim.add_argument("--rewire-fraction", type=float, default=0.0)
    sim.add_argument("--p1", type=float)
    sim.add_argument("--p2", type=float)
    sim.add_argument("--i", type=int, default=2)
    sim.add_argument("--sigma", type=float, default=0.0)
    sim.add_argument("--m", type=float, help="logistic slope (replaces p1/p2)")
    sim.add_argument("--T", type=_T, default=1)
    sim.add_argument("--seeding", choices=["neighbor", "random", "adjacent"], default="neighbor")
    sim.add_argument("--n-seeds", type=int)
    sim.add_argument("--max-steps", type=int)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", help="JSON-lines output (default stdout)")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="run a parameter sweep")
    sw.add_argument("--config", help="JSON file with SweepSpec fields")
    sw.add_argument("--label")
    sw.add_argument("--rule", choices=["step", "logistic"])
    sw.add_argument("--k", type=int)
    sw.add_argument("--i", type=int)
    sw.add_argument("--T", type=_T)
    sw.add_argument("--topology", choices=["ring", "moore", "hex"])
    sw.add_argument("--rows", type=int)
    sw.add_argument("--cols", type=int)
    sw.add_argument("--n", type=int)
    sw.add_argument("--trials", type=int)
    sw.add_argument("--seeding", choices=["neighbor", "random", "adjacent"])
    sw.add_argument("--n-seeds", type=int)
    sw.add_argument("--sigma", type=float)
    sw.add_argument("--speed-fraction", type=float)
    sw.add_argument("--max-steps", type=int)
    sw.add_argument("--step", type=float, help="grid step for both p1 and p2 on [0, 1]")
    sw.add_argument("--p1-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    sw.add_argument("--p2-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    sw.add_argument("--all-pairs", action="store_true", help="include p1 > p2 cells")
    sw.add_argument("--fractions", type=float, nargs="+", help="rewire fractions")
    sw.add_argument("--m-values", type=float, nargs="+")
    sw.add_argument("--seed", type=int, help="master seed")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--out", required=True)
    sw.set_defaults(func=cmd_sweep)

    cl = sub.add_parser("classify", help="label each cell's region")
    cl.add_argument("--results", required=True)
    cl.add_argument("--rule", choices=["margin", "ks"], default="margin")
    cl.add_argument("--margin", type=float, default=0.05)
    cl.add_argument("--alpha", type=float, default=0.05)
    cl.add_argument("--saturation", type=float, default=0.60)
    cl.add_argument("--out")
    cl.set_defaults(func=cmd_classify)

    bd = sub.add_parser("boundary", help="analytic spread boundaries as CSV")
    bd.add_argument("--k", type=int, required=True)
    bd.add_argument("--i", type=int, default=2)
    bd.add_argument("--T", type=_T, default=1)
    bd.add_argument("--step", type=float, default=0.02)
    bd.add_argument("--out")
    bd.set_defaults(func=cmd_boundary)

    sp = sub.add_parser("speed", help="mean time to saturation per cell and condition")
    sp.add_argument("--results", required=True)
    sp.add_argument("--fraction", type=float)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_speed)

    bs = sub.add_parser("bootstrap-ratio", help="minimum p2/p1 with clustered advantage")
    bs.add_argument("--results", required=True, nargs="+")
    bs.add_argument("--margin", type=float, default=0.05, choices=[0.001, 0.01, 0.05, 0.10])
    bs.add_argument("--subsample", type=int, default=10)
    bs.add_argument("--reps", type=int, default=1000)
    bs.add_argument("--statistic", choices=["mean", "median"], default="mean")
    bs.add_argument("--seed", type=int, default=0)
    bs.set_defaults(func=cmd_bootstrap)

    pr = sub.add_parser("preset", help="emit or run a named experiment")
    pr.add_argument("name", choices=sorted(presets.PRESETS))
    pr.add_argument("--run", action="store_true")
    pr.add_argument("--out")
    pr.add_argument("--workers", type=int, default=1)
    pr.add_argument("--trials", type=int)
    pr.add_argument("--step", type=float)
    pr.set_defaults(func=cmd_preset)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
