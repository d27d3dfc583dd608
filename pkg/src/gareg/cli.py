"""Command-line driver: knot search, subset search, and data simulation.

Artifacts land in --out: report.json (lossless run record), trace.csv
(generation, best fitness, accepted count), fit.csv for knot runs
(observed points plus a 500-point evaluation grid), and truth.json for
simulated data. Exit codes: 0 success, 1 usage/data error, 2 infeasible
problem.

Identical flags and seed reproduce report.json and trace.csv byte for
byte; wall time is therefore printed to stderr rather than recorded.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from .chromosomes import BinaryChromosome, KnotChromosome
from .datagen import SubsetSimSpec, sim_knot_data, sim_subset_data
from .engine import FixedKnotCount, GAConfig, SubsetSearch, VaryingKnotCount, run
from .errors import GaregError, Infeasible, InfeasibleProblem, TooLarge
from .islands import IslandConfig, run_islands
from .objectives import (
    SubsetObjectiveContext,
    knot_context,
    knot_objective,
    refit_subset,
    subset_objective,
)
from .oracle import exhaustive_knot_search, exhaustive_subset_search
from .regression import GlmFamily, least_squares
from .splines import SplineSpec, design_matrix

FAMILY_BY_NAME = {
    "gaussian": GlmFamily.gaussian_identity,
    "binomial": GlmFamily.binomial_logit,
    "poisson": GlmFamily.poisson_log,
}

FIT_GRID_POINTS = 500


class CliError(Exception):
    """Usage or data error: exits with status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message)


@dataclass
class RunReport:
    """Lossless record of one search run; round-trips through JSON."""

    mode: str
    method: str
    best: dict
    best_fitness: float
    ic_kind: str | None
    generations: int
    seed: int
    config: dict
    oracle: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(**d)


def write_report(report: RunReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_report(path: str) -> RunReport:
    with open(path, encoding="utf-8") as fh:
        return RunReport.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# CSV plumbing


def _read_table(path: str) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise CliError(f"{path} is empty; expected a header row")
    header = [h.strip() for h in rows[0]]
    return header, rows[1:]


def _numeric_column(header: list[str], rows: list[list[str]], name: str, path: str) -> np.ndarray:
    if name not in header:
        raise CliError(f"missing column {name!r} in {path} (have {', '.join(header)})")
    j = header.index(name)
    out = np.empty(len(rows))
    for i, row in enumerate(rows):
        if j >= len(row):
            raise CliError(f"row {i + 2} of {path} is short; no value for column {name!r}")
        try:
            out[i] = float(row[j])
        except ValueError:
            raise CliError(
                f"non-numeric value {row[j]!r} in column {name!r}, row {i + 2} of {path}"
            ) from None
    return out


def _fmt(v: float) -> str:
    return repr(float(v))


def write_trace(trace, path: str) -> None:
    vals = trace.reported_best()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "best_fitness", "accepted"])
        for g, (v, a) in enumerate(zip(vals, trace.accepted), start=1):
            writer.writerow([g, _fmt(v), a])


# ---------------------------------------------------------------------------
# Shared helpers


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("GAREG_SEED")
    if env is not None and env != "":
        try:
            return int(env)
        except ValueError:
            raise CliError(f"GAREG_SEED must be an integer, got {env!r}") from None
    return int(np.random.SeedSequence().entropy % (2**63))


def _ensure_outdir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _monitor_printer(direction: str):
    def monitor(gen: int, best_internal: float, accepted: int) -> None:
        shown = -best_internal if direction == "max" else best_internal
        print(f"generation {gen}: best {shown:.6g}, accepted {accepted}", file=sys.stderr)

    return monitor


def _island_config(args, pop_size: int) -> IslandConfig:
    n_islands = getattr(args, "islands", 4)
    island_pop = pop_size // n_islands
    if island_pop < 3:
        raise CliError(
            f"--pop-size {pop_size} is too small for {n_islands} islands (need >= 3 each)"
        )
    return IslandConfig(
        n_islands=n_islands,
        island_pop=island_pop,
        migration_interval=getattr(args, "migration_interval", 5),
        max_mig=getattr(args, "max_mig", 100),
    )


# ---------------------------------------------------------------------------
# knots


def cmd_knots(args) -> RunReport:
    header, rows = _read_table(args.input)
    x = _numeric_column(header, rows, args.x_col, args.input)
    y = _numeric_column(header, rows, args.y_col, args.input)

    degree = args.degree
    if args.type == "ns":
        if degree is not None:
            print('warning: --degree is ignored for type "ns"', file=sys.stderr)
        degree = 3
    elif degree is None:
        degree = 3

    seed = _resolve_seed(args.seed)
    spec = SplineSpec(basis=args.type, degree=degree, intercept=not args.no_intercept)
    ctx = knot_context(y, x, spec=spec, ic_kind=args.ic, d_min=args.min_dist)
    if args.fixed_knots is not None:
        mode = FixedKnotCount(args.fixed_knots)
        mode_name = "knots-fixed"
    else:
        mode = VaryingKnotCount()
        mode_name = "knots-varying"
    cfg = GAConfig(
        pop_size=args.pop_size,
        p_crossover=args.p_crossover,
        p_mutation=args.p_mutation,
        max_gen=args.max_gen,
        seed=seed,
    )
    objective = knot_objective(ctx)
    monitor = _monitor_printer("min") if args.monitor else None

    t0 = time.perf_counter()
    if args.method == "island":
        trace = run_islands(objective, mode, ctx.fp, cfg, _island_config(args, args.pop_size), monitor=monitor)
    else:
        trace = run(objective, mode, ctx.fp, cfg, monitor=monitor)
    elapsed = time.perf_counter() - t0

    best = trace.best
    if not math.isfinite(best.fitness):
        raise Infeasible("no feasible model was found (every candidate scored +inf)")
    chromosome: KnotChromosome = best.chromosome
    knot_x = [float(ctx.grid[i]) for i in chromosome.tau]

    oracle_block = None
    if args.oracle:
        m_range = [args.fixed_knots] if args.fixed_knots is not None else range(0, ctx.fp.effective_m_max() + 1)
        res = exhaustive_knot_search(ctx, m_range)
        oracle_block = {
            "best_score": res.best_score,
            "best_configurations": [list(c.tau) for c in res.best_configurations],
            "evaluated_count": res.evaluated_count,
            "ga_matches": bool(abs(best.fitness - res.best_score) <= 1e-9),
        }

    config = {
        "input": args.input,
        "x_col": args.x_col,
        "y_col": args.y_col,
        "fixed_knots": args.fixed_knots,
        "min_dist": args.min_dist,
        "type": args.type,
        "degree": degree,
        "intercept": not args.no_intercept,
        "ic": args.ic,
        "method": args.method,
        "pop_size": args.pop_size,
        "p_crossover": args.p_crossover,
        "p_mutation": args.p_mutation,
        "max_gen": args.max_gen,
        "islands": args.islands,
        "migration_interval": args.migration_interval,
        "max_mig": args.max_mig,
    }
    report = RunReport(
        mode=mode_name,
        method=args.method,
        best={
            "m": chromosome.m,
            "knot_indices": list(chromosome.tau),
            "knot_x": knot_x,
        },
        best_fitness=float(best.fitness),
        ic_kind=args.ic,
        generations=trace.generations,
        seed=seed,
        config=config,
        oracle=oracle_block,
    )

    out = _ensure_outdir(args.out)
    write_report(report, os.path.join(out, "report.json"))
    write_trace(trace, os.path.join(out, "trace.csv"))
    _write_fit_csv(os.path.join(out, "fit.csv"), ctx, chromosome)

    print(
        f"best {args.ic} {best.fitness:.6g} with m={chromosome.m} knots at "
        f"{', '.join(f'{v:g}' for v in knot_x) if knot_x else '(none)'}"
    )
    print(f"finished in {elapsed:.2f}s over {trace.generations} generations", file=sys.stderr)
    return report


def _write_fit_csv(path: str, ctx, chromosome: KnotChromosome) -> None:
    knots = ctx.grid[list(chromosome.tau)]
    X = design_matrix(ctx.x_raw, knots, ctx.spec)
    coef = least_squares(X, ctx.y).coefficients
    fitted_obs = X @ coef
    grid = np.linspace(float(ctx.grid[0]), float(ctx.grid[-1]), FIT_GRID_POINTS)
    fitted_grid = design_matrix(grid, knots, ctx.spec) @ coef

    rows = [(float(xv), _fmt(yv), _fmt(fv)) for xv, yv, fv in zip(ctx.x_raw, ctx.y, fitted_obs)]
    rows += [(float(xv), "", _fmt(fv)) for xv, fv in zip(grid, fitted_grid)]
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "fitted"])
        for xv, yv, fv in rows:
            writer.writerow([_fmt(xv), yv, fv])


# ---------------------------------------------------------------------------
# subset


def cmd_subset(args) -> RunReport:
    header, rows = _read_table(args.input)
    y = _numeric_column(header, rows, args.y_col, args.input)
    predictors = [name for name in header if name != args.y_col]
    if not predictors:
        raise CliError(f"{args.input} has no predictor columns besides {args.y_col!r}")
    X = np.column_stack([_numeric_column(header, rows, name, args.input) for name in predictors])

    seed = _resolve_seed(args.seed)
    ctx = SubsetObjectiveContext(y=y, X=X, family=FAMILY_BY_NAME[args.family])
    mode = SubsetSearch(X.shape[1])
    cfg = GAConfig(
        pop_size=args.pop_size,
        p_mutation=args.p_mutation,
        max_gen=args.max_gen,
        stall_limit=args.stall,
        seed=seed,
    )
    objective = subset_objective(ctx)

    if args.oracle and X.shape[1] > 20:
        raise CliError(f"--oracle supports at most 20 predictors, got {X.shape[1]}")

    t0 = time.perf_counter()
    if args.method == "island":
        trace = run_islands(objective, mode, None, cfg, _island_config(args, args.pop_size))
    else:
        trace = run(objective, mode, None, cfg)
    elapsed = time.perf_counter() - t0

    best = trace.best
    chromosome: BinaryChromosome = best.chromosome
    selected = list(chromosome.selected_indices())
    neg_bic = trace.best_reported_fitness()
    intercept, coefs = refit_subset(chromosome, ctx)

    oracle_block = None
    if args.oracle:
        res = exhaustive_subset_search(ctx)
        oracle_block = {
            "best_score": res.best_score,
            "best_configurations": [list(c.bits) for c in res.best_configurations],
            "evaluated_count": res.evaluated_count,
            "ga_matches": bool(abs(neg_bic - res.best_score) <= 1e-9),
        }

    config = {
        "input": args.input,
        "y_col": args.y_col,
        "family": args.family,
        "method": args.method,
        "pop_size": args.pop_size,
        "max_gen": args.max_gen,
        "stall": args.stall,
        "p_mutation": args.p_mutation,
    }
    report = RunReport(
        mode="subset",
        method=args.method,
        best={
            "selected_indices": selected,
            "selected_names": [predictors[j] for j in selected],
            "refit_intercept": intercept,
            "refit_coefficients": [float(c) for c in coefs],
        },
        best_fitness=float(neg_bic),
        ic_kind="BIC",
        generations=trace.generations,
        seed=seed,
        config=config,
        oracle=oracle_block,
    )

    out = _ensure_outdir(args.out)
    write_report(report, os.path.join(out, "report.json"))
    write_trace(trace, os.path.join(out, "trace.csv"))

    print(f"best -BIC {neg_bic:.6g} with {len(selected)} predictors: {selected}")
    print(f"finished in {elapsed:.2f}s over {trace.generations} generations", file=sys.stderr)
    return report


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> None:
    seed = _resolve_seed(args.seed)
    out = _ensure_outdir(args.out)
    data_path = os.path.join(out, "data.csv")
    truth_path = os.path.join(out, "truth.json")

    if args.kind == "subset":
        try:
            spec = SubsetSimSpec(
                n=args.n,
                p=args.p,
                s0=args.s0,
                sigma=args.sigma,
                magnitudes_range=(args.mag_lo, args.mag_hi),
                rho=args.rho,
                seed=seed,
            )
        except Infeasible as exc:
            raise CliError(str(exc)) from exc
        sim = sim_subset_data(spec)
        with open(data_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["y"] + [f"X{j + 1}" for j in range(spec.p)])
            for i in range(spec.n):
                writer.writerow([_fmt(sim.y[i])] + [_fmt(v) for v in sim.X[i]])
        truth = {
            "kind": "subset",
            "beta_true": [float(b) for b in sim.beta_true],
            "true_idx": [int(i) for i in sim.true_idx],
            "spec": {
                "n": spec.n,
                "p": spec.p,
                "s0": spec.s0,
                "sigma": spec.sigma,
                "magnitudes_range": list(spec.magnitudes_range),
                "rho": spec.rho,
                "seed": seed,
            },
        }
    else:
        breaks = _parse_float_list(args.breaks, "--breaks")
        slopes = _parse_float_list(args.slopes, "--slopes")
        if len(slopes) != len(breaks) + 1:
            raise CliError(
                f"--slopes needs {len(breaks) + 1} values for {len(breaks)} breaks, got {len(slopes)}"
            )
        try:
            x, y = sim_knot_data(
                n=args.n, breaks=breaks, slopes=slopes, sigma=args.sigma, seed=seed
            )
        except Infeasible as exc:
            raise CliError(str(exc)) from exc
        with open(data_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y"])
            for xv, yv in zip(x, y):
                writer.writerow([_fmt(xv), _fmt(yv)])
        truth = {
            "kind": "knots",
            "breaks": breaks,
            "slopes": slopes,
            "sigma": args.sigma,
            "seed": seed,
        }

    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {data_path} and {truth_path}")


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise CliError(f"{flag} expects comma-separated numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gareg", description="GA search for knot placement and best subsets")
    sub = parser.add_subparsers(dest="command")

    knots = sub.add_parser("knots", help="optimize spline knot locations (and count)")
    knots.add_argument("--input", required=True, help="CSV file with the data (header required)")
    knots.add_argument("--x-col", default="x", help="design column name (default x)")
    knots.add_argument("--y-col", default="y", help="response column name (default y)")
    knots.add_argument(
        "--fixed-knots",
        type=int,
        default=None,
        metavar="M",
        help="search exactly M knots; omit to search the count too",
    )
    knots.add_argument(
        "--min-dist",
        type=float,
        default=3.0,
        help="minimum x-distance between knots and to the boundary (default 3)",
    )
    knots.add_argument("--type", choices=["ppolys", "ns", "bs"], default="ppolys")
    knots.add_argument(
        "--degree", type=int, default=None, help="polynomial degree (default 3; ignored for ns)"
    )
    knots.add_argument("--no-intercept", action="store_true")
    knots.add_argument("--ic", choices=["BIC", "AIC", "AICc"], default="BIC")
    knots.add_argument("--method", choices=["single", "island"], default="single")
    knots.add_argument("--pop-size", type=int, default=200)
    knots.add_argument("--p-crossover", type=float, default=0.9)
    knots.add_argument("--p-mutation", type=float, default=0.3)
    knots.add_argument("--max-gen", type=int, default=10000)
    knots.add_argument("--islands", type=int, default=4)
    knots.add_argument("--migration-interval", type=int, default=5)
    knots.add_argument("--max-mig", type=int, default=100)
    knots.add_argument("--seed", type=int, default=None)
    knots.add_argument("--oracle", action="store_true", help="also run the exhaustive search")
    knots.add_argument("--monitor", action="store_true", help="progress lines on stderr")
    knots.add_argument("--out", default="gareg-out", help="output directory")
    knots.set_defaults(func=cmd_knots)

    subset = sub.add_parser("subset", help="best-subset variable selection")
    subset.add_argument("--input", required=True)
    subset.add_argument("--y-col", default="y")
    subset.add_argument("--family", choices=sorted(FAMILY_BY_NAME), default="gaussian")
    subset.add_argument("--pop-size", type=int, default=120)
    subset.add_argument("--max-gen", type=int, default=20000)
    subset.add_argument("--stall", type=int, default=4000)
    subset.add_argument("--p-mutation", type=float, default=0.02)
    subset.add_argument("--method", choices=["single", "island"], default="single")
    subset.add_argument("--islands", type=int, default=4)
    subset.add_argument("--seed", type=int, default=None)
    subset.add_argument("--oracle", action="store_true", help="exhaustive search (p <= 20)")
    subset.add_argument("--out", default="gareg-out")
    subset.set_defaults(func=cmd_subset)

    simulate = sub.add_parser("simulate", help="write synthetic datasets")
    simulate.add_argument("--kind", choices=["subset", "knots"], default="subset")
    simulate.add_argument("--n", type=int, default=100)
    simulate.add_argument("--p", type=int, default=50)
    simulate.add_argument("--s0", type=int, default=25)
    simulate.add_argument("--sigma", type=float, default=1.5)
    simulate.add_argument("--mag-lo", type=float, default=0.5)
    simulate.add_argument("--mag-hi", type=float, default=2.0)
    simulate.add_argument("--rho", type=float, default=None, help="AR(1) error coefficient")
    simulate.add_argument("--breaks", default="60,140", help="knots kind: comma-separated break x-values")
    simulate.add_argument("--slopes", default="0.5,-0.4,0.3", help="knots kind: per-segment slopes")
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--out", default="gareg-out")
    simulate.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.error("a subcommand is required (knots, subset, or simulate)")
        args.func(args)
        return 0
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (Infeasible, InfeasibleProblem) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except GaregError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
