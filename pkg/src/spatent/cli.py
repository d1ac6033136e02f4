"""Command line interface: generation, measurement, experiments, verification.

Subcommands
-----------
generate    write replicate grids of one scenario plus a manifest
measure     compute selected measures on one grid file (CSV output)
decompose   distance-band entropy decomposition of one grid (JSON or CSV)
experiment  scenario ensemble -> long CSV plus quantile summary CSV
verify      run the internal identity suite on one or more grid files

Experiment output is deterministic for a given plan and master seed whatever
the worker count: every replicate derives its own RNG stream from its index
and rows are emitted in plan order.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .classic import (
    batty_entropy,
    build_area_neighbourhood,
    estimate_area_probs,
    karlstrom_entropy,
    leibovici_entropy,
    oneill_entropy,
    parresol_edwards_entropy,
    relative_contagion,
)
from .cooccur import (
    CooccurrenceScheme,
    DistanceClassification,
    conditional_pmfs,
    enumerate_pairs,
    enumerate_pairs_bruteforce,
)
from .decomp import (
    MI_AGREEMENT_TOL,
    decompose,
    decompose_distributions,
)
from .errors import ConsistencyError
from .lattice import (
    UNIFORM_PARTITION,
    CategoricalGrid,
    partition_window,
    read_grid,
    write_grid,
    write_partition,
)
from .prob import conditional_entropy, mutual_information, shannon
from .simgen import SCENARIOS, ScenarioSpec, generate, replicate_seed

log = logging.getLogger("spatent")

MEASURES = (
    "shannon_x",
    "shannon_z",
    "batty",
    "karlstrom",
    "oneill",
    "leibovici",
    "rc",
    "parresol",
    "decomposition",
)

# the eight-scenario comparative design: all four patterns with 2 categories,
# compact and random additionally with 5 and 20
DEFAULT_DESIGN = (
    "compact:2,repulsive:2,multicluster:2,random:2,"
    "compact:5,random:5,compact:20,random:20"
)

DEFAULT_KARLSTROM_DISTANCES = "0,2,5,10"

_FMT = "%.12g"


def _fmt(value: float) -> str:
    return _FMT % float(value)


# ---------------------------------------------------------------------------
# argument parsing helpers (argparse type= callbacks)

def _breaks_arg(text: str) -> DistanceClassification:
    try:
        return DistanceClassification(tuple(float(t) for t in text.split(",")))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _measures_arg(text: str) -> tuple:
    if text.strip() == "all":
        return MEASURES
    requested = {t.strip() for t in text.split(",") if t.strip()}
    unknown = requested.difference(MEASURES)
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown measures {sorted(unknown)}; choose from {', '.join(MEASURES)}"
        )
    return tuple(m for m in MEASURES if m in requested)


def _plan_arg(text: str) -> tuple:
    """Comma list of kind:categories entries, e.g. 'compact:2,random:5'."""
    plan = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        kind, sep, cats = item.partition(":")
        if not sep or kind not in SCENARIOS or not cats.isdigit():
            raise argparse.ArgumentTypeError(
                f"bad plan entry {item!r}, expected kind:categories with kind in {SCENARIOS}"
            )
        plan.append((kind, int(cats)))
    if not plan:
        raise argparse.ArgumentTypeError("empty scenario plan")
    return tuple(plan)


def _distances_arg(text: str) -> tuple:
    try:
        out = tuple(float(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if not out or any(d < 0 for d in out):
        raise argparse.ArgumentTypeError("distances must be non-negative numbers")
    return out


def _partition_seed_arg(text: str):
    if text == UNIFORM_PARTITION:
        return UNIFORM_PARTITION
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or '{UNIFORM_PARTITION}'")


# ---------------------------------------------------------------------------
# measurement core shared by `measure` and `experiment`

def _build_decomposition(grid, classification, ordered: bool, workers: int):
    if not ordered:
        return decompose(grid, classification, workers=workers)
    scheme = CooccurrenceScheme(grid.num_categories, ordered=True)
    sample = enumerate_pairs(grid, classification, scheme, workers=workers)
    return decompose_distributions(conditional_pmfs(sample), pair_counts=sample.pair_counts)


def _measure_rows(
    grid,
    measures,
    *,
    classification=None,
    ordered: bool = False,
    partition=None,
    target_category: int = 1,
    karlstrom_nb=(),
    leibovici_distance: float = 2.0,
    workers: int = 1,
):
    """(measure, band, value) rows for one grid, in canonical measure order.

    Batty and Karlstrom rows are NaN when the target category is absent from
    the grid (the area probabilities are then undefined).
    """
    rows = []
    dec = None
    if "shannon_z" in measures or "decomposition" in measures:
        cls = classification or DistanceClassification.default_for(grid)
        dec = _build_decomposition(grid, cls, ordered, workers)

    area_probs = None
    if "batty" in measures or "karlstrom" in measures:
        if partition is None:
            raise ValueError("batty and karlstrom need an area partition")
        if not 1 <= target_category <= grid.num_categories:
            raise ValueError(f"target category {target_category} out of range")
        if np.count_nonzero(grid.values == target_category):
            area_probs = estimate_area_probs(grid, partition, target_category)

    for m in MEASURES:
        if m not in measures:
            continue
        if m == "shannon_x":
            rows.append(("shannon_x", "", shannon(grid.category_pmf())))
        elif m == "shannon_z":
            rows.append(("shannon_z", "", dec.marginal))
        elif m == "batty":
            value = batty_entropy(area_probs) if area_probs else math.nan
            rows.append(("batty", "", value))
        elif m == "karlstrom":
            for band, nb in karlstrom_nb:
                value = karlstrom_entropy(area_probs, nb) if area_probs else math.nan
                rows.append(("karlstrom", band, value))
        elif m == "oneill":
            rows.append(("oneill", "", oneill_entropy(grid)))
        elif m == "leibovici":
            band = f"d{leibovici_distance:g}"
            rows.append(("leibovici", band, leibovici_entropy(grid, leibovici_distance)))
        elif m == "rc":
            rows.append(("rc", "", relative_contagion(grid)))
        elif m == "parresol":
            rows.append(("parresol", "", parresol_edwards_entropy(grid)))
        elif m == "decomposition":
            rows.append(("mutual_information", "", dec.mutual_information))
            rows.append(("residual_global", "", dec.residual_global))
            rows.append(("mi_proportional", "", dec.mi_proportional))
            for b in dec.bands:
                rows.append(("p_w", b.label, b.p_w))
                rows.append(("residual_partial", b.label, b.residual_partial))
                rows.append(("info_partial", b.label, b.info_partial))
    return rows


def _karlstrom_neighbourhoods(partition, distances):
    return tuple(
        (f"d{d:g}", build_area_neighbourhood(partition, d)) for d in distances
    )


# ---------------------------------------------------------------------------
# subcommands

def _cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pmf_source = "uniform" if args.uniform_pmf else "dirichlet"
    entries = []
    for rep in range(args.replicates):
        seed = replicate_seed(args.seed, args.scenario, args.categories, rep)
        spec = ScenarioSpec(
            args.scenario, args.rows, args.cols, args.categories, pmf_source, seed
        )
        name = f"{args.scenario}_x{args.categories}_r{rep:04d}.grid"
        write_grid(generate(spec), out / name)
        entries.append({"file": name, "replicate": rep, "seed": list(seed)})
    manifest = {
        "version": __version__,
        "scenario": args.scenario,
        "rows": args.rows,
        "cols": args.cols,
        "categories": args.categories,
        "pmf_source": pmf_source,
        "master_seed": args.seed,
        "grids": entries,
    }
    with open(out / "manifest.json", "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(entries)} grid(s) and manifest.json to {out}")
    return 0


def _cmd_measure(args) -> int:
    grid = read_grid(args.grid)
    partition = None
    karl = ()
    if "batty" in args.measures or "karlstrom" in args.measures:
        partition = partition_window(grid, args.areas, args.partition_seed)
        if "karlstrom" in args.measures:
            karl = _karlstrom_neighbourhoods(partition, args.karlstrom_distances)
    rows = _measure_rows(
        grid,
        args.measures,
        classification=args.bands,
        ordered=args.ordered,
        partition=partition,
        target_category=args.target_category,
        karlstrom_nb=karl,
        leibovici_distance=args.leibovici_distance,
        workers=args.workers,
    )
    text = "measure,band,value\n"
    text += "".join(f"{m},{b},{_fmt(v)}\n" for m, b, v in rows)
    if args.out:
        Path(args.out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_decompose(args) -> int:
    grid = read_grid(args.grid)
    cls = args.bands or DistanceClassification.default_for(grid)
    dec = _build_decomposition(grid, cls, args.ordered, args.workers)
    text = dec.to_csv_row() if args.format == "csv" else dec.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    return 0


def _experiment_tasks(plan, replicates: int, include_uniform: bool):
    tasks = []
    for kind, cats in plan:
        label = f"{kind}_x{cats}"
        for rep in range(replicates):
            tasks.append((label, kind, cats, rep, 0))
        if include_uniform:
            # the idealized extra replicate with the exact equal category split
            tasks.append((label, kind, cats, replicates, 1))
    return tasks


def _cmd_experiment(args) -> int:
    if not args.skip_uniform:
        pixels = args.rows * args.cols
        bad = [f"{kind}:{cats}" for kind, cats in args.scenarios if pixels % cats]
        if bad:
            log.error(
                "the equal-split replicate needs the category count to divide "
                "%d pixels; impossible for %s (use --skip-uniform)",
                pixels,
                ",".join(bad),
            )
            return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dummy = CategoricalGrid(
        args.rows, args.cols, 1, np.ones(args.rows * args.cols, dtype=np.int64)
    )
    cls = args.bands or DistanceClassification.default_for(dummy)

    partition = None
    karl = ()
    area_measures = {"batty", "karlstrom"}.intersection(args.measures)
    if area_measures and any(cats == 2 for _, cats in args.scenarios):
        seed = np.random.SeedSequence((int(args.seed),), spawn_key=(1,))
        partition = partition_window(dummy, args.areas, seed)
        write_partition(partition, out / "partition.txt")
        if "karlstrom" in args.measures:
            karl = _karlstrom_neighbourhoods(partition, args.karlstrom_distances)

    tasks = _experiment_tasks(args.scenarios, args.replicates, not args.skip_uniform)

    def run(task):
        label, kind, cats, rep, uflag = task
        spec = ScenarioSpec(
            kind,
            args.rows,
            args.cols,
            cats,
            "uniform" if uflag else "dirichlet",
            replicate_seed(args.seed, kind, cats, rep),
        )
        grid = generate(spec)
        # area-based indices are defined on the two-category scenarios only
        selected = args.measures
        if cats != 2:
            selected = tuple(m for m in selected if m not in area_measures)
        try:
            rows = _measure_rows(
                grid,
                selected,
                classification=cls,
                partition=partition if cats == 2 else None,
                target_category=1,
                karlstrom_nb=karl if cats == 2 else (),
                leibovici_distance=args.leibovici_distance,
            )
        except ConsistencyError as exc:
            return task, None, str(exc)
        return task, rows, None

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as ex:
            results = list(ex.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    failed = 0
    written = 0
    ensemble: dict = {}
    uniform_values: dict = {}
    long_path = out / "results_long.csv"
    with open(long_path, "w", encoding="ascii") as fh:
        fh.write("scenario,replicate,uniform_flag,measure,band,value\n")
        for (label, _kind, _cats, rep, uflag), rows, err in results:
            if err is not None:
                log.error("replicate %s/%d aborted: %s", label, rep, err)
                failed += 1
                continue
            for m, band, value in rows:
                fh.write(f"{label},{rep},{uflag},{m},{band},{_fmt(value)}\n")
                written += 1
                key = (label, m, band)
                if uflag:
                    uniform_values[key] = value
                else:
                    ensemble.setdefault(key, []).append(value)

    summary_path = out / "summary.csv"
    with open(summary_path, "w", encoding="ascii") as fh:
        fh.write("scenario,measure,band,min,q1,median,q3,max,uniform\n")
        for key, values in ensemble.items():
            arr = np.asarray(values, dtype=np.float64)
            arr = arr[~np.isnan(arr)]
            if arr.size:
                quants = np.quantile(arr, (0.0, 0.25, 0.5, 0.75, 1.0))
            else:
                quants = (math.nan,) * 5
            star = uniform_values.get(key, math.nan)
            label, m, band = key
            cells = [label, m, band] + [_fmt(v) for v in quants] + [_fmt(star)]
            fh.write(",".join(cells) + "\n")

    plan_doc = {
        "version": __version__,
        "scenarios": [{"kind": k, "categories": c} for k, c in args.scenarios],
        "replicates": args.replicates,
        "rows": args.rows,
        "cols": args.cols,
        "master_seed": args.seed,
        "measures": list(args.measures),
        "bands": list(cls.breaks),
        "areas": args.areas if partition is not None else None,
        "uniform_case": not args.skip_uniform,
    }
    with open(out / "plan.json", "w", encoding="ascii") as fh:
        json.dump(plan_doc, fh, indent=2)
        fh.write("\n")

    print(f"wrote {written} rows to {long_path} and quantiles to {summary_path}")
    if failed:
        log.error("%d replicate(s) aborted", failed)
        return 1
    return 0


def _verify_grid(grid) -> list:
    """(name, passed, detail) for every identity check on one grid."""
    checks = []
    cls = DistanceClassification.default_for(grid)
    scheme = CooccurrenceScheme(grid.num_categories)
    sample = enumerate_pairs(grid, cls, scheme)
    dists = conditional_pmfs(sample)
    tol = MI_AGREEMENT_TOL

    n = grid.size
    expected = n * (n - 1) // 2
    checks.append(
        ("pair-total", sample.total_pairs == expected, f"count={sample.total_pairs}")
    )

    mass = abs(float(dists.p_w.probs.sum()) - 1.0)
    mass = max(mass, abs(float(dists.p_z.probs.sum()) - 1.0))
    for cond in dists.conditionals:
        if cond is not None:
            mass = max(mass, abs(float(cond.probs.sum()) - 1.0))
    checks.append(("pmf-mass", mass < 1e-9, f"residual={mass:.3e}"))

    mixture = np.zeros_like(dists.p_z.probs)
    for k, cond in enumerate(dists.conditionals):
        if cond is not None:
            mixture = mixture + float(dists.p_w.probs[k]) * cond.probs
    mix_res = float(np.max(np.abs(mixture - dists.p_z.probs)))
    checks.append(("mixture-consistency", mix_res < tol, f"residual={mix_res:.3e}"))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            dec = decompose_distributions(dists, pair_counts=sample.pair_counts)
        except ConsistencyError as exc:
            checks.append(("decomposition", False, str(exc)))
            return checks
        split = abs(dec.marginal - dec.mutual_information - dec.residual_global)
        checks.append(("entropy-split", split < tol, f"residual={split:.3e}"))

        h_cond = conditional_entropy(dists.joint, conditioning="cols")
        dual = abs(mutual_information(dists.joint) - (dec.marginal - h_cond))
        checks.append(("mi-dual-route", dual < tol, f"residual={dual:.3e}"))

        agg_mi = abs(
            dec.mutual_information - sum(b.p_w * b.info_partial for b in dec.bands)
        )
        checks.append(("mi-aggregation", agg_mi < tol, f"residual={agg_mi:.3e}"))

        agg_res = abs(
            dec.residual_global - sum(b.p_w * b.residual_partial for b in dec.bands)
        )
        checks.append(("residual-aggregation", agg_res < tol, f"residual={agg_res:.3e}"))

    if n <= 64:
        ref = enumerate_pairs_bruteforce(grid, cls, scheme)
        same = np.array_equal(ref.category_counts, sample.category_counts) and np.array_equal(
            ref.pair_counts, sample.pair_counts
        )
        checks.append(("bruteforce-oracle", same, "exact integer comparison"))

    return checks


def _cmd_verify(args) -> int:
    failures = 0
    for path in args.grids:
        try:
            grid = read_grid(path)
        except (ValueError, OSError) as exc:
            print(f"FAIL {path} read: {exc}")
            failures += 1
            continue
        for name, passed, detail in _verify_grid(grid):
            print(f"{'PASS' if passed else 'FAIL'} {path} {name} ({detail})")
            if not passed:
                failures += 1
    if failures:
        print(f"{failures} check(s) failed")
        return 1
    print("all identities hold")
    return 0


# ---------------------------------------------------------------------------
# parser wiring

def _add_order_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument(
        "--ordered",
        dest="ordered",
        action="store_true",
        help="distinguish pair orientation (read from the scan-order first pixel)",
    )
    group.add_argument(
        "--unordered", dest="ordered", action="store_false", help="ignore orientation"
    )
    p.set_defaults(ordered=False)


def _add_measure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--measures",
        type=_measures_arg,
        default=MEASURES,
        help=f"comma list from: {', '.join(MEASURES)} (default: all)",
    )
    p.add_argument(
        "--bands",
        type=_breaks_arg,
        default=None,
        help="comma list of distance break points, e.g. 0,1,2,5,10,20,30,70.711",
    )
    p.add_argument(
        "--karlstrom-distances",
        type=_distances_arg,
        default=_distances_arg(DEFAULT_KARLSTROM_DISTANCES),
        help=f"centroid distances for the smoothed index (default {DEFAULT_KARLSTROM_DISTANCES})",
    )
    p.add_argument(
        "--leibovici-distance",
        type=float,
        default=2.0,
        help="co-occurrence distance for the cumulative pair entropy (default 2)",
    )
    p.add_argument(
        "--areas",
        type=int,
        default=100,
        help="number of areas for the partition-based indices (default 100)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spatent",
        description="Spatial entropy measures for categorical lattice data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write scenario replicate grids + manifest")
    p.add_argument("--scenario", choices=SCENARIOS, required=True)
    p.add_argument("--rows", type=int, default=50)
    p.add_argument("--cols", type=int, default=50)
    p.add_argument("--categories", type=int, default=2)
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--uniform-pmf", action="store_true", help="exact equal category split")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("measure", help="compute measures on one grid file")
    p.add_argument("grid", help="grid file path")
    _add_measure_flags(p)
    _add_order_flags(p)
    p.add_argument("--target-category", type=int, default=1)
    p.add_argument(
        "--partition-seed",
        type=_partition_seed_arg,
        default=UNIFORM_PARTITION,
        help=f"integer seed for a random partition, or '{UNIFORM_PARTITION}' (default)",
    )
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("decompose", help="band decomposition of one grid")
    p.add_argument("grid", help="grid file path")
    p.add_argument("--bands", type=_breaks_arg, default=None)
    _add_order_flags(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("experiment", help="run a scenario ensemble to CSV")
    p.add_argument(
        "--scenarios",
        type=_plan_arg,
        default=_plan_arg(DEFAULT_DESIGN),
        help=f"comma list of kind:categories (default {DEFAULT_DESIGN})",
    )
    p.add_argument("--rows", type=int, default=50)
    p.add_argument("--cols", type=int, default=50)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    _add_measure_flags(p)
    p.add_argument(
        "--skip-uniform",
        action="store_true",
        help="omit the flagged equal-split replicate appended to each scenario",
    )
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("verify", help="identity suite on grid files")
    p.add_argument("grids", nargs="+", help="grid file path(s)")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
