"""Command-line interface: dataset generation, clustering, evaluation,
oracle checks, and benchmark sweeps.

Exit codes are stable: 0 success, 2 usage or parse errors, 3 infeasible
must-link constraints, 4 enumeration-guard violations, 1 internal errors.
Every output directory receives a ``manifest.json`` recording the command,
the resolved configuration, the seeds, and digests of the input files; wall
times aside, identical manifests produce identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._svg import heatmap_svg, line_plot_svg, scatter_svg
from .baseline import sca_similarity, spectral_cluster
from .data import (
    IDEAL_CLUSTERS,
    Shape,
    SyntheticSpec,
    generate,
    load_edges,
    load_labels,
    load_mustlinks,
    load_points,
    load_zmask,
    sample_mustlinks_uniform,
    sample_mustlinks_within,
    save_labels,
    save_points,
    save_report,
    save_zmask,
)
from .exceptions import (
    ContractViolationError,
    EnumerationGuardError,
    MustLinkInfeasibleError,
    ParseError,
)
from .extract import extract_clusters
from .graph import (
    MustLinkSet,
    SimilarityGraph,
    build_knn_similarity,
    connected_components,
    scale_must_links,
)
from .metrics import EvalReport, accuracy, nmi, rmv
from .model import EdgeIndicator
from .oracle import ENUMERATION_GUARD, TheoremVerdict, brute_force_mip
from .solver import SolverConfig, cossc_solve

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_GUARD = 4

_SHAPE_TOKENS = [s.value for s in Shape]


def _beta_arg(raw: str):
    if raw == "auto":
        return "auto"
    try:
        return float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"beta must be 'auto' or a number, got {raw!r}")


def _resolve_beta_rule(rule, n: int, d: int) -> float:
    if isinstance(rule, float):
        return rule
    if rule == "auto":
        return (d - 1) / n
    if rule == "1/n":
        return 1.0 / n
    if rule == "1/10n":
        return 1.0 / (10.0 * n)
    return float(rule)


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, command, config: dict, seeds, inputs):
    manifest = {
        "version": __version__,
        "command": list(command),
        "config": config,
        "seeds": [int(s) for s in seeds],
        "input_digests": {str(p): _digest(p) for p in inputs},
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def _cmd_gen(args, argv):
    spec = SyntheticSpec(shape=Shape(args.shape), n_per_cluster=args.n,
                         noise=args.noise, seed=args.seed)
    points, labels = generate(spec)
    out = _out_dir(args)
    save_points(out / "points.csv", points)
    save_labels(out / "labels.csv", labels)
    _write_manifest(out, argv, {
        "shape": spec.shape.value,
        "n_per_cluster": spec.n_per_cluster,
        "noise": spec.noise,
        "seed": spec.seed,
        "ideal_clusters": spec.ideal_clusters,
    }, seeds=[spec.seed], inputs=[])
    return EXIT_OK


# ---------------------------------------------------------------------------
# cluster
# ---------------------------------------------------------------------------


def _load_input_graph(args):
    inputs = []
    points = None
    if args.points:
        points = load_points(args.points)
        inputs.append(args.points)
        k_n = None if args.k_n in (None, "auto") else int(args.k_n)
        graph = build_knn_similarity(points, k_n=k_n, sigma_index=args.sigma_index)
    else:
        graph = load_edges(args.edges)
        inputs.append(args.edges)
    return graph, points, inputs


def _cmd_cluster(args, argv):
    t_start = time.perf_counter()
    graph, points, inputs = _load_input_graph(args)

    mustlinks = MustLinkSet.empty()
    if args.mustlinks:
        mustlinks = load_mustlinks(args.mustlinks)
        inputs.append(args.mustlinks)
    graph = scale_must_links(graph, mustlinks, args.p, inject_missing=args.inject_missing)

    beta = None if args.beta == "auto" else float(args.beta)
    config = SolverConfig(d=args.d, beta=beta, p=args.p, eps=args.eps,
                          max_iter=args.max_iter, seed=args.seed)
    indicator, _, trace = cossc_solve(graph, config)
    assignment = extract_clusters(graph, indicator)

    acc_val = nmi_val = None
    if args.truth:
        truth = load_labels(args.truth)
        inputs.append(args.truth)
        acc_val = accuracy(assignment.labels, truth)
        nmi_val = nmi(assignment.labels, truth)
    report = EvalReport(
        acc=acc_val,
        nmi=nmi_val,
        rmv=rmv(graph, indicator, mustlinks),
        num_clusters=assignment.num_clusters,
        iterations=trace.iterations,
        f_final=trace.f_history[-1],
        time_ms=(time.perf_counter() - t_start) * 1000.0,
    )

    out = _out_dir(args)
    save_labels(out / "labels.csv", assignment)
    save_report(out / "report.json", report)
    save_zmask(out / "zmask.tsv", graph, indicator.values)
    (out / "trace.json").write_text(json.dumps({
        "f_history": trace.f_history,
        "z_changes": trace.z_changes,
        "termination": trace.termination.value,
        "iterations": trace.iterations,
        "wall_time_ms": trace.wall_time * 1000.0,
    }, indent=2) + "\n")
    if args.svg and points is not None and points.shape[1] == 2:
        removed = [
            (int(i), int(j))
            for i, j, kept in zip(graph.rows, graph.cols, assignment.surviving_edges)
            if not kept
        ]
        kept = [
            (int(i), int(j))
            for i, j, keep in zip(graph.rows, graph.cols, assignment.surviving_edges)
            if keep
        ]
        (out / "plot.svg").write_text(scatter_svg(
            points, assignment.labels, removed_edges=removed, kept_edges=kept,
            title=f"{assignment.num_clusters} clusters",
        ))
    _write_manifest(out, argv, {
        "d": args.d,
        "beta": "auto" if beta is None else beta,
        "beta_resolved": config.resolved_beta(graph.n),
        "p": args.p,
        "eps": args.eps,
        "max_iter": args.max_iter,
        "seed": args.seed,
        "k_n": args.k_n,
        "sigma_index": args.sigma_index,
        "inject_missing": args.inject_missing,
    }, seeds=[args.seed], inputs=inputs)
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def _cmd_eval(args, argv):
    t_start = time.perf_counter()
    pred = load_labels(args.pred)
    truth = load_labels(args.truth)
    rmv_val = None
    if args.zmask and args.mustlinks:
        pairs, values = load_zmask(args.zmask)
        mask_graph = SimilarityGraph.from_edges(
            int(pairs.max()) + 1 if pairs.size else 1, pairs, np.ones(pairs.shape[0])
        )
        order = [mask_graph.edge_index[(int(i), int(j))] for i, j in pairs]
        aligned = np.empty(values.shape[0])
        aligned[order] = values
        rmv_val = rmv(mask_graph, EdgeIndicator(aligned), load_mustlinks(args.mustlinks))
    report = EvalReport(
        acc=accuracy(pred, truth),
        nmi=nmi(pred, truth),
        rmv=rmv_val,
        num_clusters=int(np.unique(pred).size),
        iterations=0,
        f_final=None,
        time_ms=(time.perf_counter() - t_start) * 1000.0,
    )
    payload = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(payload)
    else:
        sys.stdout.write(payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def _oracle_verdicts(graph, mustlinks, result, beta, p, d):
    _, full_components = connected_components(graph.n, graph.rows, graph.cols)
    component_counts = [
        connected_components(graph.n, graph.rows[z.values > 0.5], graph.cols[z.values > 0.5])[1]
        for z in result.minimizers
    ]

    if beta > 1.0:
        all_ones = (
            result.num_minimizers == 1
            and bool(np.all(result.minimizers[0].values == 1.0))
        )
        keep_all = TheoremVerdict.PASS if all_ones else TheoremVerdict.FAIL
    else:
        keep_all = TheoremVerdict.NOT_APPLICABLE

    if beta < result.beta_bar and full_components <= d:
        exact = all(c == d for c in component_counts)
        small_beta = TheoremVerdict.PASS if exact else TheoremVerdict.FAIL
    else:
        small_beta = TheoremVerdict.NOT_APPLICABLE

    if full_components <= d:
        bound = all(c <= d for c in component_counts)
        within = TheoremVerdict.PASS if bound else TheoremVerdict.FAIL
    else:
        within = TheoremVerdict.NOT_APPLICABLE

    if len(mustlinks) == 0:
        kept = TheoremVerdict.PASS
    elif beta * p > 2.0:
        from .graph import edge_indices_of_pairs

        idx = edge_indices_of_pairs(graph, mustlinks.pairs)
        ok = all(bool(np.all(z.values[idx] == 1.0)) for z in result.minimizers)
        kept = TheoremVerdict.PASS if ok else TheoremVerdict.FAIL
    else:
        kept = TheoremVerdict.NOT_APPLICABLE

    return {
        "keep_all_edges_when_beta_above_one": keep_all.value,
        "exactly_d_components_when_beta_below_bar": small_beta.value,
        "at_most_d_components": within.value,
        "mustlinks_kept_when_scaled_strongly": kept.value,
    }


def _cmd_oracle(args, argv):
    graph = load_edges(args.edges)
    mustlinks = MustLinkSet.empty()
    if args.mustlinks:
        mustlinks = load_mustlinks(args.mustlinks)
    graph = scale_must_links(graph, mustlinks, args.p)
    result = brute_force_mip(graph, args.beta, args.d, guard=ENUMERATION_GUARD)
    payload = json.dumps({
        "edge_count": graph.num_edges,
        "d": args.d,
        "beta": args.beta,
        "p": args.p,
        "global_value": result.global_value,
        "num_minimizers": result.num_minimizers,
        "beta_bar": result.beta_bar,
        "verdicts": _oracle_verdicts(graph, mustlinks, result, args.beta, args.p, args.d),
    }, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(payload)
    else:
        sys.stdout.write(payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

_BENCH_COLUMNS = [
    "shape", "n", "d", "beta_rule", "beta", "p", "s", "seed", "method",
    "acc", "nmi", "rmv", "clusters", "iterations", "f_final", "time_ms", "status",
]


def _bench_cell_key(row):
    return (row["shape"], row["d"], row["beta_rule"], row["p"], row["s"],
            row["seed"], row["method"])


def _run_bench_cell(cache, cache_lock, args, shape, d_offset, beta_rule, p, s, seed, method):
    t_start = time.perf_counter()
    row = {
        "shape": shape.value, "n": "", "d": "", "beta_rule": str(beta_rule),
        "beta": "", "p": p, "s": s, "seed": seed, "method": method,
        "acc": "", "nmi": "", "rmv": "", "clusters": "", "iterations": "",
        "f_final": "", "status": "ok",
    }
    try:
        key = (shape, seed)
        with cache_lock:
            cached = cache.get(key)
        if cached is None:
            spec = SyntheticSpec(shape=shape, n_per_cluster=args.n, noise=args.noise, seed=seed)
            points, truth = generate(spec)
            graph = build_knn_similarity(points)
            cached = (points, truth, graph)
            with cache_lock:
                cache[key] = cached
        _, truth, graph = cached
        k_star = IDEAL_CLUSTERS[shape]
        d = k_star + d_offset
        row["n"] = graph.n
        row["d"] = d

        if s > 0:
            if args.mustlink_mode == "within":
                mustlinks = sample_mustlinks_within(truth, graph, s, seed + 1000)
            else:
                mustlinks = sample_mustlinks_uniform(graph, s / 100.0, seed + 1000)
        else:
            mustlinks = MustLinkSet.empty()
        scaled = scale_must_links(graph, mustlinks, p)
        beta = _resolve_beta_rule(beta_rule, scaled.n, d)
        row["beta"] = beta

        if method == "sca":
            override = sca_similarity(graph, mustlinks)
            assignment = spectral_cluster(override, d, seed=seed)
            if len(mustlinks):
                labels = assignment.labels
                row["rmv"] = float(np.mean([
                    labels[i] != labels[j] for i, j in mustlinks
                ]))
            else:
                row["rmv"] = 0.0
            row["iterations"] = 0
        else:
            config = SolverConfig(d=d, beta=beta, p=p, eps=args.eps,
                                  max_iter=args.max_iter, seed=seed)
            indicator, _, trace = cossc_solve(scaled, config)
            assignment = extract_clusters(scaled, indicator)
            row["rmv"] = rmv(scaled, indicator, mustlinks)
            row["iterations"] = trace.iterations
            row["f_final"] = trace.f_history[-1]
        row["acc"] = accuracy(assignment.labels, truth)
        row["nmi"] = nmi(assignment.labels, truth)
        row["clusters"] = assignment.num_clusters
    except Exception as exc:  # per-cell failures must not kill the sweep
        row["status"] = f"error:{type(exc).__name__}"
    row["time_ms"] = (time.perf_counter() - t_start) * 1000.0
    return row


def _bench_plots(out, rows):
    ok = [r for r in rows if r["status"] == "ok"]
    by_shape_d = {}
    for r in ok:
        by_shape_d.setdefault(r["shape"], {}).setdefault(int(r["d"]), []).append(float(r["acc"]))
    series = [
        (shape, [(d, float(np.mean(vals))) for d, vals in sorted(per_d.items())])
        for shape, per_d in sorted(by_shape_d.items())
    ]
    (out / "acc_vs_d.svg").write_text(
        line_plot_svg(series, xlabel="d", ylabel="mean ACC", title="accuracy vs overestimate d")
    )
    for shape in sorted({r["shape"] for r in ok}):
        shape_rows = [r for r in ok if r["shape"] == shape and r["method"] == "cossc"]
        rules = sorted({r["beta_rule"] for r in shape_rows})
        ps = sorted({float(r["p"]) for r in shape_rows})
        if not rules or not ps:
            continue
        grid = np.full((len(rules), len(ps)), np.nan)
        for ri, rule in enumerate(rules):
            for ci, p in enumerate(ps):
                vals = [float(r["rmv"]) for r in shape_rows
                        if r["beta_rule"] == rule and float(r["p"]) == p and r["rmv"] != ""]
                if vals:
                    grid[ri, ci] = float(np.mean(vals))
        (out / f"rmv_heatmap_{shape}.svg").write_text(heatmap_svg(
            grid, row_labels=[f"beta={r}" for r in rules],
            col_labels=[f"p={p:g}" for p in ps],
            title=f"mean RMV, {shape}",
        ))


def _cmd_bench(args, argv):
    shapes = [Shape(tok) for tok in args.shapes.split(",") if tok]
    d_offsets = [int(tok) for tok in args.d_offsets.split(",") if tok]
    beta_rules = [tok for tok in args.beta_grid.split(",") if tok]
    p_grid = [float(tok) for tok in args.p_grid.split(",") if tok]
    s_grid = [float(tok) for tok in args.s_grid.split(",") if tok]
    seeds = [int(tok) for tok in args.seeds.split(",") if tok]
    methods = [tok for tok in args.method.split(",") if tok]
    if not (shapes and d_offsets and beta_rules and p_grid and s_grid and seeds and methods):
        raise ContractViolationError("bench grids must be nonempty")
    jobs = args.jobs or int(os.environ.get("COSSC_JOBS", "1"))

    out = _out_dir(args)
    csv_path = out / "bench.csv"
    file_existed = csv_path.exists()
    done = set()
    existing_rows = []
    if file_existed:
        with csv_path.open() as handle:
            for row in csv.DictReader(handle):
                existing_rows.append(row)
                if row["status"] == "ok":
                    done.add(_bench_cell_key(row))

    cells = [
        (shape, d_off, rule, p, s, seed, method)
        for shape in shapes for d_off in d_offsets for rule in beta_rules
        for p in p_grid for s in s_grid for seed in seeds for method in methods
    ]
    cache: dict = {}
    cache_lock = threading.Lock()
    write_lock = threading.Lock()

    new_rows = []
    with csv_path.open("a", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=_BENCH_COLUMNS)
        if not file_existed:
            writer.writeheader()

        def run(cell):
            shape, d_off, rule, p, s, seed, method = cell
            probe = {"shape": shape.value, "d": str(IDEAL_CLUSTERS[shape] + d_off),
                     "beta_rule": str(rule), "p": str(p), "s": str(s),
                     "seed": str(seed), "method": method}
            if _bench_cell_key(probe) in done:
                return None
            row = _run_bench_cell(cache, cache_lock, args, shape, d_off, rule,
                                  p, s, seed, method)
            with write_lock:
                writer.writerow(row)
                handle.flush()
                new_rows.append(row)
            return row

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                list(pool.map(run, cells))
        else:
            for cell in cells:
                run(cell)

    # canonical row order so reruns produce identical files
    all_rows = existing_rows + [
        {k: ("" if v == "" else str(v)) for k, v in row.items()} for row in new_rows
    ]
    all_rows.sort(key=_bench_cell_key)
    with csv_path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=_BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(all_rows)

    _bench_plots(out, all_rows)
    _write_manifest(out, argv, {
        "shapes": [s.value for s in shapes],
        "d_offsets": d_offsets,
        "beta_grid": beta_rules,
        "p_grid": p_grid,
        "s_grid": s_grid,
        "method": methods,
        "n_per_cluster": args.n,
        "noise": args.noise,
        "eps": args.eps,
        "max_iter": args.max_iter,
        "mustlink_mode": args.mustlink_mode,
        "jobs": jobs,
    }, seeds=seeds, inputs=[])
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cossc",
        description="Semi-supervised clustering by sparse graph partitioning.",
    )
    parser.add_argument("--version", action="version", version=f"cossc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset")
    gen.add_argument("--shape", required=True, choices=_SHAPE_TOKENS)
    gen.add_argument("--n", type=int, default=100, help="points per cluster")
    gen.add_argument("--noise", type=float, default=0.05)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    cluster = sub.add_parser("cluster", help="cluster points or a prebuilt graph")
    src = cluster.add_mutually_exclusive_group(required=True)
    src.add_argument("--points", help="points.csv input")
    src.add_argument("--edges", help="edges.tsv input")
    cluster.add_argument("--mustlinks", help="mustlinks.tsv input")
    cluster.add_argument("--truth", help="labels.csv with ground truth for scoring")
    cluster.add_argument("--d", type=int, required=True,
                         help="overestimate of the cluster count")
    cluster.add_argument("--beta", type=_beta_arg, default="auto")
    cluster.add_argument("--p", type=float, default=10.0)
    cluster.add_argument("--eps", type=float, default=1e-3)
    cluster.add_argument("--max-iter", type=int, default=500)
    cluster.add_argument("--seed", type=int, default=0)
    cluster.add_argument("--k-n", default="auto",
                         help="mutual-kNN neighborhood size (default ceil(ln n))")
    cluster.add_argument("--sigma-index", type=int, default=7)
    cluster.add_argument("--inject-missing", action="store_true",
                         help="turn unsupported must-link pairs into synthetic edges")
    cluster.add_argument("--svg", action="store_true", help="emit a cluster plot")
    cluster.add_argument("--out", required=True)
    cluster.set_defaults(func=_cmd_cluster)

    evaluate = sub.add_parser("eval", help="score predicted labels against truth")
    evaluate.add_argument("--pred", required=True)
    evaluate.add_argument("--truth", required=True)
    evaluate.add_argument("--zmask", help="zmask.tsv of surviving edges (for RMV)")
    evaluate.add_argument("--mustlinks", help="mustlinks.tsv (for RMV)")
    evaluate.add_argument("--out", help="write report.json here instead of stdout")
    evaluate.set_defaults(func=_cmd_eval)

    oracle = sub.add_parser("oracle", help="brute-force check a tiny instance")
    oracle.add_argument("--edges", required=True)
    oracle.add_argument("--mustlinks")
    oracle.add_argument("--d", type=int, required=True)
    oracle.add_argument("--beta", type=float, required=True)
    oracle.add_argument("--p", type=float, default=10.0)
    oracle.add_argument("--out")
    oracle.set_defaults(func=_cmd_oracle)

    bench = sub.add_parser("bench", help="run a benchmark sweep")
    bench.add_argument("--shapes", default=",".join(_SHAPE_TOKENS))
    bench.add_argument("--d-offsets", default="0,1,2,3,4,5",
                       help="offsets added to each shape's ideal cluster count")
    bench.add_argument("--beta-grid", default="auto",
                       help="comma list of: auto, 1/n, 1/10n, or numbers")
    bench.add_argument("--p-grid", default="10")
    bench.add_argument("--s-grid", default="0", help="must-link percentages")
    bench.add_argument("--seeds", default="0")
    bench.add_argument("--method", default="cossc", help="comma list of: cossc, sca")
    bench.add_argument("--n", type=int, default=100, help="points per cluster")
    bench.add_argument("--noise", type=float, default=0.05)
    bench.add_argument("--eps", type=float, default=1e-3)
    bench.add_argument("--max-iter", type=int, default=500)
    bench.add_argument("--mustlink-mode", choices=["within", "uniform"], default="within")
    bench.add_argument("--jobs", type=int, default=0,
                       help="parallel cells (default: COSSC_JOBS or 1)")
    bench.add_argument("--out", required=True)
    bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except MustLinkInfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except EnumerationGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ParseError, ContractViolationError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
