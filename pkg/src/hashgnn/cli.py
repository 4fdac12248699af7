"""Command-line entry point: ``hashgnn {embed,linkpred,synth,bench-scaling}``.

Exit codes: 0 ok, 2 configuration, 3 parse (unreadable or malformed input),
4 validation, 5 resource (memory, unwritable output).
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time

from . import __version__
from ._validation import check_positive_int, check_ratio
from .evaluation import run_link_prediction
from .exceptions import ConfigError, HashGNNError, ResourceError
from .graph import generate_synthetic, load_graph, save_graph, write_mapping
from .sketch import embed, memory_footprint, write_embedding

log = logging.getLogger("hashgnn")

DEFAULTS = {"T": 2, "K": 200, "seed": 42, "ratio": 0.8, "trials": 5}


def parse_grid(spec: str) -> list[int]:
    """``"T=1..5"`` or ``"T=1,3,5"`` -> list of T values."""
    m = re.fullmatch(r"\s*T\s*=\s*(.+?)\s*", spec or "")
    if not m:
        raise ConfigError(f"grid spec must look like 'T=1..5' or 'T=1,2,3', got {spec!r}")
    body = m.group(1)
    try:
        if ".." in body:
            lo, hi = (int(x) for x in body.split(".."))
            values = list(range(lo, hi + 1))
        else:
            values = [int(x) for x in body.split(",")]
    except ValueError:
        raise ConfigError(f"bad grid values in {spec!r}") from None
    if not values or min(values) < 1:
        raise ConfigError(f"grid must list T values >= 1, got {spec!r}")
    return values


def parse_sizes(spec: str) -> list[int]:
    try:
        sizes = [int(float(x)) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--sizes must be a comma-separated list of integers, got {spec!r}") from None
    if not sizes or min(sizes) < 2:
        raise ConfigError(f"--sizes needs node counts >= 2, got {spec!r}")
    return sizes


def _budget_bytes(args):
    return int(args.memory_budget * 1024 * 1024)


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ResourceError(f"cannot write {path}: {exc.strerror}") from exc


def _resolved(args, *keys):
    return {k: getattr(args, k) for k in keys}


def cmd_embed(args) -> int:
    T = check_positive_int(args.T, "--T")
    K = check_positive_int(args.K, "--K")
    g = load_graph(args.edges, args.attrs)
    need = memory_footprint(g, T, K)
    if need > _budget_bytes(args):
        log.warning("planned state memory %.1f MB exceeds budget %.1f MB", need / 2**20, args.memory_budget)
    timings = []
    start = time.perf_counter()
    emb = embed(
        g, T, K, args.seed, threads=args.threads, keep_history=args.checkpoints,
        on_iteration=lambda t, s: timings.append((t, s)),
    )
    total = time.perf_counter() - start
    empty = emb.empty_rows()
    if empty.size:
        log.warning(
            "%d node(s) have no attributes and no neighbours; their rows are all sentinel (%d)",
            empty.size, emb.sentinel,
        )
    try:
        write_embedding(args.out, emb, labels=g.labels)
        write_mapping(g, args.out + ".map")
        if args.checkpoints:
            for t, rows in enumerate(emb.history, 1):
                snap = type(emb)(rows, t, emb.universe_size, emb.seed)
                write_embedding(f"{args.out}.iter{t}", snap, labels=g.labels)
    except OSError as exc:
        raise ResourceError(f"cannot write {args.out}: {exc.strerror}") from exc
    for t, s in timings:
        print(f"iteration {t}: {s:.3f} s", file=sys.stderr)
    print(
        f"embedded {g.node_count} nodes (K={K}, T={T}, seed={args.seed}) in {total:.3f} s -> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_linkpred(args) -> int:
    ratio = check_ratio(args.ratio, "--ratio")
    trials = check_positive_int(args.trials, "--trials")
    K = check_positive_int(args.K, "--K")
    Ts = parse_grid(args.grid) if args.grid else [check_positive_int(args.T, "--T")]
    g = load_graph(args.edges, args.attrs)
    reports = [
        run_link_prediction(g, ratio, T, K, trials, args.seed, threads=args.threads) for T in Ts
    ]
    if args.grid:
        best = max(reports, key=lambda r: r.auc)
        doc = {
            "grid": [r.to_dict() for r in reports],
            "best_T": best.config["T"],
            "config": {"grid": args.grid, "K": K, "seed": args.seed, "train_ratio": ratio, "trials": trials},
        }
    else:
        doc = reports[0].to_dict()
    _write_text(args.out, json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_synth(args) -> int:
    g = generate_synthetic(
        args.nodes, args.avg_degree, args.communities, args.attrs_per_node,
        args.universe, args.affinity, rng=args.seed,
    )
    try:
        save_graph(g, args.out + ".edges", args.out + ".attrs")
    except OSError as exc:
        raise ResourceError(f"cannot write {args.out}.*: {exc.strerror}") from exc
    print(
        f"wrote {g.node_count} nodes, {g.edge_count} edges (average degree {g.average_degree:.2f}) "
        f"to {args.out}.edges / {args.out}.attrs",
        file=sys.stderr,
    )
    return 0


def bench_scaling(sizes, Ts, K, seed, *, avg_degree=20.0, communities=2, attrs_per_node=10,
                  universe=200, affinity=0.9, threads=1, budget_bytes=None):
    """Embedding wall-clock for every (size, T) cell; ``None`` where the budget forbids a run."""
    table = {}
    for n in sizes:
        g = generate_synthetic(n, avg_degree, communities, attrs_per_node, universe, affinity, rng=seed)
        for T in Ts:
            need = memory_footprint(g, T, K)
            if budget_bytes is not None and need > budget_bytes:
                log.warning("skipping |V|=%d T=%d: needs %.1f MB over budget", n, T, need / 2**20)
                table[n, T] = None
                continue
            start = time.perf_counter()
            embed(g, T, K, seed, threads=threads)
            table[n, T] = time.perf_counter() - start
    return table


def cmd_bench_scaling(args) -> int:
    sizes = parse_sizes(args.sizes)
    Ts = parse_grid(args.grid) if args.grid else [check_positive_int(args.T, "--T")]
    K = check_positive_int(args.K, "--K")
    table = bench_scaling(
        sizes, Ts, K, args.seed, avg_degree=args.avg_degree, communities=args.communities,
        attrs_per_node=args.attrs_per_node, universe=args.universe, affinity=args.affinity,
        threads=args.threads, budget_bytes=_budget_bytes(args),
    )
    lines = [
        f"# bench-scaling K={K} seed={args.seed} avg_degree={args.avg_degree} "
        f"communities={args.communities} attrs_per_node={args.attrs_per_node} universe={args.universe}",
        "\t".join(["nodes", *(f"T={T}" for T in Ts)]),
    ]
    for n in sizes:
        cells = [("skipped" if table[n, T] is None else f"{table[n, T]:.4f}") for T in Ts]
        lines.append("\t".join([str(n), *cells]))
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hashgnn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, T=True):
        if T:
            p.add_argument("--T", type=int, default=DEFAULTS["T"], help="iterations (default 2)")
        p.add_argument("--K", type=int, default=DEFAULTS["K"], help="representation width (default 200)")
        p.add_argument("--seed", type=int, default=DEFAULTS["seed"])
        p.add_argument("--threads", type=int, default=1, help="worker threads; output does not depend on it")

    def generator(p):
        p.add_argument("--avg-degree", type=float, default=20.0)
        p.add_argument("--communities", type=int, default=2)
        p.add_argument("--attrs-per-node", type=int, default=10)
        p.add_argument("--universe", type=int, default=200)
        p.add_argument("--affinity", type=float, default=0.9)

    p = sub.add_parser("embed", help="embed every node of a graph")
    p.add_argument("--edges", required=True)
    p.add_argument("--attrs")
    p.add_argument("--out", required=True)
    p.add_argument("--checkpoints", action="store_true", help="also write the state after each iteration")
    p.add_argument("--memory-budget", type=float, default=4096.0, help="MB; warn above it")
    common(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("linkpred", help="link-prediction AUC over repeated edge splits")
    p.add_argument("--edges", required=True)
    p.add_argument("--attrs")
    p.add_argument("--out", help="report path (default stdout)")
    p.add_argument("--ratio", type=float, default=DEFAULTS["ratio"])
    p.add_argument("--trials", type=int, default=DEFAULTS["trials"])
    p.add_argument("--grid", help="T grid, e.g. 'T=1..5'")
    common(p)
    p.set_defaults(func=cmd_linkpred)

    p = sub.add_parser("synth", help="write a planted-partition attributed graph")
    p.add_argument("--out", required=True, help="path prefix; writes PREFIX.edges and PREFIX.attrs")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    generator(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench-scaling", help="embedding time over graph sizes and T")
    p.add_argument("--sizes", default="1000,10000")
    p.add_argument("--grid", help="T grid, e.g. 'T=1..3'")
    p.add_argument("--out", help="table path (default stdout)")
    p.add_argument("--memory-budget", type=float, default=4096.0, help="MB; larger cells are skipped")
    common(p)
    generator(p)
    p.set_defaults(func=cmd_bench_scaling)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        if getattr(args, "threads", 1) < 1:
            raise ConfigError("--threads must be >= 1")
        if getattr(args, "seed", 0) < 0:
            raise ConfigError("--seed must be non-negative")
        return args.func(args)
    except HashGNNError as exc:
        print(f"hashgnn: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError:
        print("hashgnn: error: out of memory", file=sys.stderr)
        return ResourceError.exit_code


if __name__ == "__main__":
    sys.exit(main())
