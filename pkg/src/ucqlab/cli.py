"""Command-line surface: classify, enumerate, reduce, bench, qc, gen-graph.

Exit codes: 0 success / Tractable; 2 IntractableUnderVUTD; 3 outside the
classifier's scope; 1 input or usage errors.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
from pathlib import Path

from .bench import render_figures, run_bench
from .database import DatabaseError, load_database
from .engine import brute_force_answers, enumerate_union
from .extension import UnsupportedScopeError, Verdict, classify_union
from .queries import QueryError, parse_query
from .reductions import (
    ReductionError,
    build_reduction_database,
    format_graph,
    load_graph,
    planted_triangle,
    qc_database_from_graph,
    qc_evaluate,
    random_tripartite,
    save_graph,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INTRACTABLE = 2
EXIT_UNSUPPORTED = 3


def _read_query(path: str):
    return parse_query(Path(path).read_text(encoding="utf-8"))


def cmd_classify(args) -> int:
    union = _read_query(args.query_file)
    try:
        result = classify_union(union)
    except UnsupportedScopeError as exc:
        print(f'{{"error": "{exc.reason}"}}')
        print(f"unsupported scope: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    print(result.to_json())
    return EXIT_OK if result.verdict is Verdict.TRACTABLE else EXIT_INTRACTABLE


def cmd_enumerate(args) -> int:
    union = _read_query(args.query_file)
    db = load_database(args.db_dir)
    writer = csv.writer(sys.stdout)
    try:
        result = classify_union(union)
        tractable = result.verdict is Verdict.TRACTABLE
    except UnsupportedScopeError:
        result = None
        tractable = False
    if tractable:
        stream = enumerate_union(result.resolved, db)
    else:
        print(
            "warning: query not classified tractable; falling back to "
            "brute force",
            file=sys.stderr,
        )
        stream = iter(sorted(brute_force_answers(union, db)))
    emitted = 0
    for row in stream:
        writer.writerow(db.decode_tuple(row))
        emitted += 1
        if args.limit is not None and emitted >= args.limit:
            break
    return EXIT_OK


def cmd_reduce(args) -> int:
    union = _read_query(args.query_file)
    graph = load_graph(args.graph_file)
    try:
        result = classify_union(union)
    except UnsupportedScopeError as exc:
        print(f"unsupported scope: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if result.verdict is Verdict.TRACTABLE or result.plan is None:
        print("query is tractable; nothing to reduce", file=sys.stderr)
        return EXIT_ERROR
    q1 = result.resolved.original.disjuncts[result.difficult_index]
    db, _ = build_reduction_database(q1, result.plan, graph)
    from .database import save_database

    save_database(db, args.out)
    print(result.to_json())
    return EXIT_OK


def cmd_bench(args) -> int:
    union = _read_query(args.query_file)
    sizes = [int(s) for s in args.sizes.split(",")]
    report = run_bench(list(union.disjuncts), sizes, args.seed)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    report.to_csv(outdir / "bench.csv")
    figures = render_figures(report, outdir)
    print(report.format_table())
    for path in figures:
        print(f"figure: {path}")
    print(f"csv: {outdir / 'bench.csv'}")
    return EXIT_OK


def _random_spec(spec: str, seed: int, planted: bool):
    parts = spec.split(",")
    if len(parts) != 4:
        raise ReductionError("--random expects n1,n2,n3,p")
    n1, n2, n3 = (int(x) for x in parts[:3])
    p = float(parts[3])
    rng = random.Random(seed)
    if planted:
        return planted_triangle(n1, n2, n3, rng, p)
    return random_tripartite(n1, n2, n3, p, rng)


def cmd_qc(args) -> int:
    if args.graph_file:
        graph = load_graph(args.graph_file)
    elif args.random:
        graph = _random_spec(args.random, args.seed, planted=False)
    else:
        print("qc needs a graph file or --random", file=sys.stderr)
        return EXIT_ERROR
    db = qc_database_from_graph(args.c, graph)
    bot = db.lookup("bot")
    witness = tuple(bot for _ in range(2 * args.c))
    found = bot is not None and any(
        row == witness for row in qc_evaluate(args.c, db)
    )
    print(f"seed: {args.seed}")
    print("witness found" if found else "no witness")
    return EXIT_OK


def cmd_gen_graph(args) -> int:
    graph = _random_spec(args.random, args.seed, planted=args.planted)
    if args.out:
        save_graph(graph, args.out)
        print(f"wrote {args.out} (seed {args.seed})")
    else:
        sys.stdout.write(format_graph(graph))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ucqlab",
        description="Classify, evaluate, and stress-test unions of "
        "conjunctive queries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="dichotomy verdict as JSON")
    p.add_argument("query_file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("enumerate", help="stream answers as CSV rows")
    p.add_argument("query_file")
    p.add_argument("db_dir")
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("reduce", help="materialize a triangle-encoding database")
    p.add_argument("query_file")
    p.add_argument("graph_file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("bench", help="preprocessing/delay sweep with figures")
    p.add_argument("query_file")
    p.add_argument("--sizes", default="1024,2048,4096,8192,16384")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="bench-report")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("qc", help="guarded-triangle family end to end")
    p.add_argument("c", type=int)
    p.add_argument("graph_file", nargs="?")
    p.add_argument("--random", help="n1,n2,n3,p")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_qc)

    p = sub.add_parser("gen-graph", help="emit a random tripartite graph")
    p.add_argument("--random", required=True, help="n1,n2,n3,p")
    p.add_argument("--planted", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (QueryError, DatabaseError, ReductionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
