"""Command-line frontend: generate, decompose, simulate, verify, scan.

Every command is deterministic given its arguments and seed; numeric CSV
fields are printed with 17 significant digits so identical invocations are
byte-identical and downstream diffs are exact. Exit codes: 0 success,
1 usage or I/O error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import decomposition, graphs, walk
from .decomposition import FidPartition, FidViolation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2

SIMULATE_COLUMNS = [
    "x", "y", "t",
    "probability_fid", "probability_direct", "abs_diff",
    "subgraph", "tilde", "correction_const", "correction_cos", "correction_cross",
]
SCAN_COLUMNS = ["family", "size", "t", "return_probability", "bound", "within_bound"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; remap to the usage exit code
    def error(self, message):
        raise _UsageError(message)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _clamp01(value: float) -> float:
    return min(max(float(value), 0.0), 1.0)


@contextmanager
def _open_out(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _write_csv(stream, columns, rows) -> None:
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) if v is not None else "" for v in row) + "\n")


def _write_json(stream, columns, rows) -> None:
    objects = [
        {c: v for c, v in zip(columns, row) if v is not None}
        for row in rows
    ]
    stream.write(json.dumps(objects, indent=2) + "\n")


def _emit(stream, fmt: str, columns, rows) -> None:
    if fmt == "json":
        _write_json(stream, columns, rows)
    else:
        _write_csv(stream, columns, rows)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("CTQW_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise _UsageError(f"CTQW_SEED must be an integer, got {env!r}") from None
    return 0


def _load_graph(args) -> graphs.Graph:
    if args.graph is not None and args.family is not None:
        raise _UsageError("give exactly one graph source: --graph or --family")
    if args.graph is not None:
        with open(args.graph, "r", encoding="utf-8") as fh:
            return graphs.parse_edge_list(fh.read())
    if args.family is None:
        raise _UsageError("a graph source is required: --graph FILE or --family NAME --n N")
    if args.n is None:
        raise _UsageError("--family requires --n")
    return graphs.generate(args.family, args.n, p=args.p, seed=_resolve_seed(args))


def _load_partition(args, g: graphs.Graph) -> FidPartition | FidViolation:
    if args.blocks_file is not None:
        with open(args.blocks_file, "r", encoding="utf-8") as fh:
            blocks = decomposition.parse_blocks(fh.read())
        return decomposition.verify_fid(g, blocks)
    strategy = args.strategy
    if strategy == "trivial":
        return decomposition.verify_fid(g, [list(g.vertices())])
    if strategy == "singleton":
        return decomposition.verify_fid(g, [[v] for v in g.vertices()])
    if strategy == "twin":
        return decomposition.twin_coarsen(g)
    if strategy == "dominating":
        part = decomposition.dominating_split(g)
        if part is None:
            raise _VerifyFailure("graph has no dominating vertex; dominating split undefined")
        return part
    if strategy == "clique":
        if not args.clique:
            raise _UsageError("--strategy clique requires --clique V1,V2,...")
        members = _parse_int_list(args.clique, "--clique")
        return decomposition.clique_gateway_split(g, members)
    raise _UsageError(f"unknown strategy {strategy!r}")


class _VerifyFailure(Exception):
    pass


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise _UsageError(f"{flag} expects a comma-separated integer list, got {text!r}") from None


def _times(args) -> np.ndarray:
    return walk.time_grid(args.t_min, args.t_max, args.t_steps)


def cmd_gen(args) -> int:
    if args.family is None:
        raise _UsageError("gen requires --family NAME --n N")
    if args.n is None:
        raise _UsageError("--family requires --n")
    g = graphs.generate(args.family, args.n, p=args.p, seed=_resolve_seed(args))
    with _open_out(args.out) as stream:
        stream.write(graphs.serialize_edge_list(g))
    return EXIT_OK


def cmd_decompose(args) -> int:
    g = _load_graph(args)
    part = _load_partition(args, g)
    with _open_out(args.out) as stream:
        if isinstance(part, FidViolation):
            if args.format == "json":
                stream.write(json.dumps({"valid": False, "kind": part.kind,
                                         "violation": part.describe()}, indent=2) + "\n")
            else:
                stream.write(f"INVALID {part.kind}: {part.describe()}\n")
            return EXIT_VERIFY
        reduced = decomposition.reduced_matrix(part)
        if args.format == "json":
            payload = {
                "valid": True,
                "n": part.n,
                "blocks": [list(b) for b in part.blocks],
                "sizes": part.sizes.tolist(),
                "d_tilde": part.d_tilde.tolist(),
                "block_adjacency": part.block_adjacency.astype(int).tolist(),
                "reduced_matrix": reduced.tolist(),
            }
            stream.write(json.dumps(payload, indent=2) + "\n")
        else:
            stream.write(f"vertices: {part.n}\n")
            stream.write(f"blocks: {part.k}\n")
            for i, block in enumerate(part.blocks):
                verts = " ".join(str(v) for v in block)
                stream.write(f"block {i + 1}: size={part.sizes[i]} "
                             f"d_tilde={part.d_tilde[i]} vertices: {verts}\n")
            pairs = [f"({i + 1},{j + 1})"
                     for i in range(part.k) for j in range(i + 1, part.k)
                     if part.block_adjacency[i, j]]
            stream.write("joined pairs: " + (" ".join(pairs) if pairs else "none") + "\n")
            stream.write("reduced matrix:\n")
            for row in reduced:
                stream.write(" ".join(str(int(v)) for v in row) + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    g = _load_graph(args)
    part = _load_partition(args, g)
    if isinstance(part, FidViolation):
        print(f"INVALID {part.kind}: {part.describe()}", file=sys.stderr)
        return EXIT_VERIFY
    x = args.start
    g.index(x)
    times = _times(args)

    term_keys = ["subgraph", "tilde", "correction_const", "correction_cos", "correction_cross"]
    rows = []
    fid_grid = np.empty((len(times), g.n))
    for y in g.vertices():
        for ti, t in enumerate(times):
            rep = walk.probability_fid_terms(g, part, x, y, float(t))
            direct = walk.probability_direct(g, x, y, float(t)).probability
            fid_grid[ti, y - 1] = rep.probability
            terms = rep.terms or {}
            row = [x, y, float(t),
                   _clamp01(rep.probability), _clamp01(direct),
                   abs(rep.probability - direct)]
            row.extend(terms.get(k) for k in term_keys)
            rows.append(row)

    with _open_out(args.out) as stream:
        _emit(stream, args.format, SIMULATE_COLUMNS, rows)
    if args.plot:
        from . import plotting

        plotting.plot_simulation(times, np.clip(fid_grid, 0.0, 1.0), x, args.plot)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load_graph(args)
    try:
        part = _load_partition(args, g)
    except _VerifyFailure as err:
        print(f"FAIL partition: {err}")
        return EXIT_VERIFY
    if isinstance(part, FidViolation):
        print(f"FAIL partition: {part.describe()}")
        return EXIT_VERIFY
    print("PASS partition: valid block structure")
    results = walk.invariant_report(g, part, _times(args), tol=args.tol)
    for check in results:
        print(f"{'PASS' if check.passed else 'FAIL'} {check.name}: {check.detail}")
    return EXIT_OK if all(c.passed for c in results) else EXIT_VERIFY


def cmd_scan(args) -> int:
    sizes = _parse_int_list(args.sizes, "--sizes")
    times = _times(args)
    rows = walk.localization_scan(args.scan_family, sizes, times, gateways=args.gateways)
    table = [
        [args.scan_family, r.size, r.t, _clamp01(r.return_probability), r.bound,
         (1.0 - r.return_probability) <= r.bound + args.tol]
        for r in rows
    ]
    with _open_out(args.out) as stream:
        _emit(stream, args.format, SCAN_COLUMNS, table)
    if args.plot:
        from . import plotting

        plotting.plot_scan(rows, args.plot)
    return EXIT_OK


def _add_graph_source(parser) -> None:
    parser.add_argument("--graph", metavar="FILE", help="edge-list file to load")
    parser.add_argument("--family", choices=graphs.GENERATOR_FAMILIES,
                        help="generator family (requires --n)")
    parser.add_argument("--n", type=int, help="vertex count for --family")
    parser.add_argument("--p", type=float, default=None,
                        help="edge probability for random families")
    parser.add_argument("--seed", type=int, default=None,
                        help="PRNG seed (fallback: CTQW_SEED env var, then 0)")


def _add_partition_source(parser) -> None:
    parser.add_argument("--blocks-file", metavar="FILE",
                        help="partition file: one line of vertex labels per block")
    parser.add_argument("--strategy",
                        choices=("trivial", "singleton", "twin", "dominating", "clique"),
                        default="twin", help="partition construction strategy")
    parser.add_argument("--clique", metavar="V1,V2,...",
                        help="clique vertices for --strategy clique")


def _add_time_grid(parser) -> None:
    parser.add_argument("--t-min", type=float, default=0.0)
    parser.add_argument("--t-max", type=float, default=walk.TWO_PI)
    parser.add_argument("--t-steps", type=int, default=64)


def _add_output(parser, formats=("csv", "json")) -> None:
    parser.add_argument("--format", choices=formats, default=formats[0])
    parser.add_argument("--out", metavar="FILE", help="write output here instead of stdout")


def _build_parser() -> _Parser:
    parser = _Parser(prog="ctqw",
                     description="Continuous-time quantum walks on finite graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph and write its edge list")
    _add_graph_source(gen)
    gen.add_argument("--out", metavar="FILE", help="write the edge list here instead of stdout")
    gen.set_defaults(handler=cmd_gen)

    dec = sub.add_parser("decompose", help="build/verify a partition and report its structure")
    _add_graph_source(dec)
    _add_partition_source(dec)
    _add_output(dec, formats=("text", "json"))
    dec.set_defaults(handler=cmd_decompose)

    sim = sub.add_parser("simulate", help="tabulate walk probabilities from a start vertex")
    _add_graph_source(sim)
    _add_partition_source(sim)
    _add_time_grid(sim)
    _add_output(sim)
    sim.add_argument("--start", type=int, default=1, help="start vertex (1-based)")
    sim.add_argument("--plot", metavar="FILE", help="also render probability curves to FILE")
    sim.set_defaults(handler=cmd_simulate)

    ver = sub.add_parser("verify", help="run structural and spectral invariant checks")
    _add_graph_source(ver)
    _add_partition_source(ver)
    _add_time_grid(ver)
    ver.add_argument("--tol", type=float, default=walk.EQUIVALENCE_TOL)
    ver.set_defaults(handler=cmd_verify)

    scan = sub.add_parser("scan", help="localization scan over a growing family")
    scan.add_argument("--family", dest="scan_family", choices=walk.SCAN_FAMILIES,
                      required=True)
    scan.add_argument("--sizes", required=True, metavar="N1,N2,...",
                      help="strictly ascending sizes")
    scan.add_argument("--gateways", type=int, default=2,
                      help="gateway count for the clique family")
    _add_time_grid(scan)
    _add_output(scan)
    scan.add_argument("--tol", type=float, default=walk.EQUIVALENCE_TOL)
    scan.add_argument("--plot", metavar="FILE", help="also render the scan figure to FILE")
    scan.set_defaults(handler=cmd_scan)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except _VerifyFailure as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
