"""Command-line front end.

Every subcommand prints one JSON object (``certify`` prints JSON lines).
Exit status: 0 on success, 2 on invalid input (with an ``{"error": ...}``
object on stdout), 1 on internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import calculus, graphs, oracle, stability
from .core import IndexPartition, MultipartiteGraph, Pattern, VertexPartition, validate
from .errors import TuranError


class UsageError(TuranError):
    code = "UsageError"


class InvalidInput(TuranError):
    code = "InvalidInput"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse's default prints usage and exits
        raise UsageError(message)


def _sizes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}")


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}")


def _load_partition(path: str) -> VertexPartition:
    """Vertex blocks ``{"sizes", "blocks": [[[c, o], ...], ...]}`` or whole-class
    blocks ``{"sizes", "class_blocks": [[0], [1, 2]]}``."""
    obj = _load(path)
    try:
        if "class_blocks" in obj:
            return VertexPartition.from_class_blocks(obj["sizes"], obj["class_blocks"])
        return VertexPartition.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TuranError):
            raise
        raise InvalidInput(f"malformed partition file: {exc!r}")


def _load_graph(path: str) -> MultipartiteGraph:
    obj = _load(path)
    # output of realize / perturb wraps the graph under "graph"
    if isinstance(obj, dict) and "graph" in obj:
        obj = obj["graph"]
    try:
        return MultipartiteGraph.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TuranError):
            raise
        raise InvalidInput(f"malformed graph file: {exc!r}")


def _instance(args, **extra) -> dict:
    out = {"sizes": list(args.sizes)}
    out.update(extra)
    return out


# -- subcommands --------------------------------------------------------------


def cmd_f(args) -> dict:
    ps = validate(args.sizes, Pattern(args.t, args.k))
    value, argmax = calculus.compute_f(ps.sizes, args.k, args.t)
    return {
        "instance": {"sizes": list(ps.sizes), "t": args.t, "k": args.k},
        "value": value,
        "argmax": [p.to_json()["blocks"] for p in argmax],
    }


def cmd_g(args) -> dict:
    ps = validate(args.sizes, Pattern(args.t, args.k))
    value, witness = calculus.compute_g(ps.sizes, args.k, args.t, mode=args.mode)
    return {
        "instance": {"sizes": list(ps.sizes), "t": args.t, "k": args.k},
        "value": value,
        "witness": witness.to_json(),
    }


def cmd_tau(args) -> dict:
    ps = validate(args.sizes, Pattern(args.t))
    fams = calculus.l_balance_families(ps.sizes, args.L)
    return {
        "instance": {"sizes": list(ps.sizes), "t": args.t, "L": args.L},
        "value": calculus.compute_tau(ps.sizes, args.t, args.L),
        "families": [list(f) for f in fams.families],
    }


def cmd_extremal_partitions(args) -> dict:
    ps = validate(args.sizes, Pattern(args.t))
    found = stability.enumerate_extremal_vertex_partitions(ps.sizes, args.t)
    return {
        "instance": {"sizes": list(ps.sizes), "t": args.t},
        "f": calculus.compute_f(ps.sizes, 1, args.t)[0],
        "count": len(found),
        "partitions": [vp.to_json()["blocks"] for vp in found],
    }


def cmd_verify_thm12(args) -> dict:
    ps = validate(args.sizes, Pattern(args.t))
    return stability.verify_characterization(ps.sizes, args.t).to_json()


def cmd_check_stable(args) -> dict:
    vp = _load_partition(args.partition)
    verdict = stability.is_eps_stable(vp, eps=args.eps)
    return {
        "eps": args.eps,
        "verdict": verdict.to_json(),
        "min_eps": stability.min_stable_eps(vp.counts()),
        "classification": stability.classify(vp).to_json(),
    }


def cmd_internalize(args) -> dict:
    vp = _load_partition(args.partition)
    out = stability.internalize(vp)
    return {
        "partition": out.to_json(),
        "edges_before": stability.edges_from_counts(vp.counts()),
        "edges": stability.edges_from_counts(out.counts()),
    }


def cmd_stabilize(args) -> dict:
    vp = _load_partition(args.partition)
    X, out = stability.stabilize(vp, eps=args.eps, check_sizes=not args.no_size_check)
    return {
        "eps": args.eps,
        "removed": [list(v) for v in X],
        "bound": 4 * (vp.parts + 1) * len(vp.sizes) * args.eps,
        "partition": out.to_json(),
    }


def cmd_recover(args) -> dict:
    g = _load_graph(args.graph)
    return stability.recover_partition(g, args.t, args.xi).to_json()


def _budget(args) -> oracle.Budget:
    return oracle.Budget(max_edges=args.budget_edges, max_vertices=args.budget_vertices)


def cmd_oracle_ex(args) -> dict:
    ps = validate(args.sizes, Pattern(args.t, args.k))
    res = oracle.brute_force_ex(ps, Pattern(args.t, args.k), _budget(args), jobs=args.jobs)
    out = {"instance": {"sizes": list(ps.sizes), "t": args.t, "k": args.k}}
    out.update(res.to_json())
    return out


def cmd_certify(args) -> list[str]:
    if args.min_entry < 1 or args.max_entry < args.min_entry:
        raise UsageError("need 1 <= --min-entry <= --max-entry")
    if args.r < args.t:
        raise UsageError("need --r >= --t")
    records = oracle.certify_theorem(
        oracle.sizes_range(args.r, args.min_entry, args.max_entry),
        args.t,
        args.k,
        _budget(args),
        check_structure=args.structure,
        jobs=args.jobs,
    )
    return list(oracle.report_lines(records))


def cmd_realize(args) -> dict:
    ps = validate(args.sizes, Pattern(args.t, args.k))
    value, witness = calculus.compute_g(ps.sizes, args.k, args.t)
    g = graphs.realize_witness(ps, witness, args.t)
    return {"value": value, "witness": witness.to_json(), "graph": g.to_json()}


def cmd_perturb(args) -> dict:
    if args.graph:
        g = _load_graph(args.graph)
    elif args.partition:
        vp = _load_partition(args.partition)
        ps = validate(vp.sizes)
        if ps.sizes != tuple(vp.sizes):
            raise InvalidInput("partition sizes must be listed in non-increasing order")
        g = graphs.complete_induced(ps, vp)
    else:
        raise UsageError("perturb needs --graph or --partition")
    out = graphs.delete_random_edges(g, args.delete, args.seed)
    return {"seed": args.seed, "deleted": args.delete, "graph": out.to_json()}


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mpturan", description="Multipartite Turan numbers and stable partitions.")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="compact JSON output (default)")
    fmt.add_argument("--pretty", action="store_true", help="indented JSON output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, *flags):
        sp = sub.add_parser(name, help=help_, description=help_)
        for flag in flags:
            flag(sp)
        sp.set_defaults(func=func)
        return sp

    def sizes(sp):
        sp.add_argument("--sizes", type=_sizes, required=True, help="class sizes, e.g. 3,2,2 (any order)")

    def t(sp):
        sp.add_argument("--t", type=int, required=True, help="clique order t >= 3")

    def k(sp):
        sp.add_argument("--k", type=int, default=1, help="number of disjoint cliques (default 1)")

    def budget(sp):
        sp.add_argument("--budget-edges", type=int, default=30, help="largest host edge count searched")
        sp.add_argument("--budget-vertices", type=int, default=14, help="largest host vertex count searched")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes (output does not depend on it)")

    def partition(sp):
        sp.add_argument("--partition", required=True, help="partition JSON file")

    def eps(sp):
        sp.add_argument("--eps", type=float, default=0.0, help="slack in vertices (default 0)")

    add("f", cmd_f, "evaluate f(n_1..n_r, k, t) and its maximizing class partitions", sizes, t, k)
    gp = add("g", cmd_g, "evaluate g(n_1..n_r, k, t) with a witness", sizes, t, k)
    gp.add_argument("--mode", choices=("recursive", "direct"), default="recursive")
    tp = add("tau", cmd_tau, "L-balance families and tau", sizes, t)
    tp.add_argument("--L", type=int, required=True, help="balance ratio L >= 1")
    add("extremal-partitions", cmd_extremal_partitions, "all extremal vertex (t-1)-partitions", sizes, t)
    add("verify-thm12", cmd_verify_thm12, "compare extremal partitions with stable ones, exhaustively", sizes, t)
    add("check-stable", cmd_check_stable, "stability verdict for a partition", partition, eps)
    add("internalize", cmd_internalize, "move split classes into one block", partition)
    st = add("stabilize", cmd_stabilize, "remove vertices until a partition is stable", partition, eps)
    st.add_argument("--no-size-check", action="store_true", help="skip the minimum cell size precondition")
    rp = add("recover", cmd_recover, "recover a stable partition from a K_t-free graph", t)
    rp.add_argument("--graph", required=True, help="graph JSON file")
    rp.add_argument("--xi", type=float, default=0.05, help="small-class threshold (default 0.05)")
    add("oracle-ex", cmd_oracle_ex, "exact ex(host, kK_t) by branch and bound", sizes, t, k, budget)
    cp = add("certify", cmd_certify, "oracle against formula over a range of hosts (JSON lines)", t, k, budget)
    cp.add_argument("--r", type=int, required=True, help="number of classes")
    cp.add_argument("--min-entry", type=int, default=1)
    cp.add_argument("--max-entry", type=int, required=True)
    cp.add_argument("--structure", action="store_true", help="check every optimum is (t-1)-partite plus dominators")
    add("realize", cmd_realize, "build the extremal kK_t-free graph", sizes, t, k)
    pp = add("perturb", cmd_perturb, "delete random edges from a graph")
    pp.add_argument("--graph", help="graph JSON file")
    pp.add_argument("--partition", help="partition JSON file; perturbs the complete graph it induces")
    pp.add_argument("--delete", type=int, required=True, help="number of edges to delete")
    pp.add_argument("--seed", type=int, required=True, help="random seed (mandatory)")
    return p


def _emit(obj, pretty: bool, out) -> None:
    if isinstance(obj, list):
        for line in obj:
            out.write(line + "\n")
        return
    if pretty:
        out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    else:
        out.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        _emit(args.func(args), args.pretty, out)
        return 0
    except TuranError as exc:
        _emit(exc.to_json(), False, out)
        return 2
    except Exception as exc:  # noqa: BLE001 - reported as an internal failure
        _emit({"error": "InternalError", "message": f"{type(exc).__name__}: {exc}"}, False, out)
        return 1


def main() -> None:
    sys.exit(run())
