"""Independent ground truth: exact ``ex(host, kK_t)`` by depth-first
branch-and-bound over the host's edges.

Each node decides one edge (include first, then exclude).  An include is
rejected when it closes a forbidden pattern through the new edge.  A branch
is cut when even keeping every undecided edge, minus a lower bound on the
exclusions still forced, cannot beat the incumbent.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

from .calculus import compute_f, compute_g
from .core import MultipartiteGraph, PartSizes, Pattern
from .errors import BudgetExceeded
from .graphs import build_complete, cliques_in, disjoint_cliques, is_partite_plus_dominators, realize_witness


@dataclass(frozen=True)
class Budget:
    max_edges: int = 30
    max_vertices: int = 14
    max_nodes: int | None = None


@dataclass
class OracleResult:
    value: int
    witness: MultipartiteGraph
    nodes_explored: int
    exhaustive: bool
    optima: list[MultipartiteGraph] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "witness": self.witness.to_json(),
            "nodes_explored": self.nodes_explored,
            "exhaustive": self.exhaustive,
            "optima_count": len(self.optima) if self.optima else None,
        }


class _NodeBudget(Exception):
    pass


def edge_order(host: MultipartiteGraph) -> list[tuple[int, int]]:
    """Host edges sorted by (larger endpoint, smaller endpoint).

    Every clique is complete as soon as the edges at its last vertex are
    decided, so forbidden patterns surface early in the search.
    """
    return sorted(host.edges(), key=lambda e: (e[1], e[0]))


class _Search:
    def __init__(
        self,
        n: int,
        edges: Sequence[tuple[int, int]],
        t: int,
        k: int,
        best: int,
        max_nodes: int | None,
        collect_all: bool,
        packing: bool = True,
    ) -> None:
        self.packing = packing
        self.n = n
        self.edges = edges
        self.m = len(edges)
        self.t = t
        self.k = k
        self.best = best
        self.best_bits: tuple[bool, ...] | None = None
        self.collect_all = collect_all
        self.all_bits: list[tuple[bool, ...]] = []
        self.max_nodes = max_nodes
        self.nodes = 0
        self.rows = [0] * n
        self.choice: list[bool] = []
        # suffix masks of undecided edges, per vertex, indexed by position
        self.undecided_rows = self._suffix_rows()

    def _suffix_rows(self) -> list[list[int]]:
        out = [[0] * self.n for _ in range(self.m + 1)]
        for pos in range(self.m - 1, -1, -1):
            row = out[pos + 1].copy()
            u, v = self.edges[pos]
            row[u] |= 1 << v
            row[v] |= 1 << u
            out[pos] = row
        return out

    # -- feasibility --------------------------------------------------------

    def creates_pattern(self, u: int, v: int) -> bool:
        rows = self.rows
        common = rows[u] & rows[v]
        if self.k == 1:
            return next(cliques_in(rows, common, self.t - 2), None) is not None
        full = (1 << self.n) - 1
        for rest in cliques_in(rows, common, self.t - 2):
            used = (1 << u) | (1 << v)
            for x in rest:
                used |= 1 << x
            if disjoint_cliques(rows, full & ~used, self.k - 1, self.t) is not None:
                return True
        return False

    # -- bounds -------------------------------------------------------------

    def forced_exclusions(self, pos: int) -> int:
        """Greedy packing of potential cliques that are pairwise disjoint on
        undecided edges; each needs at least one of its undecided edges
        excluded.  Valid only for a single forbidden clique (k = 1)."""
        if self.k != 1:
            return 0
        free = self.undecided_rows[pos].copy()
        rows = self.rows
        t = self.t
        count = 0
        for idx in range(pos, self.m):
            u, v = self.edges[idx]
            if not (free[u] >> v) & 1:
                continue
            allowed_u = rows[u] | free[u]
            allowed_v = rows[v] | free[v]
            common = allowed_u & allowed_v
            if not common:
                continue
            if t == 3:
                low = common & -common
                rest = (low.bit_length() - 1,)
            else:
                allowed = [r | f for r, f in zip(rows, free)]
                rest = next(cliques_in(allowed, common, t - 2), None)
                if rest is None:
                    continue
            verts = (u, v) + rest
            count += 1
            for i, a in enumerate(verts):
                for b in verts[i + 1 :]:
                    free[a] &= ~(1 << b)
                    free[b] &= ~(1 << a)
        return count

    # -- search -------------------------------------------------------------

    def run(self, pos: int, current: int) -> None:
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise _NodeBudget
        remaining = self.m - pos
        if self.collect_all:
            if current + remaining < self.best:
                return
        elif current + remaining <= self.best:
            return
        if pos == self.m:
            self._record(current)
            return
        slack = current + remaining - self.best
        if self.packing and slack <= remaining:
            forced = self.forced_exclusions(pos)
            if forced > slack or (forced == slack and not self.collect_all):
                return
        u, v = self.edges[pos]
        if not self.creates_pattern(u, v):
            self.rows[u] |= 1 << v
            self.rows[v] |= 1 << u
            self.choice.append(True)
            self.run(pos + 1, current + 1)
            self.choice.pop()
            self.rows[u] &= ~(1 << v)
            self.rows[v] &= ~(1 << u)
        self.choice.append(False)
        self.run(pos + 1, current)
        self.choice.pop()

    def _record(self, current: int) -> None:
        bits = tuple(self.choice)
        if current > self.best:
            self.best = current
            self.best_bits = bits
            self.all_bits = [bits] if self.collect_all else []
        elif self.collect_all and current == self.best:
            self.all_bits.append(bits)
            if self.best_bits is None:
                self.best_bits = bits


def _graph_from_bits(host: MultipartiteGraph, edges, bits) -> MultipartiteGraph:
    rows = [0] * host.n
    for (u, v), keep in zip(edges, bits):
        if keep:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
    return host.with_rows(rows)


def _is_free(graph: MultipartiteGraph, t: int, k: int) -> bool:
    return disjoint_cliques(graph.rows, (1 << graph.n) - 1, k, t) is None


def _is_subgraph(g: MultipartiteGraph, host: MultipartiteGraph) -> bool:
    return all(a & ~b == 0 for a, b in zip(g.rows, host.rows))


def _subtree_task(args):
    n, edges, t, k, best, prefix, max_nodes, collect_all, packing = args
    s = _Search(n, edges, t, k, best, max_nodes, collect_all, packing)
    current = 0
    for pos, keep in enumerate(prefix):
        u, v = edges[pos]
        if keep:
            if s.creates_pattern(u, v):
                return None, [], 1, True
            s.rows[u] |= 1 << v
            s.rows[v] |= 1 << u
            current += 1
        s.choice.append(keep)
    try:
        s.run(len(prefix), current)
    except _NodeBudget:
        return s.best_bits if s.best > best or collect_all else None, s.all_bits, s.nodes, False
    if collect_all:
        return s.best_bits, s.all_bits, s.nodes, True
    return (s.best_bits if s.best > best else None), [], s.nodes, True


def brute_force_ex(
    sizes: PartSizes | Sequence[int],
    pattern: Pattern,
    budget: Budget = Budget(),
    *,
    host: MultipartiteGraph | None = None,
    seed_incumbent: bool = True,
    packing_bound: bool = True,
    enumerate_optima: bool = False,
    jobs: int = 1,
    split_depth: int = 6,
) -> OracleResult:
    """Maximum number of edges of a ``kK_t``-free spanning subgraph of ``host``
    (default: the complete multipartite graph on ``sizes``)."""
    if not isinstance(sizes, PartSizes):
        sizes = PartSizes.of(sizes)
    t, k = pattern.t, pattern.k
    if host is None:
        host = build_complete(sizes)
    elif host.sizes != sizes:
        raise ValueError("host does not match sizes")
    if host.n > budget.max_vertices or host.num_edges > budget.max_edges:
        raise BudgetExceeded(
            f"host with {host.n} vertices / {host.num_edges} edges exceeds "
            f"budget {budget.max_vertices} / {budget.max_edges}"
        )
    edges = edge_order(host)

    incumbent = MultipartiteGraph.empty(sizes)
    if seed_incumbent and sizes.r >= t:
        _, w = compute_g(sizes.sizes, k, t)
        seed = realize_witness(sizes, w, t)
        if _is_subgraph(seed, host) and _is_free(seed, t, k):
            incumbent = seed
    # below the incumbent nothing is recorded; -1 lets the empty graph count
    start_best = incumbent.num_edges if incumbent.num_edges > 0 else -1
    if enumerate_optima:
        start_best = max(start_best, 0)

    depth = min(split_depth, len(edges)) if jobs > 1 else 0
    prefixes = list(product((True, False), repeat=depth)) if depth else [()]
    tasks = [
        (host.n, edges, t, k, start_best, p, budget.max_nodes, enumerate_optima, packing_bound)
        for p in prefixes
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_subtree_task, tasks))
    else:
        results = [_subtree_task(task) for task in tasks]

    nodes = sum(r[2] for r in results)
    exhaustive = all(r[3] for r in results)
    best_value = incumbent.num_edges
    best_graph = incumbent
    for bits, _, _, _ in results:
        if bits is None:
            continue
        g = _graph_from_bits(host, edges, bits)
        if g.num_edges > best_value:
            best_value, best_graph = g.num_edges, g
    optima: list[MultipartiteGraph] = []
    if enumerate_optima:
        for _, all_bits, _, _ in results:
            for bits in all_bits:
                g = _graph_from_bits(host, edges, bits)
                if g.num_edges == best_value:
                    optima.append(g)
        if not optima:
            optima = [best_graph]
        best_graph = optima[0]
    return OracleResult(best_value, best_graph, nodes, exhaustive, optima)


@dataclass
class CertifyRecord:
    sizes: tuple[int, ...]
    t: int
    k: int
    oracle: int | None
    formula: int
    relation: str  # "equal", "greater" (oracle > formula), "less", "skipped"
    exhaustive: bool
    all_optima_structured: bool | None = None
    nodes: int = 0

    def to_json(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "t": self.t,
            "k": self.k,
            "oracle": self.oracle,
            "formula": self.formula,
            "relation": self.relation,
            "exhaustive": self.exhaustive,
            "all_optima_structured": self.all_optima_structured,
            "nodes": self.nodes,
        }


def sizes_range(r: int, lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    """Every non-increasing r-tuple with entries in [lo, hi]."""

    def rec(prefix: list[int], cap: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == r:
            yield tuple(prefix)
            return
        for x in range(cap, lo - 1, -1):
            prefix.append(x)
            yield from rec(prefix, x)
            prefix.pop()

    yield from rec([], hi)


def certify_theorem(
    instances: Iterable[Sequence[int]],
    t: int,
    k: int,
    budget: Budget = Budget(),
    *,
    check_structure: bool = False,
    jobs: int = 1,
) -> list[CertifyRecord]:
    """Compare the oracle with f (k = 1) or g (k >= 2) on every instance."""
    out = []
    for raw in instances:
        sizes = PartSizes.of(raw)
        formula = compute_f(sizes.sizes, 1, t)[0] if k == 1 else compute_g(sizes.sizes, k, t)[0]
        try:
            res = brute_force_ex(
                sizes, Pattern(t, k), budget, enumerate_optima=check_structure, jobs=jobs
            )
        except BudgetExceeded:
            out.append(CertifyRecord(sizes.sizes, t, k, None, formula, "skipped", False))
            continue
        rel = "equal" if res.value == formula else ("greater" if res.value > formula else "less")
        structured = None
        if check_structure:
            structured = all(is_partite_plus_dominators(g, t, k) for g in res.optima)
        out.append(
            CertifyRecord(
                sizes.sizes, t, k, res.value, formula, rel, res.exhaustive, structured, res.nodes_explored
            )
        )
    return out


def report_lines(records: Iterable[CertifyRecord]) -> Iterator[str]:
    for rec in records:
        yield json.dumps(rec.to_json(), sort_keys=True, separators=(",", ":"))
