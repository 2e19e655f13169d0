"""Concrete multipartite graphs: construction, K_t / kK_t detection, witness
realization and neighbourhood closeness.

Adjacency rows are Python ints used as bitsets; clique search intersects
rows.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .core import ExtremalWitness, MultipartiteGraph, PartSizes, Vertex, VertexPartition, class_offsets
from .errors import CountTooLarge, InvalidWitness, ShapeMismatch, SizeLimit

DEFAULT_VERTEX_BUDGET = 64


@dataclass(frozen=True)
class PatternWitness:
    copies: tuple[tuple[Vertex, ...], ...]

    def to_json(self) -> dict:
        return {"copies": [[list(v) for v in c] for c in self.copies]}


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def vertex_mask(graph: MultipartiteGraph, vertices: int | Iterable[int | Vertex | tuple[int, int]]) -> int:
    """Bitset of a vertex collection given as a mask, global indices or (class, offset) pairs."""
    if isinstance(vertices, int):
        if vertices < 0 or vertices >> graph.n:
            raise ValueError("vertex mask outside host")
        return vertices
    mask = 0
    for v in vertices:
        if isinstance(v, int):
            g = v
        else:
            ci, off = v
            if not (0 <= ci < graph.sizes.r and 0 <= off < graph.sizes[ci]):
                raise ValueError(f"vertex {tuple(v)} outside host")
            g = graph.index((ci, off))
        if not 0 <= g < graph.n:
            raise ValueError(f"vertex {v} outside host")
        mask |= 1 << g
    return mask


def build_complete(sizes: PartSizes | Sequence[int]) -> MultipartiteGraph:
    if not isinstance(sizes, PartSizes):
        sizes = PartSizes(tuple(sizes))
    starts = class_offsets(sizes.sizes)
    full = (1 << starts[-1]) - 1
    rows = []
    for ci in range(sizes.r):
        cmask = ((1 << starts[ci + 1]) - 1) ^ ((1 << starts[ci]) - 1)
        rows.extend([full & ~cmask] * sizes[ci])
    return MultipartiteGraph(sizes, tuple(rows))


def induce_by_partition(graph: MultipartiteGraph, vp: VertexPartition) -> MultipartiteGraph:
    """Keep exactly the edges whose endpoints lie in different blocks."""
    if tuple(vp.sizes) != graph.sizes.sizes:
        raise ShapeMismatch(f"partition over {vp.sizes}, graph over {graph.sizes.sizes}")
    masks = vp.block_masks()
    rows = [row & ~masks[b] for row, b in zip(graph.rows, vp.block_of)]
    return graph.with_rows(rows)


def complete_induced(sizes: PartSizes | Sequence[int], vp: VertexPartition) -> MultipartiteGraph:
    """``K_{n_1,...,n_r}[P]``."""
    return induce_by_partition(build_complete(sizes), vp)


def cliques_in(rows: Sequence[int], cand: int, t: int) -> Iterator[tuple[int, ...]]:
    """All t-cliques inside ``cand``, each once, in lexicographic order."""
    chosen: list[int] = []

    def rec(cand: int, need: int) -> Iterator[tuple[int, ...]]:
        if need == 0:
            yield tuple(chosen)
            return
        while cand:
            if cand.bit_count() < need:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            chosen.append(v)
            yield from rec(cand & rows[v], need - 1)
            chosen.pop()

    yield from rec(cand, t)


def first_clique(rows: Sequence[int], cand: int, t: int) -> tuple[int, ...] | None:
    return next(cliques_in(rows, cand, t), None)


def contains_clique(graph: MultipartiteGraph, t: int) -> PatternWitness | None:
    """Lexicographically first t-clique, or None."""
    if t < 1:
        raise ValueError("t must be positive")
    found = first_clique(graph.rows, (1 << graph.n) - 1, t)
    if found is None:
        return None
    return PatternWitness((tuple(graph.vertex(g) for g in found),))


def _core(rows: Sequence[int], avail: int, t: int) -> int:
    """Drop vertices with fewer than t-1 neighbours inside ``avail`` (repeatedly)."""
    changed = True
    while changed:
        changed = False
        for v in _bits(avail):
            if (rows[v] & avail).bit_count() < t - 1:
                avail &= ~(1 << v)
                changed = True
    return avail


def disjoint_cliques(rows: Sequence[int], avail: int, k: int, t: int) -> list[tuple[int, ...]] | None:
    """Exact backtracking search for k vertex-disjoint t-cliques inside ``avail``.

    Branches on the available vertex with the fewest available neighbours:
    either it is covered by one of the chosen cliques or it is discarded.
    """
    if k == 0:
        return []
    avail = _core(rows, avail, t)
    if avail.bit_count() < k * t:
        return None
    v = min(_bits(avail), key=lambda x: ((rows[x] & avail).bit_count(), x))
    for rest in cliques_in(rows, rows[v] & avail, t - 1):
        clique = tuple(sorted((v,) + rest))
        used = 0
        for x in clique:
            used |= 1 << x
        sub = disjoint_cliques(rows, avail & ~used, k - 1, t)
        if sub is not None:
            return [clique] + sub
    return disjoint_cliques(rows, avail & ~(1 << v), k, t)


def contains_disjoint_cliques(
    graph: MultipartiteGraph, k: int, t: int, vertex_budget: int = DEFAULT_VERTEX_BUDGET
) -> PatternWitness | None:
    if k < 1 or t < 2:
        raise ValueError("need k >= 1 and t >= 2")
    if graph.n > vertex_budget:
        raise SizeLimit(f"{graph.n} vertices exceed the budget of {vertex_budget}")
    found = disjoint_cliques(graph.rows, (1 << graph.n) - 1, k, t)
    if found is None:
        return None
    found.sort()
    return PatternWitness(tuple(tuple(graph.vertex(g) for g in c) for c in found))


def realize_witness(
    sizes: PartSizes | Sequence[int], w: ExtremalWitness, t: int
) -> MultipartiteGraph:
    """Complete (t-1)-partite graph on the residual vertices plus ``k-1``
    dominating vertices (the last offsets of their classes)."""
    if not isinstance(sizes, PartSizes):
        sizes = PartSizes(tuple(sizes))
    r = sizes.r
    residual = w.residual_sizes(sizes.sizes)
    part = w.residual_partition
    if part.r != r:
        raise InvalidWitness(f"residual partition covers {part.r} classes, host has {r}")
    if sum(1 for b in part.blocks if any(residual[i] for i in b)) > t - 1:
        raise InvalidWitness(f"residual partition has more than {t - 1} occupied blocks")
    block = part.block_of()
    starts = class_offsets(sizes.sizes)
    n = starts[-1]
    cls = [ci for ci in range(r) for _ in range(sizes[ci])]
    dominating = 0
    for ci in range(r):
        for off in range(residual[ci], sizes[ci]):
            dominating |= 1 << (starts[ci] + off)
    rows = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if cls[u] == cls[v]:
                continue
            if (dominating >> u) & 1 or (dominating >> v) & 1 or block[cls[u]] != block[cls[v]]:
                rows[u] |= 1 << v
                rows[v] |= 1 << u
    return MultipartiteGraph(sizes, tuple(rows))


def closeness(g1: MultipartiteGraph, g2: MultipartiteGraph, exclude: int = 0) -> int:
    """Least alpha such that g1 is alpha-close to g2, ignoring vertices in ``exclude``."""
    return max(per_vertex_closeness(g1, g2, exclude).values(), default=0)


def per_vertex_closeness(
    g1: MultipartiteGraph, g2: MultipartiteGraph, exclude: int = 0
) -> dict[int, int]:
    if g1.sizes != g2.sizes:
        raise ShapeMismatch(f"{g1.sizes.sizes} vs {g2.sizes.sizes}")
    keep = ((1 << g1.n) - 1) & ~exclude
    return {
        g: ((a ^ b) & keep).bit_count()
        for g, (a, b) in enumerate(zip(g1.rows, g2.rows))
        if (keep >> g) & 1
    }


def edge_difference(g1: MultipartiteGraph, g2: MultipartiteGraph) -> int:
    """Number of edges in exactly one of the two graphs."""
    if g1.sizes != g2.sizes:
        raise ShapeMismatch(f"{g1.sizes.sizes} vs {g2.sizes.sizes}")
    return sum((a ^ b).bit_count() for a, b in zip(g1.rows, g2.rows)) // 2


def delete_random_edges(graph: MultipartiteGraph, count: int, seed: int) -> MultipartiteGraph:
    edges = graph.edges()
    if count < 0 or count > len(edges):
        raise CountTooLarge(f"cannot delete {count} of {len(edges)} edges")
    rows = list(graph.rows)
    for u, v in random.Random(seed).sample(edges, count):
        rows[u] &= ~(1 << v)
        rows[v] &= ~(1 << u)
    return graph.with_rows(rows)


def remove_vertices(graph: MultipartiteGraph, mask: int) -> MultipartiteGraph:
    """Same host, with every edge at a vertex of ``mask`` deleted (``G - X``)."""
    return graph.with_rows([0 if (mask >> g) & 1 else row & ~mask for g, row in enumerate(graph.rows)])


def is_partite_plus_dominators(graph: MultipartiteGraph, t: int, k: int) -> bool:
    """Whether ``graph`` is a (t-1)-colourable graph plus k-1 vertices joined to
    everything outside their own class."""
    from itertools import combinations

    n = graph.n
    cls = graph.class_of()
    cmask = [graph.class_mask(c) for c in range(graph.sizes.r)]
    full = (1 << n) - 1
    dominating = [g for g in range(n) if graph.rows[g] == full & ~cmask[cls[g]]]
    for dom in combinations(dominating, k - 1):
        removed = 0
        for g in dom:
            removed |= 1 << g
        if _colourable(graph.rows, full & ~removed, t - 1):
            return True
    return False


def _colourable(rows: Sequence[int], keep: int, colours: int) -> bool:
    order = list(_bits(keep))
    colour = {}

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        used = {colour[u] for u in _bits(rows[v] & keep) if u in colour}
        for c in range(colours):
            if c in used:
                continue
            colour[v] = c
            if rec(i + 1):
                return True
            del colour[v]
        return False

    return rec(0)
