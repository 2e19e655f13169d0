"""Zykov-style shifts: detach an independent set and reattach it to a target set.

``shift(G, A, X)`` deletes every edge at ``A`` and joins ``A`` completely to
``X``.  ``symmetrize_class(G, i)`` is the special case ``A = V_i`` with ``X``
the neighbourhood of a maximum-degree vertex of ``V_i``.
"""

from __future__ import annotations

from typing import Iterable

from .core import MultipartiteGraph
from .errors import ClassClash, EmptySet, NotIndependent, Overlap
from .graphs import _bits, vertex_mask


def common_neighbors(graph: MultipartiteGraph, B) -> int:
    """Bitset of vertices adjacent to every member of ``B``."""
    mask = vertex_mask(graph, B)
    if not mask:
        raise EmptySet("common neighbourhood of an empty set")
    out = (1 << graph.n) - 1
    for b in _bits(mask):
        out &= graph.rows[b]
    return out


def shift(graph: MultipartiteGraph, A, X) -> MultipartiteGraph:
    a_mask = vertex_mask(graph, A)
    x_mask = vertex_mask(graph, X)
    if a_mask & x_mask:
        raise Overlap("A and X share vertices")
    for a in _bits(a_mask):
        if graph.rows[a] & a_mask:
            raise NotIndependent(f"A spans an edge at vertex {graph.vertex(a)}")
    clash = 0
    for ci in range(graph.sizes.r):
        cm = graph.class_mask(ci)
        if cm & a_mask and cm & x_mask:
            clash = ci + 1
            break
    if clash:
        raise ClassClash(f"A and X both meet class {clash - 1}")
    rows = list(graph.rows)
    for a in _bits(a_mask):
        for b in _bits(rows[a]):
            rows[b] &= ~(1 << a)
        rows[a] = x_mask
    for x in _bits(x_mask):
        rows[x] |= a_mask
    return graph.with_rows(rows)


def max_degree_vertex(graph: MultipartiteGraph, mask: int) -> int:
    """Highest-degree vertex of ``mask``; smallest index wins ties."""
    best, best_deg = -1, -1
    for g in _bits(mask):
        d = graph.rows[g].bit_count()
        if d > best_deg:
            best, best_deg = g, d
    return best


def symmetrize_class(graph: MultipartiteGraph, i: int) -> MultipartiteGraph:
    """Give every vertex of class ``i`` the neighbourhood of its max-degree member."""
    if not 0 <= i < graph.sizes.r:
        raise IndexError(f"class {i} does not exist")
    cm = graph.class_mask(i)
    if not cm:
        return graph
    u = max_degree_vertex(graph, cm)
    return shift(graph, cm, graph.rows[u])


def symmetrize_all(graph: MultipartiteGraph, order: Iterable[int] | None = None) -> MultipartiteGraph:
    """Symmetrize classes in turn (default ``0, 1, ..., r-1``)."""
    for i in range(graph.sizes.r) if order is None else order:
        graph = symmetrize_class(graph, i)
    return graph


def is_module(graph: MultipartiteGraph, mask: int) -> bool:
    rows = {graph.rows[g] for g in _bits(mask)}
    return len(rows) <= 1
