"""Stable partitions of a multipartite host.

A vertex partition ``P`` into ``t-1`` blocks is compared against the class
partition ``V``.  Every predicate here depends only on the refinement counts
``counts[i][j] = |V_i ∩ P_j|``, so the work happens on count matrices; the
vertex-level functions are thin wrappers.  Classes emptied by a removal set
are treated as absent.

Condition tags, in the order they are checked:

``OnePartial``               some block meets two split classes
``EqualPartialIntegralParts`` partial blocks have unequal integral parts
``PartialLEIntegralClass``   a partial block's integral part exceeds an integral block
``IntegralPartGEPartialV``   some block's integral part is smaller than a split class
``RemovalBound``             a block minus one of its whole classes exceeds
                             another block's integral part
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .calculus import _rgs, compute_f
from .core import MultipartiteGraph, PartSizes, Pattern, Vertex, VertexPartition, class_offsets, validate
from .errors import NotKtFree, PeelOverflow, PreconditionViolated, ShapeMismatch, SizeLimit, InvalidPartition
from .graphs import _bits, complete_induced, contains_clique, per_vertex_closeness, vertex_mask
from .symmetrize import max_degree_vertex, symmetrize_all

TAGS = (
    "OnePartial",
    "EqualPartialIntegralParts",
    "PartialLEIntegralClass",
    "IntegralPartGEPartialV",
    "RemovalBound",
)
TOL = 1e-9
EXHAUSTIVE_VERTEX_LIMIT = 14

Counts = Sequence[Sequence[int]]


# -- reports ------------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationReport:
    status: dict[tuple[int, int], str]
    integral_part_sizes: tuple[int, ...]
    partial_part_sizes: tuple[int, ...]
    partial_classes_of_V: frozenset[int]

    def partial_blocks(self) -> list[int]:
        return [j for j, p in enumerate(self.partial_part_sizes) if p]

    def to_json(self) -> dict:
        return {
            "status": [[i, j, s] for (i, j), s in sorted(self.status.items())],
            "integral_part_sizes": list(self.integral_part_sizes),
            "partial_part_sizes": list(self.partial_part_sizes),
            "partial_classes_of_V": sorted(self.partial_classes_of_V),
        }


@dataclass(frozen=True)
class StabilityVerdict:
    holds: bool
    violated_condition: str | None = None
    witness: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {"holds": self.holds, "violated_condition": self.violated_condition, "witness": self.witness}


_OK = StabilityVerdict(True)


def _fail(tag: str, **witness) -> StabilityVerdict:
    return StabilityVerdict(False, tag, witness)


# -- count-level core ---------------------------------------------------------


def counts_of(vp: VertexPartition, exclude: int = 0) -> list[list[int]]:
    """Refinement counts of ``vp`` restricted to vertices outside ``exclude``."""
    if not exclude:
        return vp.counts()
    out = [[0] * vp.parts for _ in vp.sizes]
    starts = class_offsets(vp.sizes)
    for ci in range(len(vp.sizes)):
        for g in range(starts[ci], starts[ci + 1]):
            if not (exclude >> g) & 1:
                out[ci][vp.block_of[g]] += 1
    return out


def classify_counts(counts: Counts) -> ClassificationReport:
    parts = len(counts[0]) if counts else 0
    status: dict[tuple[int, int], str] = {}
    integral = [0] * parts
    partial = [0] * parts
    split: set[int] = set()
    for i, row in enumerate(counts):
        size = sum(row)
        for j, c in enumerate(row):
            if c == 0:
                status[i, j] = "absent"
            elif c == size:
                status[i, j] = "integral"
                integral[j] += c
            else:
                status[i, j] = "partial"
                partial[j] += c
                split.add(i)
    return ClassificationReport(status, tuple(integral), tuple(partial), frozenset(split))


def _violation(counts: Counts, eps: float) -> StabilityVerdict:
    rep = classify_counts(counts)
    parts = len(rep.integral_part_sizes)
    ip = rep.integral_part_sizes
    block_size = [ip[j] + rep.partial_part_sizes[j] for j in range(parts)]
    class_size = [sum(row) for row in counts]
    slack = eps + TOL

    for j in range(parts):
        here = sorted(i for i in rep.partial_classes_of_V if counts[i][j])
        if len(here) > 1:
            return _fail("OnePartial", block=j, classes=here)

    pblocks = rep.partial_blocks()
    iblocks = [j for j in range(parts) if not rep.partial_part_sizes[j]]
    if pblocks:
        hi = max(pblocks, key=lambda j: (ip[j], -j))
        lo = min(pblocks, key=lambda j: (ip[j], j))
        if ip[hi] - ip[lo] > slack:
            return _fail("EqualPartialIntegralParts", blocks=[lo, hi], sizes=[ip[lo], ip[hi]])
        for j in pblocks:
            for j2 in iblocks:
                if ip[j] - block_size[j2] > slack:
                    return _fail("PartialLEIntegralClass", partial_block=j, integral_block=j2)

    for j in range(parts):
        for i in sorted(rep.partial_classes_of_V):
            if class_size[i] - ip[j] > slack:
                return _fail("IntegralPartGEPartialV", block=j, v_class=i)

    for j in range(parts):
        for i in range(len(counts)):
            if rep.status[i, j] != "integral":
                continue
            rest = block_size[j] - class_size[i]
            for j2 in range(parts):
                if j2 != j and rest - ip[j2] > slack:
                    return _fail("RemovalBound", block=j, v_class=i, other_block=j2)
    return _OK


def stable_counts(counts: Counts, eps: float = 0.0) -> StabilityVerdict:
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return _violation(counts, eps)


def min_stable_eps(counts: Counts) -> float:
    """Least slack making the counts ε-stable (``inf`` when not 1-partial)."""
    rep = classify_counts(counts)
    parts = len(rep.integral_part_sizes)
    for j in range(parts):
        if sum(1 for i in rep.partial_classes_of_V if counts[i][j]) > 1:
            return math.inf
    ip = rep.integral_part_sizes
    block_size = [ip[j] + rep.partial_part_sizes[j] for j in range(parts)]
    class_size = [sum(row) for row in counts]
    need = 0
    pblocks = rep.partial_blocks()
    iblocks = [j for j in range(parts) if not rep.partial_part_sizes[j]]
    if pblocks:
        need = max(need, max(ip[j] for j in pblocks) - min(ip[j] for j in pblocks))
        need = max([need] + [ip[j] - block_size[j2] for j in pblocks for j2 in iblocks])
    for i in rep.partial_classes_of_V:
        need = max([need] + [class_size[i] - ip[j] for j in range(parts)])
    for j in range(parts):
        for i in range(len(counts)):
            if rep.status[i, j] == "integral":
                rest = block_size[j] - class_size[i]
                need = max([need] + [rest - ip[j2] for j2 in range(parts) if j2 != j])
    return float(need)


def edges_from_counts(counts: Counts) -> int:
    """``e(K[P])``: host pairs in different classes and different blocks."""
    parts = len(counts[0]) if counts else 0
    block_size = [sum(row[j] for row in counts) for j in range(parts)]
    total = 0
    for j in range(parts):
        for j2 in range(j + 1, parts):
            total += block_size[j] * block_size[j2] - sum(row[j] * row[j2] for row in counts)
    return total


def internalization_choices(counts: Counts) -> tuple[list[int], list[list[int]]]:
    """Split classes and, for each, the blocks it may be moved into."""
    rep = classify_counts(counts)
    split = sorted(rep.partial_classes_of_V)
    return split, [[j for j, c in enumerate(counts[i]) if c] for i in split]


def _internalize_counts(counts: Counts, assignment: dict[int, int]) -> list[list[int]]:
    out = [list(row) for row in counts]
    for i, j in assignment.items():
        size = sum(out[i])
        out[i] = [0] * len(out[i])
        out[i][j] = size
    return out


def canonical_internalization(counts: Counts) -> dict[int, int]:
    """Edge-maximizing destination per split class; ties go to lower block indices."""
    split, options = internalization_choices(counts)
    best_key, best = None, {}
    for choice in product(*options):
        assignment = dict(zip(split, choice))
        e = edges_from_counts(_internalize_counts(counts, assignment))
        key = (-e, choice)
        if best_key is None or key < best_key:
            best_key, best = key, assignment
    return best


def internalization_values(counts: Counts) -> set[int]:
    """``e(K[I(P)])`` over every admissible internalization."""
    split, options = internalization_choices(counts)
    return {
        edges_from_counts(_internalize_counts(counts, dict(zip(split, choice))))
        for choice in product(*options)
    }


# -- vertex-level API ---------------------------------------------------------


def _check_sizes(vp: VertexPartition, sizes) -> None:
    if sizes is None:
        return
    raw = sizes.sizes if isinstance(sizes, PartSizes) else tuple(sizes)
    if tuple(raw) != tuple(vp.sizes):
        raise ShapeMismatch(f"partition over {vp.sizes}, host {tuple(raw)}")


def classify(vp: VertexPartition, sizes=None) -> ClassificationReport:
    _check_sizes(vp, sizes)
    return classify_counts(vp.counts())


def is_one_partial(vp: VertexPartition, sizes=None) -> bool:
    _check_sizes(vp, sizes)
    return _violation(vp.counts(), math.inf).violated_condition != "OnePartial"


def is_stable(vp: VertexPartition, sizes=None, exclude: int = 0) -> StabilityVerdict:
    _check_sizes(vp, sizes)
    return _violation(counts_of(vp, exclude), 0.0)


def is_eps_stable(vp: VertexPartition, sizes=None, eps: float = 0.0, exclude: int = 0) -> StabilityVerdict:
    _check_sizes(vp, sizes)
    return stable_counts(counts_of(vp, exclude), eps)


def internalize(
    vp: VertexPartition, sizes=None, choice: dict[int, int] | None = None
) -> VertexPartition:
    """Move every split class wholly into one block that already meets it.

    ``choice`` maps split classes to destination blocks; classes it omits get
    the canonical (edge-maximizing, lowest index) destination.
    """
    _check_sizes(vp, sizes)
    counts = vp.counts()
    split, options = internalization_choices(counts)
    assignment = canonical_internalization(counts)
    for i, j in (choice or {}).items():
        if i not in split:
            raise InvalidPartition(f"class {i} is not split")
        if j not in options[split.index(i)]:
            raise InvalidPartition(f"block {j} holds no vertex of class {i}")
        assignment[i] = j
    starts = class_offsets(vp.sizes)
    block_of = list(vp.block_of)
    for i, j in assignment.items():
        for g in range(starts[i], starts[i + 1]):
            block_of[g] = j
    return VertexPartition(vp.sizes, vp.parts, tuple(block_of))


def removal_target(vp: VertexPartition) -> int:
    """The ``t - 1`` of a partition: its block count."""
    return vp.parts


def _n_t_minus_1(sizes: Sequence[int], parts: int) -> int:
    ordered = sorted(sizes, reverse=True)
    return ordered[min(parts, len(ordered)) - 1]


def is_x_eps_stable(
    graph: MultipartiteGraph, vp: VertexPartition, X, eps: float
) -> StabilityVerdict:
    """``|X| <= eps*n_{t-1}``, ``G - X`` is ``eps*n_{t-1}``-close to ``K[P] - X``,
    and ``P`` restricted to ``V \\ X`` is stable.

    The first two failures use the extra tags ``RemovedSetTooLarge`` and
    ``NotClose``.
    """
    _check_sizes(vp, graph.sizes)
    xmask = vertex_mask(graph, X)
    bound = eps * _n_t_minus_1(graph.sizes.sizes, vp.parts) + TOL
    if xmask.bit_count() > bound:
        return _fail("RemovedSetTooLarge", removed=xmask.bit_count(), bound=bound - TOL)
    per = per_vertex_closeness(graph, complete_induced(graph.sizes, vp), xmask)
    worst = max(per.items(), key=lambda kv: (kv[1], -kv[0]), default=(None, 0))
    if worst[1] > bound:
        return _fail("NotClose", vertex=list(graph.vertex(worst[0])), closeness=worst[1], bound=bound - TOL)
    return is_stable(vp, exclude=xmask)


# -- stabilization ------------------------------------------------------------


def _largest(cands: Iterable[tuple[int, int]], counts: Counts) -> tuple[int, int]:
    """The (class, block) cell with the most vertices; lowest indices on ties."""
    return min(cands, key=lambda c: (-counts[c[0]][c[1]], c))


def _repair_step(counts: list[list[int]], verdict: StabilityVerdict) -> tuple[int, int]:
    """Pick one (class, block) cell to lose a vertex, targeting ``verdict``."""
    rep = classify_counts(counts)
    w = verdict.witness
    tag = verdict.violated_condition
    r = len(counts)
    if tag == "OnePartial":
        j = w["block"]
        return min(((i, j) for i in w["classes"]), key=lambda c: (counts[c[0]][j], c))
    if tag in ("EqualPartialIntegralParts", "PartialLEIntegralClass"):
        j = w["blocks"][1] if tag == "EqualPartialIntegralParts" else w["partial_block"]
        return _largest(((i, j) for i in range(r) if rep.status[i, j] == "integral"), counts)
    if tag == "IntegralPartGEPartialV":
        i = w["v_class"]
        return _largest(((i, j) for j in range(len(counts[i])) if counts[i][j]), counts)
    if tag == "RemovalBound":
        j, keep = w["block"], w["v_class"]
        pieces = [(i, j) for i in range(r) if rep.status[i, j] == "partial"]
        if pieces:
            return pieces[0]
        return _largest(((i, j) for i in range(r) if i != keep and counts[i][j]), counts)
    raise ValueError(f"unknown condition {tag}")


def stabilize_counts(counts: Counts) -> list[list[int]]:
    """How many vertices to drop from each cell so the rest is stable.

    One vertex at a time, aimed at the first violated condition; always ends
    (an empty partition is stable).
    """
    cur = [list(row) for row in counts]
    removed = [[0] * len(row) for row in counts]
    while True:
        verdict = _violation(cur, 0.0)
        if verdict.holds:
            return removed
        i, j = _repair_step(cur, verdict)
        cur[i][j] -= 1
        removed[i][j] += 1


def stabilize(
    vp: VertexPartition,
    sizes=None,
    eps: float = 0.0,
    *,
    check_sizes: bool = True,
    exclude: int = 0,
) -> tuple[tuple[Vertex, ...], VertexPartition]:
    """Removal set ``X`` (highest offsets of each cell go first) after which
    ``vp`` restricted to ``V \\ X`` is stable.

    Requires ``vp`` to be eps-stable on ``V \\ exclude``; with ``check_sizes``
    every non-empty cell must hold at least ``10*t*r*eps`` vertices and the
    result is checked against ``|X| <= 4*t*r*eps``.  ``X`` excludes
    ``exclude`` itself.
    """
    _check_sizes(vp, sizes)
    counts = counts_of(vp, exclude)
    pre = stable_counts(counts, eps)
    if not pre.holds:
        raise PreconditionViolated(f"partition is not {eps}-stable: {pre.violated_condition}")
    t, r = vp.parts + 1, len(vp.sizes)
    if check_sizes:
        small = [c for row in counts for c in row if 0 < c < 10 * t * r * eps]
        if small:
            raise PreconditionViolated(
                f"cell of size {min(small)} below 10*t*r*eps = {10 * t * r * eps:g}"
            )
    removed = stabilize_counts(counts)
    starts = class_offsets(vp.sizes)
    X: list[Vertex] = []
    for i in range(len(vp.sizes)):
        for j in range(vp.parts):
            need = removed[i][j]
            for g in range(starts[i + 1] - 1, starts[i] - 1, -1):
                if need == 0:
                    break
                if vp.block_of[g] == j and not (exclude >> g) & 1:
                    X.append(Vertex(i, g - starts[i]))
                    need -= 1
    X.sort()
    mask = exclude
    for v in X:
        mask |= 1 << (starts[v.class_index] + v.offset)
    if not is_stable(vp, exclude=mask).holds:
        raise AssertionError("stabilization left an unstable partition")
    if check_sizes and len(X) > 4 * t * r * eps + TOL:
        raise AssertionError(f"removed {len(X)} vertices, bound {4 * t * r * eps:g}")
    return tuple(X), vp


# -- exhaustive characterization ----------------------------------------------


def enumerate_vertex_partitions(sizes: Sequence[int], parts: int):
    """Every partition of the host vertices into at most ``parts`` blocks, once
    each up to block order (canonical representatives)."""
    n = sum(sizes)
    for used in range(1, min(parts, n) + 1):
        for labels in _rgs(n, used):
            yield VertexPartition(tuple(sizes), parts, tuple(labels)).canonical()


def _exhaustive_host(sizes, t: int) -> PartSizes:
    ps = validate(sizes, Pattern(t))
    if ps.n > EXHAUSTIVE_VERTEX_LIMIT:
        raise SizeLimit(f"{ps.n} vertices exceed the exhaustive limit {EXHAUSTIVE_VERTEX_LIMIT}")
    return ps


def enumerate_extremal_vertex_partitions(sizes, t: int) -> list[VertexPartition]:
    ps = _exhaustive_host(sizes, t)
    f, _ = compute_f(ps.sizes, 1, t)
    cache: dict = {}
    out = []
    for vp in enumerate_vertex_partitions(ps.sizes, t - 1):
        key = tuple(map(tuple, vp.counts()))
        if key not in cache:
            cache[key] = edges_from_counts(key)
        if cache[key] == f:
            out.append(vp)
    return sorted(out, key=lambda v: v.block_of)


@dataclass
class CharacterizationReport:
    sizes: tuple[int, ...]
    t: int
    f: int
    partitions: int
    extremal: int
    stable_with_extremal_internalization: int
    counterexamples: list[dict]
    choice_dependent: list[dict]

    @property
    def match(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "t": self.t,
            "f": self.f,
            "partitions": self.partitions,
            "extremal": self.extremal,
            "stable_with_extremal_internalization": self.stable_with_extremal_internalization,
            "match": self.match,
            "counterexamples": self.counterexamples,
            "choice_dependent": self.choice_dependent,
        }


def verify_characterization(sizes, t: int) -> CharacterizationReport:
    """Compare extremal partitions (A) with stable partitions whose canonical
    internalization is extremal (B) over every vertex partition of the host.

    Also lists stable partitions whose internalization value depends on the
    choice of destination blocks.
    """
    ps = _exhaustive_host(sizes, t)
    f, _ = compute_f(ps.sizes, 1, t)
    memo: dict = {}
    total = in_a = in_b = 0
    bad: list[dict] = []
    dependent: list[dict] = []
    for vp in enumerate_vertex_partitions(ps.sizes, t - 1):
        total += 1
        counts = vp.counts()
        key = tuple(map(tuple, counts))
        if key not in memo:
            extremal = edges_from_counts(counts) == f
            stable = _violation(counts, 0.0).holds
            internal = _internalize_counts(counts, canonical_internalization(counts))
            values = internalization_values(counts) if stable else set()
            memo[key] = (extremal, stable and edges_from_counts(internal) == f, len(values) > 1)
        a, b, dep = memo[key]
        in_a += a
        in_b += b
        if a != b:
            bad.append({"partition": vp.to_json(), "extremal": a, "stable_and_internal_extremal": b})
        if dep:
            dependent.append({"partition": vp.to_json()})
    return CharacterizationReport(ps.sizes, t, f, total, in_a, in_b, bad, dependent)


# -- recovery -----------------------------------------------------------------


@dataclass
class RecoveryResult:
    partition: VertexPartition
    removed: tuple[Vertex, ...]
    epsilon: float
    per_vertex_closeness: dict[Vertex, int]
    diagnostics: dict

    @property
    def success(self) -> bool:
        return self.epsilon < 1

    def to_json(self) -> dict:
        return {
            "partition": self.partition.to_json(),
            "removed": [list(v) for v in self.removed],
            "epsilon": self.epsilon,
            "success": self.success,
            "max_closeness": max(self.per_vertex_closeness.values(), default=0),
            "per_vertex_closeness": [[list(v), c] for v, c in sorted(self.per_vertex_closeness.items())],
            "diagnostics": self.diagnostics,
        }


def peel(graph: MultipartiteGraph, keep: int, t: int) -> tuple[list[int], list[dict]]:
    """Split ``keep`` into layers: take a max-degree vertex ``v`` of the current
    set ``S``, emit ``S \\ N(v)`` and continue inside ``N(v)``."""
    rows = [row & keep for row in graph.rows]
    sub = graph.with_rows([rows[g] if (keep >> g) & 1 else 0 for g in range(graph.n)])
    layers: list[int] = []
    trace: list[dict] = []
    S = keep
    while S:
        if len(layers) == t - 1:
            raise PeelOverflow(f"{t - 1} layers leave {S.bit_count()} vertices unplaced")
        restricted = sub.with_rows([sub.rows[g] & S if (S >> g) & 1 else 0 for g in range(graph.n)])
        v = max_degree_vertex(restricted, S)
        nbrs = restricted.rows[v]
        layers.append(S & ~nbrs)
        trace.append({"pivot": list(graph.vertex(v)), "degree": nbrs.bit_count(), "layer_size": (S & ~nbrs).bit_count()})
        S = nbrs
    return layers, trace


def _assign_by_fewest_neighbours(graph: MultipartiteGraph, layers: Sequence[int], home: Sequence[int | None]) -> list[int]:
    out = []
    for g in range(graph.n):
        hits = [(graph.rows[g] & layer).bit_count() for layer in layers]
        low = min(hits)
        if home[g] is not None and hits[home[g]] == low:
            out.append(home[g])
        else:
            out.append(hits.index(low))
    return out


def _make_one_partial(vp: VertexPartition, exclude: int) -> int:
    """Drop the smaller pieces of extra split classes until each block hosts at most one."""
    starts = class_offsets(vp.sizes)
    while True:
        counts = counts_of(vp, exclude)
        v = _violation(counts, math.inf)
        if v.violated_condition != "OnePartial":
            return exclude
        j = v.witness["block"]
        classes = v.witness["classes"]
        keep = max(classes, key=lambda i: (counts[i][j], -i))
        for i in classes:
            if i == keep:
                continue
            for g in range(starts[i], starts[i + 1]):
                if vp.block_of[g] == j:
                    exclude |= 1 << g


def _stabilize_mask(vp: VertexPartition, exclude: int) -> int:
    exclude = _make_one_partial(vp, exclude)
    eps = min_stable_eps(counts_of(vp, exclude))
    X, _ = stabilize(vp, eps=eps, check_sizes=False, exclude=exclude)
    starts = class_offsets(vp.sizes)
    for v in X:
        exclude |= 1 << (starts[v.class_index] + v.offset)
    return exclude


def _certify(graph: MultipartiteGraph, vp: VertexPartition, X: int, nt: int) -> tuple[float, dict[int, int]]:
    per = per_vertex_closeness(graph, complete_induced(graph.sizes, vp), X)
    return max(X.bit_count(), max(per.values(), default=0)) / nt, per


def recover_partition(graph: MultipartiteGraph, t: int, xi: float = 0.05) -> RecoveryResult:
    """Find ``(P, X, eps)`` with ``P`` an (X, eps)-stable (t-1)-partition of ``graph``.

    Pipeline: symmetrize every class; set aside classes smaller than
    ``xi * n_{t-1}``; peel the symmetrized graph into ``t - 1`` layers; send
    each original vertex to the layer where it has fewest neighbours; remove
    vertices until the partition is stable; then keep moving the worst-fitting
    vertex into ``X`` while ``|X|`` stays below the best certified ``eps * n_{t-1}``,
    returning the best triple seen.
    """
    validate(graph.sizes.sizes, Pattern(t))
    found = contains_clique(graph, t)
    if found is not None:
        raise NotKtFree(f"graph contains K_{t} on {[list(v) for v in found.copies[0]]}")
    nt = graph.sizes.sizes[t - 2]
    full = (1 << graph.n) - 1

    sym = symmetrize_all(graph)
    small = [ci for ci in range(graph.sizes.r) if graph.sizes[ci] < xi * nt]
    X = 0
    for ci in small:
        X |= graph.class_mask(ci)
    layers, trace = peel(sym, full & ~X, t)
    while len(layers) < t - 1:
        layers.append(0)
    home: list[int | None] = [None] * graph.n
    for j, layer in enumerate(layers):
        for g in _bits(layer):
            home[g] = j
    block_of = _assign_by_fewest_neighbours(graph, layers, home)
    vp = VertexPartition(graph.sizes.sizes, t - 1, tuple(block_of))
    moved = sum(1 for g in range(graph.n) if home[g] is not None and home[g] != block_of[g])

    X = _stabilize_mask(vp, X)
    stabilized = X.bit_count()
    eps, per = _certify(graph, vp, X, nt)
    best = (eps, X, per, 0)
    moves: list[list[int]] = []
    # Moving the worst-fitting vertex into X can only pay off while |X| is
    # still below the best certified bound; keep the best triple seen.
    while per and X.bit_count() + 1 < best[0] * nt:
        worst = max(per, key=lambda g: (per[g], -g))
        if per[worst] == 0:
            break
        X = _stabilize_mask(vp, X | (1 << worst))
        eps, per = _certify(graph, vp, X, nt)
        moves.append(list(graph.vertex(worst)))
        if eps < best[0]:
            best = (eps, X, per, len(moves))
    eps, X, per, kept = best
    certified_moves = moves[:kept]

    canon = vp.canonical()
    verdict = is_x_eps_stable(graph, canon, X, eps)
    if not verdict.holds:
        raise AssertionError(f"recovered triple fails certification: {verdict.violated_condition}")
    return RecoveryResult(
        partition=canon,
        removed=tuple(graph.vertex(g) for g in _bits(X)),
        epsilon=eps,
        per_vertex_closeness={graph.vertex(g): c for g, c in per.items()},
        diagnostics={
            "small_classes": small,
            "peel": trace,
            "reassigned": moved,
            "removed_after_stabilize": stabilized,
            "certification_moves": certified_moves,
            "n_t_minus_1": nt,
        },
    )
