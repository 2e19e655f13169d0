"""Domain types for multi-partite extremal problems.

Class indices and vertex offsets are 0-based everywhere.  A vertex is the
pair ``(class_index, offset)``; graphs additionally number vertices globally
in class-major order, which is the order used by every search routine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import accumulate
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import (
    EmptySizes,
    InvalidArity,
    InvalidGraph,
    InvalidPartition,
    InvalidWitness,
    NonPositiveSize,
    TooFewClasses,
)


class Vertex(NamedTuple):
    class_index: int
    offset: int


@dataclass(frozen=True)
class PartSizes:
    """Class cardinalities ``n_1 >= ... >= n_r`` of the host graph."""

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if not sizes:
            raise EmptySizes("at least one class is required")
        if any(s < 0 for s in sizes):
            raise NonPositiveSize(f"negative class size in {sizes}")
        if any(a < b for a, b in zip(sizes, sizes[1:])):
            raise InvalidPartition(f"sizes must be non-increasing, got {sizes}")

    @classmethod
    def of(cls, sizes: Iterable[int]) -> "PartSizes":
        """Sort arbitrary non-negative sizes into canonical order."""
        return cls(tuple(sorted((int(s) for s in sizes), reverse=True)))

    @property
    def r(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def nth(self, i: int) -> int:
        """The 1-based ``n_i`` (so ``nth(t - 1)`` is the usual ``n_{t-1}``)."""
        return self.sizes[i - 1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.sizes)

    def __len__(self) -> int:
        return len(self.sizes)

    def __getitem__(self, i: int) -> int:
        return self.sizes[i]


@dataclass(frozen=True)
class Pattern:
    """The forbidden graph ``k K_t``."""

    t: int
    k: int = 1

    def __post_init__(self) -> None:
        if self.t < 3:
            raise TooFewClasses(f"clique order must be at least 3, got t={self.t}")
        if self.k < 1:
            raise InvalidArity(f"multiplicity must be at least 1, got k={self.k}")


def validate(sizes: Sequence[int], pattern: Pattern | None = None) -> PartSizes:
    """Turn user input into canonical :class:`PartSizes`.

    >>> validate([2, 3, 2], Pattern(3)).sizes
    (3, 2, 2)
    """
    raw = list(sizes)
    if not raw:
        raise EmptySizes("at least one class is required")
    for s in raw:
        if int(s) != s or s < 1:
            raise NonPositiveSize(f"class sizes must be positive integers, got {s!r}")
    ps = PartSizes.of(raw)
    if pattern is not None and ps.r < pattern.t:
        raise TooFewClasses(f"need r >= t, got r={ps.r}, t={pattern.t}")
    return ps


@dataclass(frozen=True)
class IndexPartition:
    """A partition of class indices into blocks.

    Stored canonically: members sorted within blocks, non-empty blocks ordered
    by smallest member, empty blocks last.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = [tuple(sorted(int(x) for x in b)) for b in self.blocks]
        seen: set[int] = set()
        for b in blocks:
            for x in b:
                if x in seen or x < 0:
                    raise InvalidPartition(f"index {x} repeated or negative")
                seen.add(x)
        if seen != set(range(len(seen))):
            raise InvalidPartition(f"blocks must cover 0..{len(seen) - 1} exactly")
        full = sorted((b for b in blocks if b), key=lambda b: b[0])
        empty = [b for b in blocks if not b]
        object.__setattr__(self, "blocks", tuple(full) + tuple(empty))

    @property
    def r(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def parts(self) -> int:
        return len(self.blocks)

    def block_of(self) -> tuple[int, ...]:
        out = [0] * self.r
        for j, b in enumerate(self.blocks):
            for x in b:
                out[x] = j
        return tuple(out)

    def to_json(self) -> dict:
        return {"blocks": [list(b) for b in self.blocks]}

    @classmethod
    def from_json(cls, obj: dict) -> "IndexPartition":
        return cls(tuple(tuple(b) for b in obj["blocks"]))


def class_offsets(sizes: Sequence[int]) -> tuple[int, ...]:
    """Global index of the first vertex of each class (plus the total)."""
    return (0,) + tuple(accumulate(sizes))


@dataclass(frozen=True)
class VertexPartition:
    """Assignment of every host vertex to one of ``parts`` blocks.

    ``block_of`` is indexed by global (class-major) vertex index.
    """

    sizes: tuple[int, ...]
    parts: int
    block_of: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "block_of", tuple(int(b) for b in self.block_of))
        if len(self.block_of) != sum(self.sizes):
            raise InvalidPartition(
                f"{len(self.block_of)} assignments for {sum(self.sizes)} vertices"
            )
        if self.parts < 1 or any(not 0 <= b < self.parts for b in self.block_of):
            raise InvalidPartition("block index out of range")

    @classmethod
    def from_blocks(
        cls, sizes: Sequence[int], blocks: Sequence[Iterable[Vertex | tuple[int, int]]]
    ) -> "VertexPartition":
        starts = class_offsets(sizes)
        block_of: list[int | None] = [None] * starts[-1]
        for j, block in enumerate(blocks):
            for ci, off in block:
                if not (0 <= ci < len(sizes) and 0 <= off < sizes[ci]):
                    raise InvalidPartition(f"vertex ({ci}, {off}) outside host")
                g = starts[ci] + off
                if block_of[g] is not None:
                    raise InvalidPartition(f"vertex ({ci}, {off}) in two blocks")
                block_of[g] = j
        if any(b is None for b in block_of):
            raise InvalidPartition("partition does not cover every vertex")
        return cls(tuple(sizes), len(blocks), tuple(block_of))  # type: ignore[arg-type]

    @classmethod
    def from_class_blocks(
        cls, sizes: Sequence[int], blocks: Sequence[Iterable[int]]
    ) -> "VertexPartition":
        """Vertex partition in which every class lies wholly in one block."""
        where = {}
        for j, b in enumerate(blocks):
            for ci in b:
                where[ci] = j
        if sorted(where) != list(range(len(sizes))):
            raise InvalidPartition("class blocks must cover every class")
        block_of = [where[ci] for ci, s in enumerate(sizes) for _ in range(s)]
        return cls(tuple(sizes), len(blocks), tuple(block_of))

    def vertices(self) -> Iterator[Vertex]:
        for ci, s in enumerate(self.sizes):
            for off in range(s):
                yield Vertex(ci, off)

    def blocks(self) -> list[list[Vertex]]:
        out: list[list[Vertex]] = [[] for _ in range(self.parts)]
        for v, b in zip(self.vertices(), self.block_of):
            out[b].append(v)
        return out

    def block_masks(self) -> list[int]:
        masks = [0] * self.parts
        for g, b in enumerate(self.block_of):
            masks[b] |= 1 << g
        return masks

    def counts(self) -> list[list[int]]:
        """``counts[i][j] = |V_i ∩ P_j|`` (the refinement ``P ∧ V``)."""
        out = [[0] * self.parts for _ in self.sizes]
        starts = class_offsets(self.sizes)
        for ci in range(len(self.sizes)):
            for g in range(starts[ci], starts[ci + 1]):
                out[ci][self.block_of[g]] += 1
        return out

    def canonical(self) -> "VertexPartition":
        """Relabel blocks sorted by (size, smallest vertex); empty blocks first."""
        n = len(self.block_of)
        size = [0] * self.parts
        first = [n] * self.parts
        for g, b in enumerate(self.block_of):
            size[b] += 1
            first[b] = min(first[b], g)
        order = sorted(range(self.parts), key=lambda b: (size[b], first[b], b))
        relabel = {old: new for new, old in enumerate(order)}
        return VertexPartition(
            self.sizes, self.parts, tuple(relabel[b] for b in self.block_of)
        )

    def same_up_to_block_order(self, other: "VertexPartition") -> bool:
        return self.canonical() == other.canonical()

    def to_json(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "blocks": [[list(v) for v in block] for block in self.blocks()],
        }

    @classmethod
    def from_json(cls, obj: dict, sizes: Sequence[int] | None = None) -> "VertexPartition":
        if sizes is None:
            sizes = obj["sizes"]
        return cls.from_blocks(list(sizes), [[tuple(v) for v in b] for b in obj["blocks"]])


@dataclass(frozen=True, eq=True)
class MultipartiteGraph:
    """Spanning subgraph of ``K_{n_1,...,n_r}``.

    ``rows[g]`` is the neighbourhood bitset of global vertex ``g``.  Use
    :meth:`from_edges` rather than the raw constructor.
    """

    sizes: PartSizes
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.sizes.n
        if len(self.rows) != n:
            raise InvalidGraph(f"{len(self.rows)} adjacency rows for {n} vertices")
        starts = class_offsets(self.sizes.sizes)
        full = (1 << n) - 1
        for ci in range(self.sizes.r):
            cmask = ((1 << starts[ci + 1]) - 1) ^ ((1 << starts[ci]) - 1)
            for g in range(starts[ci], starts[ci + 1]):
                row = self.rows[g]
                if row & ~full:
                    raise InvalidGraph("neighbour index out of range")
                if row & cmask:
                    raise InvalidGraph(f"edge inside class {ci}")
        for g, row in enumerate(self.rows):
            rest = row
            while rest:
                low = rest & -rest
                h = low.bit_length() - 1
                if not (self.rows[h] >> g) & 1:
                    raise InvalidGraph("adjacency is not symmetric")
                rest ^= low

    # -- construction -------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        sizes: PartSizes | Sequence[int],
        edges: Iterable[tuple[Vertex | tuple[int, int] | int, Vertex | tuple[int, int] | int]],
    ) -> "MultipartiteGraph":
        if not isinstance(sizes, PartSizes):
            sizes = PartSizes(tuple(sizes))
        starts = class_offsets(sizes.sizes)
        n = starts[-1]

        def gid(v) -> int:
            if isinstance(v, int):
                if not 0 <= v < n:
                    raise InvalidGraph(f"vertex {v} outside host")
                return v
            ci, off = v
            if not (0 <= ci < sizes.r and 0 <= off < sizes[ci]):
                raise InvalidGraph(f"vertex ({ci}, {off}) outside host")
            return starts[ci] + off

        rows = [0] * n
        for a, b in edges:
            u, v = gid(a), gid(b)
            if u == v:
                raise InvalidGraph("self-loop")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(sizes, tuple(rows))

    @classmethod
    def empty(cls, sizes: PartSizes) -> "MultipartiteGraph":
        return cls(sizes, (0,) * sizes.n)

    # -- queries ------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def starts(self) -> tuple[int, ...]:
        return class_offsets(self.sizes.sizes)

    def vertex(self, g: int) -> Vertex:
        starts = self.starts
        for ci in range(self.sizes.r):
            if g < starts[ci + 1]:
                return Vertex(ci, g - starts[ci])
        raise IndexError(g)

    def index(self, v: Vertex | tuple[int, int]) -> int:
        return self.starts[v[0]] + v[1]

    def class_of(self) -> tuple[int, ...]:
        return tuple(ci for ci, s in enumerate(self.sizes) for _ in range(s))

    def class_mask(self, ci: int) -> int:
        starts = self.starts
        return ((1 << starts[ci + 1]) - 1) ^ ((1 << starts[ci]) - 1)

    def has_edge(self, u: int | Vertex, v: int | Vertex) -> bool:
        gu = u if isinstance(u, int) else self.index(u)
        gv = v if isinstance(v, int) else self.index(v)
        return bool((self.rows[gu] >> gv) & 1)

    def neighbors(self, g: int) -> int:
        return self.rows[g]

    def degree(self, g: int) -> int:
        return self.rows[g].bit_count()

    @property
    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as global index pairs ``(u, v)`` with ``u < v``, sorted."""
        out = []
        for u, row in enumerate(self.rows):
            rest = row >> (u + 1)
            v = u + 1
            while rest:
                if rest & 1:
                    out.append((u, v))
                tz = (rest & -rest).bit_length() - 1
                if tz == 0:
                    rest >>= 1
                    v += 1
                else:
                    rest >>= tz
                    v += tz
        return out

    def with_rows(self, rows: Sequence[int]) -> "MultipartiteGraph":
        return MultipartiteGraph(self.sizes, tuple(rows))

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "sizes": list(self.sizes.sizes),
            "edges": [[list(self.vertex(u)), list(self.vertex(v))] for u, v in self.edges()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MultipartiteGraph":
        return cls.from_edges(
            PartSizes(tuple(obj["sizes"])),
            [(tuple(a), tuple(b)) for a, b in obj["edges"]],
        )


@dataclass(frozen=True)
class ExtremalWitness:
    """``k - 1`` dominating vertices (by class) over a (t-1)-partite residual."""

    dominating_classes: tuple[int, ...]
    residual_partition: IndexPartition

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "dominating_classes", tuple(sorted(int(c) for c in self.dominating_classes))
        )

    @property
    def k(self) -> int:
        return len(self.dominating_classes) + 1

    def multiplicities(self, r: int) -> list[int]:
        m = [0] * r
        for c in self.dominating_classes:
            if not 0 <= c < r:
                raise InvalidWitness(f"dominator class {c} outside [0, {r})")
            m[c] += 1
        return m

    def residual_sizes(self, sizes: Sequence[int]) -> tuple[int, ...]:
        m = self.multiplicities(len(sizes))
        res = tuple(n - mi for n, mi in zip(sizes, m))
        if any(x < 0 for x in res):
            raise InvalidWitness("more dominators than vertices in a class")
        return res

    def to_json(self) -> dict:
        return {
            "dominators": list(self.dominating_classes),
            "residual_blocks": [list(b) for b in self.residual_partition.blocks],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExtremalWitness":
        return cls(
            tuple(obj["dominators"]),
            IndexPartition(tuple(tuple(b) for b in obj["residual_blocks"])),
        )


def dumps(obj) -> str:
    """Canonical, byte-comparable JSON text (newline terminated)."""
    if hasattr(obj, "to_json"):
        obj = obj.to_json()
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"
