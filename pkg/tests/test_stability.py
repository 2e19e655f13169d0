from __future__ import annotations

import random
from itertools import product

import pytest

from gen import random_eps_stable_counts, random_free_graph
from mpturan.calculus import compute_f
from mpturan.core import MultipartiteGraph, PartSizes, Vertex, VertexPartition, class_offsets
from mpturan.errors import InvalidPartition, NotKtFree, PreconditionViolated, SizeLimit, TooFewClasses
from mpturan.graphs import build_complete, complete_induced
from mpturan.oracle import sizes_range
from mpturan.stability import (
    TAGS,
    classify,
    classify_counts,
    edges_from_counts,
    enumerate_extremal_vertex_partitions,
    enumerate_vertex_partitions,
    internalization_values,
    internalize,
    is_eps_stable,
    is_one_partial,
    is_stable,
    is_x_eps_stable,
    min_stable_eps,
    recover_partition,
    stabilize,
    stabilize_counts,
    stable_counts,
    verify_characterization,
)

S = (3, 2, 2)
INTEGRAL = VertexPartition.from_class_blocks(S, [[0], [1, 2]])
# V_1 + x | V_2 + y with V_3 = {x, y}
SPLIT = VertexPartition.from_blocks(S, [[(0, 0), (0, 1), (0, 2), (2, 0)], [(1, 0), (1, 1), (2, 1)]])


def vertex_set(sizes, mask: int) -> list[Vertex]:
    starts = class_offsets(sizes)
    return [Vertex(ci, g - starts[ci]) for ci in range(len(sizes)) for g in range(starts[ci], starts[ci + 1]) if (mask >> g) & 1]


def random_vp(rng: random.Random, sizes, parts: int) -> VertexPartition:
    """Random partition biased towards few split classes."""
    block_of = []
    for s in sizes:
        home = rng.randrange(parts)
        for _ in range(s):
            block_of.append(home if rng.random() < 0.8 else rng.randrange(parts))
    return VertexPartition(tuple(sizes), parts, tuple(block_of))


def test_classify_examples():
    rep = classify(INTEGRAL, S)
    assert not rep.partial_classes_of_V
    assert rep.integral_part_sizes == (3, 4) and rep.partial_part_sizes == (0, 0)
    rep = classify(SPLIT)
    assert rep.partial_classes_of_V == {2}
    assert rep.status[2, 0] == rep.status[2, 1] == "partial"
    assert rep.integral_part_sizes == (3, 2) and rep.partial_part_sizes == (1, 1)
    with_empty = VertexPartition.from_class_blocks(S, [[0, 1, 2], []])
    rep = classify(with_empty)
    assert all(rep.status[i, 1] == "absent" for i in range(3))


def test_classification_invariants():
    rng = random.Random(31)
    for _ in range(500):
        sizes = sorted((rng.randint(1, 4) for _ in range(rng.randint(3, 5))), reverse=True)
        vp = random_vp(rng, sizes, rng.randint(2, 3))
        rep = classify(vp)
        counts = vp.counts()
        for (i, j), status in rep.status.items():
            assert (status == "integral") == (counts[i][j] == sizes[i])
            assert (status == "partial") == (0 < counts[i][j] < sizes[i])
        for j in range(vp.parts):
            assert rep.integral_part_sizes[j] + rep.partial_part_sizes[j] == sum(row[j] for row in counts)


def test_one_partial():
    assert is_one_partial(SPLIT)
    assert is_one_partial(INTEGRAL)
    both = VertexPartition.from_blocks(
        (2, 2, 2, 2),
        [[(0, 0), (0, 1), (2, 0), (3, 0)], [(1, 0), (1, 1), (2, 1), (3, 1)]],
    )
    assert not is_one_partial(both)
    assert is_stable(both).violated_condition == "OnePartial"


def test_stable_examples():
    assert is_stable(INTEGRAL, S).holds
    v = is_stable(SPLIT, S)
    assert v.violated_condition == "EqualPartialIntegralParts"
    assert sorted(v.witness["sizes"]) == [2, 3]
    r3 = VertexPartition.from_class_blocks((3, 2), [[0], [1]])
    assert is_stable(r3).holds


def test_each_condition_is_reachable():
    seen = set()
    # a partial block next to an integral one needs at least three blocks
    for sizes in [(2, 2, 2), (3, 2, 2), (2, 2, 2, 2), (3, 3, 1), (4, 2, 1)]:
        for t in (3, 4):
            for vp in enumerate_vertex_partitions(sizes, t - 1):
                v = is_stable(vp)
                if not v.holds:
                    seen.add(v.violated_condition)
    assert seen == set(TAGS)


def test_eps_stable_examples():
    assert is_eps_stable(SPLIT, S, eps=1).holds
    assert not is_eps_stable(SPLIT, S, eps=0).holds
    assert is_eps_stable(INTEGRAL, S, eps=3.5).holds
    assert min_stable_eps(SPLIT.counts()) == 1


def test_eps_zero_matches_stable():
    rng = random.Random(32)
    for _ in range(2000):
        sizes = sorted((rng.randint(1, 5) for _ in range(rng.randint(3, 6))), reverse=True)
        vp = random_vp(rng, sizes, rng.randint(2, 4))
        assert is_eps_stable(vp, eps=0) == is_stable(vp)


def test_min_stable_eps_is_tight():
    rng = random.Random(33)
    for _ in range(1000):
        sizes = sorted((rng.randint(1, 6) for _ in range(rng.randint(3, 5))), reverse=True)
        counts = random_vp(rng, sizes, rng.randint(2, 3)).counts()
        eps = min_stable_eps(counts)
        if eps == float("inf"):
            assert stable_counts(counts, 10**6).violated_condition == "OnePartial"
            continue
        assert stable_counts(counts, eps).holds
        if eps >= 1:
            assert not stable_counts(counts, eps - 1).holds


def test_internalize_examples():
    out = internalize(SPLIT, S)
    assert out.same_up_to_block_order(INTEGRAL)
    assert edges_from_counts(out.counts()) == 12
    other = internalize(SPLIT, S, choice={2: 0})
    assert edges_from_counts(other.counts()) == 10
    assert internalize(INTEGRAL) == INTEGRAL
    with pytest.raises(InvalidPartition):
        internalize(SPLIT, choice={0: 1})
    with pytest.raises(InvalidPartition):
        internalize(VertexPartition.from_blocks(S, [[(0, 0), (0, 1), (0, 2), (2, 0), (2, 1)], [(1, 0), (1, 1)]]), choice={2: 1})


def test_internalize_is_idempotent_and_integral():
    rng = random.Random(34)
    for _ in range(500):
        sizes = sorted((rng.randint(1, 4) for _ in range(rng.randint(3, 5))), reverse=True)
        vp = random_vp(rng, sizes, rng.randint(2, 3))
        once = internalize(vp)
        assert not classify(once).partial_classes_of_V
        assert internalize(once) == once


def test_edges_from_counts_matches_graph():
    rng = random.Random(35)
    for _ in range(300):
        sizes = sorted((rng.randint(1, 4) for _ in range(rng.randint(3, 5))), reverse=True)
        vp = random_vp(rng, sizes, rng.randint(1, 4))
        assert edges_from_counts(vp.counts()) == complete_induced(PartSizes(tuple(sizes)), vp).num_edges


def test_internalization_value_is_choice_free_for_stable_partitions():
    for total in range(3, 10):
        for r in (3, 4):
            for sizes in sizes_range(r, 1, total):
                if sum(sizes) != total:
                    continue
                for t in (3, 4):
                    for vp in enumerate_vertex_partitions(sizes, t - 1):
                        if is_stable(vp).holds:
                            assert len(internalization_values(vp.counts())) == 1


def test_x_eps_stable_examples():
    g = complete_induced(PartSizes(S), INTEGRAL)
    assert is_x_eps_stable(g, INTEGRAL, [], 0).holds
    h = complete_induced(PartSizes(S), SPLIT)
    assert is_x_eps_stable(h, SPLIT, [(0, 2)], 0.5).holds
    assert not is_x_eps_stable(h, SPLIT, [], 0).holds
    assert is_x_eps_stable(h, SPLIT, [(0, 2)], 0.4).violated_condition == "RemovedSetTooLarge"
    assert is_x_eps_stable(build_complete(S), SPLIT, [(0, 2)], 0.5).violated_condition == "NotClose"


def test_stabilize_examples():
    X, vp = stabilize(INTEGRAL, S, 0)
    assert X == () and vp == INTEGRAL
    X, vp = stabilize(SPLIT, S, 1, check_sizes=False)
    assert len(X) == 1 and X[0].class_index == 0 and len(X) <= 4 * 3 * 3 * 1
    with pytest.raises(PreconditionViolated):
        stabilize(SPLIT, S, 1)
    with pytest.raises(PreconditionViolated):
        stabilize(SPLIT, S, 0)


def test_stabilize_bound_on_random_eps_stable_partitions():
    rng = random.Random(36)
    for _ in range(500):
        counts, eps, t = random_eps_stable_counts(rng)
        removed = stabilize_counts(counts)
        r = len(counts)
        assert sum(map(sum, removed)) <= 4 * t * r * eps
        left = [[c - d for c, d in zip(a, b)] for a, b in zip(counts, removed)]
        assert stable_counts(left).holds


def test_stabilize_on_vertices():
    rng = random.Random(37)
    for _ in range(20):
        counts, eps, t = random_eps_stable_counts(rng)
        sizes = [sum(row) for row in counts]
        block_of = [j for row in counts for j, c in enumerate(row) for _ in range(c)]
        vp = VertexPartition(tuple(sizes), t - 1, tuple(block_of))
        X, same = stabilize(vp, eps=eps)
        assert same == vp
        assert len(X) <= 4 * t * len(sizes) * eps
        starts = class_offsets(sizes)
        mask = 0
        for v in X:
            mask |= 1 << (starts[v.class_index] + v.offset)
        assert is_stable(vp, exclude=mask).holds


def test_stable_integral_parts_reach_n_t_minus_1():
    def compositions(n: int, parts: int):
        if parts == 1:
            yield (n,)
            return
        for a in range(n + 1):
            for rest in compositions(n - a, parts - 1):
                yield (a,) + rest

    for t, limit in ((3, 9), (4, 7)):
        for r in range(t, limit + 1):
            for sizes in sizes_range(r, 1, limit):
                if sum(sizes) > limit:
                    continue
                for counts in product(*(list(compositions(s, t - 1)) for s in sizes)):
                    if stable_counts(counts).holds:
                        assert min(classify_counts(counts).integral_part_sizes) >= sizes[t - 2]


def test_extremal_partition_examples():
    found = enumerate_extremal_vertex_partitions((3, 2, 2), 3)
    assert any(vp.same_up_to_block_order(INTEGRAL) for vp in found)
    found = enumerate_extremal_vertex_partitions((2, 1, 1), 3)
    every = list(enumerate_vertex_partitions((2, 1, 1), 2))
    assert len(every) == 8
    expected = [vp for vp in every if complete_induced(PartSizes((2, 1, 1)), vp).num_edges == 4]
    assert sorted(v.block_of for v in found) == sorted(v.block_of for v in expected)
    with pytest.raises(TooFewClasses):
        enumerate_extremal_vertex_partitions((1, 1), 3)
    with pytest.raises(SizeLimit):
        enumerate_extremal_vertex_partitions((5, 5, 5), 3)


@pytest.mark.parametrize("sizes", [(2, 1, 1), (2, 2, 2), (3, 2, 2)])
def test_characterization_examples(sizes):
    rep = verify_characterization(sizes, 3)
    assert rep.match and rep.extremal == rep.stable_with_extremal_internalization > 0
    assert rep.f == compute_f(sizes, 1, 3)[0]


def test_characterization_on_four_classes():
    for sizes in [(2, 2, 1, 1), (2, 1, 1, 1), (3, 1, 1, 1)]:
        for t in (3, 4):
            assert verify_characterization(sizes, t).match


def test_recover_exact_input():
    sizes = (12, 8, 8)
    vp = VertexPartition.from_class_blocks(sizes, [[0], [1, 2]])
    res = recover_partition(complete_induced(PartSizes(sizes), vp), 3)
    assert res.epsilon == 0 and res.removed == () and res.partition.same_up_to_block_order(vp)


def test_recover_planted_split_class():
    sizes = (12, 11, 11)
    x_side = [(2, i) for i in range(5)]
    y_side = [(2, i) for i in range(5, 11)]
    planted = VertexPartition.from_blocks(
        sizes, [[(0, i) for i in range(12)] + x_side, [(1, i) for i in range(11)] + y_side]
    )
    g = complete_induced(PartSizes(sizes), planted)
    res = recover_partition(g, 3)
    assert res.partition.same_up_to_block_order(planted)
    assert res.epsilon <= 2 / 11
    assert is_x_eps_stable(g, res.partition, res.removed, res.epsilon).holds


def test_recover_degenerate_inputs():
    empty = MultipartiteGraph.empty(PartSizes((3, 3, 3)))
    assert not recover_partition(empty, 3).success
    with pytest.raises(NotKtFree):
        recover_partition(build_complete((2, 2, 2)), 3)


def test_recover_is_always_certified():
    rng = random.Random(38)
    for _ in range(200):
        t = rng.choice([3, 4])
        g = random_free_graph(rng, t)
        res = recover_partition(g, t)
        assert is_x_eps_stable(g, res.partition, res.removed, res.epsilon).holds
        nt = g.sizes.sizes[t - 2]
        assert res.epsilon * nt + 1e-9 >= len(res.removed)
        assert res.epsilon * nt + 1e-9 >= max(res.per_vertex_closeness.values(), default=0)
