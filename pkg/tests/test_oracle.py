from __future__ import annotations

import random

import pytest

from gen import random_multipartite
from mpturan.calculus import compute_f, compute_g
from mpturan.core import MultipartiteGraph, PartSizes, Pattern
from mpturan.errors import BudgetExceeded
from mpturan.graphs import build_complete, complete_induced, contains_disjoint_cliques
from mpturan.oracle import Budget, brute_force_ex, certify_theorem, edge_order, report_lines, sizes_range
from mpturan.stability import enumerate_extremal_vertex_partitions


def check_result(res, sizes, pattern, host=None):
    host = host or build_complete(sizes)
    assert res.witness.num_edges == res.value
    assert all(a & ~b == 0 for a, b in zip(res.witness.rows, host.rows))
    assert contains_disjoint_cliques(res.witness, pattern.k, pattern.t) is None


@pytest.mark.parametrize(
    "sizes, t, k, value", [((2, 2, 2), 3, 1, 8), ((3, 2, 2), 3, 1, 12), ((2, 2, 2), 3, 2, 10)]
)
def test_oracle_examples(sizes, t, k, value):
    res = brute_force_ex(sizes, Pattern(t, k))
    assert res.value == value and res.exhaustive
    check_result(res, sizes, Pattern(t, k))


def test_edge_order_ends_cliques_early():
    order = edge_order(build_complete((2, 2, 2)))
    assert order == sorted(order, key=lambda e: (e[1], e[0]))
    assert len(order) == 12


def test_budget_limits():
    with pytest.raises(BudgetExceeded):
        brute_force_ex((3, 3, 3, 3), Pattern(3))
    res = brute_force_ex((3, 3, 3), Pattern(3), Budget(max_nodes=5), seed_incumbent=False, packing_bound=False)
    assert not res.exhaustive
    check_result(res, (3, 3, 3), Pattern(3))


def test_search_without_seed_or_packing_agrees():
    for r in (3, 4):
        for sizes in sizes_range(r, 1, 2 if r == 4 else 3):
            for pattern in (Pattern(3), Pattern(3, 2)):
                if build_complete(sizes).num_edges > 30:
                    continue
                fast = brute_force_ex(sizes, pattern)
                plain = brute_force_ex(sizes, pattern, seed_incumbent=False, packing_bound=False)
                assert fast.value == plain.value, sizes
                assert plain.exhaustive
                check_result(plain, sizes, pattern)


def test_oracle_bounds_formulas_from_above():
    for sizes in sizes_range(3, 1, 3):
        for k in (1, 2):
            res = brute_force_ex(sizes, Pattern(3, k))
            formula = compute_f(sizes, 1, 3)[0] if k == 1 else compute_g(sizes, k, 3)[0]
            assert res.value >= formula


def _relabel(g: MultipartiteGraph, rng: random.Random) -> MultipartiteGraph:
    sizes = g.sizes.sizes
    # permute classes of equal size, then vertices inside each class
    groups: dict[int, list[int]] = {}
    for ci, s in enumerate(sizes):
        groups.setdefault(s, []).append(ci)
    class_map = {}
    for members in groups.values():
        shuffled = members[:]
        rng.shuffle(shuffled)
        class_map.update(zip(members, shuffled))
    offset_map = {}
    for ci, s in enumerate(sizes):
        perm = list(range(s))
        rng.shuffle(perm)
        for off in range(s):
            offset_map[ci, off] = (class_map[ci], perm[off])
    edges = [(offset_map[g.vertex(u)], offset_map[g.vertex(v)]) for u, v in g.edges()]
    return MultipartiteGraph.from_edges(g.sizes, edges)


def test_value_invariant_under_relabelling():
    rng = random.Random(41)
    for _ in range(15):
        host = random_multipartite(rng, max_vertices=9)
        if host.num_edges > 30:
            continue
        for pattern in (Pattern(3), Pattern(3, 2)):
            if host.sizes.r < 3:
                continue
            base = brute_force_ex(host.sizes, pattern, host=host)
            for _ in range(10):
                other = _relabel(host, rng)
                assert brute_force_ex(host.sizes, pattern, host=other).value == base.value


def test_parallel_matches_sequential():
    for sizes, pattern in [((2, 2, 2), Pattern(3)), ((3, 2, 2), Pattern(3)), ((2, 2, 2), Pattern(3, 2)), ((2, 2, 2, 1), Pattern(3))]:
        seq = brute_force_ex(sizes, pattern, seed_incumbent=False)
        par = brute_force_ex(sizes, pattern, seed_incumbent=False, jobs=2, split_depth=3)
        assert par.value == seq.value
        assert par.witness == seq.witness


@pytest.mark.parametrize("sizes", [(2, 2, 2), (3, 2, 2), (2, 2, 1), (2, 1, 1, 1), (2, 2, 2, 1), (3, 3, 2)])
def test_optima_are_partition_graphs(sizes):
    res = brute_force_ex(sizes, Pattern(3), Budget(60, 14), enumerate_optima=True)
    ps = PartSizes(sizes)
    expected = {complete_induced(ps, vp) for vp in enumerate_extremal_vertex_partitions(sizes, 3)}
    assert set(res.optima) == expected
    assert len(res.optima) == len(set(res.optima))


def test_certify_sweeps():
    records = certify_theorem(sizes_range(3, 1, 3), 3, 1)
    assert records and all(r.relation == "equal" for r in records)
    (rec,) = certify_theorem([(2, 2, 2)], 3, 2, check_structure=True)
    assert (rec.oracle, rec.formula, rec.relation, rec.all_optima_structured) == (10, 10, "equal", True)
    (skipped,) = certify_theorem([(5, 5, 5)], 3, 1)
    assert skipped.relation == "skipped"
    lines = list(report_lines(records[:2]))
    assert all(line.startswith("{") and '"relation":"equal"' in line for line in lines)
