"""Exact evaluation of the extremal functions f and g and the size calculus
(L-balance families, tau, size-gap thresholds) used by the stability theory.

All functions take class sizes as plain index-stable sequences: residual
sizes produced by removing dominating vertices need not stay sorted, and
class ``i`` must keep meaning class ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterator, Sequence

from .core import ExtremalWitness, IndexPartition
from .errors import InfeasibleDominators, InvalidArity, NumericRange, PreconditionViolated


@dataclass(frozen=True)
class ScoredPartition:
    partition: IndexPartition
    cross_sum: int
    balance_term: int
    score: int


@dataclass(frozen=True)
class BalanceFamilies:
    families: tuple[tuple[int, ...], ...]  # class indices, in sorted-size order

    def sizes(self, sizes: Sequence[int]) -> list[list[int]]:
        return [[sizes[i] for i in fam] for fam in self.families]


def _rgs(r: int, parts: int) -> Iterator[list[int]]:
    """Restricted growth strings of length r using exactly ``parts`` labels."""
    a = [0] * r

    def rec(i: int, used: int) -> Iterator[list[int]]:
        if r - i < parts - used:
            return
        if i == r:
            if used == parts:
                yield a
            return
        for b in range(min(used + 1, parts)):
            a[i] = b
            yield from rec(i + 1, max(used, b + 1))

    if r == 0:
        if parts == 0:
            yield a
        return
    a[0] = 0
    yield from rec(1, 1)


def _blocks_from_rgs(a: Sequence[int], parts: int) -> IndexPartition:
    blocks: list[list[int]] = [[] for _ in range(parts)]
    for i, b in enumerate(a):
        blocks[b].append(i)
    return IndexPartition(tuple(tuple(b) for b in blocks))


def enumerate_index_partitions(r: int, parts: int) -> Iterator[IndexPartition]:
    """Every partition of ``range(r)`` into exactly ``parts`` non-empty blocks,
    once each, in canonical form (lexicographic restricted-growth order)."""
    if parts < 1 or parts > r:
        raise InvalidArity(f"cannot split {r} indices into {parts} non-empty blocks")
    for a in _rgs(r, parts):
        yield _blocks_from_rgs(a, parts)


def _cross_sum(weights: Sequence[int]) -> int:
    total = sum(weights)
    return (total * total - sum(w * w for w in weights)) // 2


def score_partition(sizes: Sequence[int], partition: IndexPartition, k: int = 1) -> ScoredPartition:
    """Evaluate ``(k-1) n_P + sum over unordered block pairs of n_I n_I'``."""
    if partition.r != len(sizes):
        raise InvalidArity(f"partition covers {partition.r} classes, host has {len(sizes)}")
    weights = [sum(sizes[i] for i in b) for b in partition.blocks]
    cross = _cross_sum(weights)
    balance = max(
        (w - min(sizes[i] for i in b) for w, b in zip(weights, partition.blocks) if b),
        default=0,
    )
    return ScoredPartition(partition, cross, balance, (k - 1) * balance + cross)


def _effective_parts(r: int, t: int) -> int:
    if t < 2:
        raise InvalidArity(f"t must be at least 2, got {t}")
    if r < 1:
        raise InvalidArity("no classes")
    return min(r, t - 1)


def compute_f(sizes: Sequence[int], k: int, t: int) -> tuple[int, list[IndexPartition]]:
    """``f(n_1, ..., n_r, k, t)`` by enumeration of index partitions.

    Returns the value and every maximizing partition in enumeration order.
    When ``r < t - 1`` the host is split into ``r`` singleton blocks (the
    remaining blocks would be empty).
    """
    sizes = tuple(int(s) for s in sizes)
    r = len(sizes)
    parts = _effective_parts(r, t)
    if k < 1:
        raise InvalidArity(f"k must be positive, got {k}")
    best = -1
    argmax: list[IndexPartition] = []
    for a in _rgs(r, parts):
        weights = [0] * parts
        mins = [None] * parts
        for i, b in enumerate(a):
            weights[b] += sizes[i]
            if mins[b] is None or sizes[i] < mins[b]:
                mins[b] = sizes[i]
        score = _cross_sum(weights)
        if k > 1:
            score += (k - 1) * max(w - m for w, m in zip(weights, mins))
        if score > best:
            best = score
            argmax = [_blocks_from_rgs(a, parts)]
        elif score == best:
            argmax.append(_blocks_from_rgs(a, parts))
    return best, argmax


@lru_cache(maxsize=None)
def _f1(sorted_sizes: tuple[int, ...], t: int) -> int:
    return compute_f(sorted_sizes, 1, t)[0]


def f_value(sizes: Sequence[int], t: int) -> int:
    """Memoized ``f(sizes, 1, t)`` (a symmetric function of the sizes)."""
    return _f1(tuple(sorted(sizes, reverse=True)), t)


@lru_cache(maxsize=None)
def _g_rec(sorted_sizes: tuple[int, ...], k: int, t: int) -> int:
    if k == 1:
        return _f1(sorted_sizes, t)
    n = sum(sorted_sizes)
    best = -1
    seen = set()
    for i, s in enumerate(sorted_sizes):
        if s < 1 or s in seen:
            continue
        seen.add(s)
        rest = list(sorted_sizes)
        rest[i] -= 1
        rest.sort(reverse=True)
        best = max(best, (n - s) + _g_rec(tuple(rest), k - 1, t))
    if best < 0:
        raise InfeasibleDominators("no vertex left to serve as a dominator")
    return best


def _check_g_args(sizes: Sequence[int], k: int, t: int) -> None:
    if k < 1:
        raise InvalidArity(f"k must be positive, got {k}")
    if len(sizes) < t:
        raise InvalidArity(f"need r >= t, got r={len(sizes)}, t={t}")
    if k - 1 > sum(sizes):
        raise InfeasibleDominators(f"{k - 1} dominators exceed {sum(sizes)} vertices")


def compute_g(
    sizes: Sequence[int], k: int, t: int, mode: str = "recursive"
) -> tuple[int, ExtremalWitness]:
    """``g(n_1, ..., n_r, k, t)``: best (t-1)-partite graph plus ``k-1``
    vertices joined to everything outside their own class.

    ``recursive`` peels one dominator at a time (memoized on the sorted size
    multiset); ``direct`` enumerates dominator multisets in closed form.
    """
    sizes = tuple(int(s) for s in sizes)
    _check_g_args(sizes, k, t)
    if mode == "recursive":
        return _compute_g_recursive(sizes, k, t)
    if mode == "direct":
        return _compute_g_direct(sizes, k, t)
    raise ValueError(f"unknown mode {mode!r}")


def _compute_g_recursive(sizes: tuple[int, ...], k: int, t: int) -> tuple[int, ExtremalWitness]:
    value = _g_rec(tuple(sorted(sizes, reverse=True)), k, t)
    cur = list(sizes)
    dominators = []
    remaining = value
    for level in range(k, 1, -1):
        n = sum(cur)
        for i, s in enumerate(cur):
            if s < 1:
                continue
            nxt = cur.copy()
            nxt[i] -= 1
            sub = _g_rec(tuple(sorted(nxt, reverse=True)), level - 1, t)
            if (n - s) + sub == remaining:
                dominators.append(i)
                remaining = sub
                cur = nxt
                break
        else:  # pragma: no cover - memo table is self-consistent
            raise AssertionError("g witness reconstruction failed")
    _, argmax = compute_f(cur, 1, t)
    return value, ExtremalWitness(tuple(dominators), argmax[0])


def g_direct_value(sizes: Sequence[int], multiplicities: Sequence[int], t: int) -> int:
    """Edge count of the construction with ``multiplicities[i]`` dominators in class i."""
    n = sum(sizes)
    d = sum(multiplicities)
    residual = [s - m for s, m in zip(sizes, multiplicities)]
    joined = sum(m * (n - s) for s, m in zip(sizes, multiplicities))
    doubled = math.comb(d, 2) - sum(math.comb(m, 2) for m in multiplicities)
    return f_value(residual, t) + joined - doubled


def _compute_g_direct(sizes: tuple[int, ...], k: int, t: int) -> tuple[int, ExtremalWitness]:
    r = len(sizes)
    best = -1
    best_classes: tuple[int, ...] = ()
    for classes in combinations_with_replacement(range(r), k - 1):
        m = [0] * r
        for c in classes:
            m[c] += 1
        if any(mi > s for mi, s in zip(m, sizes)):
            continue
        value = g_direct_value(sizes, m, t)
        if value > best:
            best, best_classes = value, classes
    if best < 0:
        raise InfeasibleDominators("no feasible dominator placement")
    m = [0] * r
    for c in best_classes:
        m[c] += 1
    residual = [s - mi for s, mi in zip(sizes, m)]
    _, argmax = compute_f(residual, 1, t)
    return best, ExtremalWitness(best_classes, argmax[0])


def l_balance_families(sizes: Sequence[int], L: int) -> BalanceFamilies:
    """Split the sizes (taken in non-increasing order) into maximal L-balance
    families: a new family starts wherever ``n_i < n_{i-1} / L^4``."""
    if L < 1:
        raise InvalidArity(f"L must be at least 1, got {L}")
    order = sorted(range(len(sizes)), key=lambda i: (-sizes[i], i))
    L4 = L**4
    families: list[list[int]] = []
    for pos, i in enumerate(order):
        if pos == 0 or sizes[i] * L4 < sizes[order[pos - 1]]:
            families.append([i])
        else:
            families[-1].append(i)
    return BalanceFamilies(tuple(tuple(f) for f in families))


def compute_tau(sizes: Sequence[int], t: int, L: int) -> int:
    """Number of leading balance families holding fewer than ``t-1`` classes."""
    fams = l_balance_families(sizes, L).families
    if len(fams[0]) >= t - 1:
        return 0
    total = 0
    x = 0
    for fam in fams:
        if total + len(fam) < t - 1:
            total += len(fam)
            x += 1
        else:
            break
    return x


_GUARD = Decimal("1e-12")


def size_gap_eta(u: Sequence[int], N: int, eps) -> tuple[float, int]:
    """Threshold ``eta`` splitting ``u`` into entries ``< eta N`` and entries
    ``>= eta^(1/10) N``.

    ``eps`` may be given as ``str`` or ``Decimal`` to reach values far below
    float range; the returned ``eta`` is rounded to float.
    """
    m = len(u)
    if m > 8:
        raise NumericRange(f"at most 8 entries supported, got {m}")
    if m == 0:
        raise PreconditionViolated("empty sequence")
    if any(x < 0 for x in u):
        raise PreconditionViolated("entries must be non-negative")
    if N > sum(u):
        raise PreconditionViolated(f"N={N} exceeds the total {sum(u)}")
    with localcontext() as ctx:
        ctx.prec = 60
        e = Decimal(str(eps)) if not isinstance(eps, Decimal) else eps
        if e <= 0:
            raise PreconditionViolated("eps must be positive")
        # eps < (1/m)^(10^m), compared in log10 to avoid underflow
        if m > 1 and e.log10() >= -(Decimal(10) ** m) * Decimal(m).log10():
            raise PreconditionViolated(f"eps must be below (1/{m})^(10^{m})")
        if m == 1 and e >= 1:
            raise PreconditionViolated("eps must be below 1")
        us = [Decimal(0)] + sorted(Decimal(x) for x in u)
        Nd = Decimal(N)

        def root(i: int) -> Decimal:
            return e ** (Decimal(1) / (Decimal(10) ** i))

        for i in range(m):
            lo = root(i) * Nd
            hi = root(i + 1) * Nd
            if us[i] <= lo * (1 + _GUARD) and us[i + 1] >= hi * (1 - _GUARD):
                eta = root(i)
                _check_dichotomy(u, Nd, eta)
                return float(eta), i
    raise AssertionError("no gap found; precondition should have excluded this")


def _check_dichotomy(u: Sequence[int], N: Decimal, eta: Decimal) -> None:
    small = eta * N * (1 + _GUARD)
    big = eta ** (Decimal(1) / 10) * N * (1 - _GUARD)
    for x in u:
        if not (Decimal(x) <= small or Decimal(x) >= big):
            raise AssertionError(f"size gap dichotomy fails for {x}")
