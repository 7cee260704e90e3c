"""Exhaustive enumeration of bi-Lipschitz permutations of ``[0, n)``.

The search assigns ``values[0], values[1], ...`` in order, trying candidate
images in increasing order so maps come out lexicographically. Pruning:

* availability: a bitmask of unused images;
* forward: ``|values[i] - values[i-1]| <= floor(k_forward)``;
* backward: an inverse array ``pos`` is filled as images are placed, and
  ``|pos[y] - pos[y +- 1]| <= floor(k_backward)`` is checked on placement;
* deadline: once position ``i`` is reached, every image placed at
  ``i - K2 - 1`` must already have both neighbours placed.

For work splitting the top two levels are expanded once and each prefix is
searched independently; results are merged in prefix order, so output does
not depend on the number of workers.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .rigidity import midrange_const

PRUNE_RULES = ("availability", "forward", "backward", "deadline")
SPLIT_DEPTH = 2
NAIVE_LIMIT = 8


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class EnumSpec:
    n: int
    k_forward: Fraction
    k_backward: Fraction

    def __post_init__(self):
        object.__setattr__(self, "k_forward", Fraction(self.k_forward))
        object.__setattr__(self, "k_backward", Fraction(self.k_backward))
        if self.n < 1:
            raise ValueError(f"n: must be at least 1, got {self.n}")
        if self.k_forward < 1:
            raise ValueError(f"k_forward: cap must be at least 1, got {self.k_forward}")
        if self.k_backward < 1:
            raise ValueError(f"k_backward: cap must be at least 1, got {self.k_backward}")


@dataclass(frozen=True)
class FiniteBijection:
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if sorted(self.values) != list(range(len(self.values))):
            raise ValueError("values: not a permutation of 0..n-1")

    @property
    def n(self) -> int:
        return len(self.values)

    def inverse(self) -> "FiniteBijection":
        inv = [0] * self.n
        for i, y in enumerate(self.values):
            inv[y] = i
        return FiniteBijection(tuple(inv))

    def to_json(self) -> dict:
        return {"n": self.n, "values": list(self.values)}


@dataclass
class SearchStats:
    nodes: int = 0
    pruned: dict = field(default_factory=lambda: dict.fromkeys(PRUNE_RULES, 0))

    def merge(self, other: "SearchStats") -> "SearchStats":
        return SearchStats(self.nodes + other.nodes,
                           {k: self.pruned[k] + other.pruned[k] for k in PRUNE_RULES})

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "pruned": dict(self.pruned)}


@dataclass
class EnumResult:
    count: int = 0
    violations: list = field(default_factory=list)
    stats: SearchStats = field(default_factory=SearchStats)

    def merge(self, other: "EnumResult") -> "EnumResult":
        return EnumResult(self.count + other.count, self.violations + other.violations,
                          self.stats.merge(other.stats))


def _search(n: int, K1: int, K2: int, prefix: tuple[int, ...], stats: SearchStats,
            stop_depth: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield complete maps extending ``prefix``, or prefixes of length
    ``stop_depth`` if that is reached first."""
    values = list(prefix) + [0] * (n - len(prefix))
    pos = [-1] * n
    free = (1 << n) - 1
    for i, y in enumerate(prefix):
        pos[y] = i
        free &= ~(1 << y)
    pruned = stats.pruned

    def rec(i: int, free: int):
        if i == n:
            stats.nodes += 1
            yield tuple(values)
            return
        if i == stop_depth:
            yield tuple(values[:i])
            return
        stats.nodes += 1
        j = i - K2 - 1
        if j >= 0:
            y0 = values[j]
            if (y0 > 0 and pos[y0 - 1] < 0) or (y0 < n - 1 and pos[y0 + 1] < 0):
                pruned["deadline"] += 1
                return
        if i == 0:
            lo, hi = 0, n - 1
        else:
            prev = values[i - 1]
            lo, hi = max(0, prev - K1), min(n - 1, prev + K1)
            window = ((1 << (hi + 1)) - 1) ^ ((1 << lo) - 1)
            pruned["forward"] += (free & ~window).bit_count()
        for y in range(lo, hi + 1):
            if not free >> y & 1:
                pruned["availability"] += 1
                continue
            if (y > 0 and pos[y - 1] >= 0 and i - pos[y - 1] > K2) or \
                    (y < n - 1 and pos[y + 1] >= 0 and i - pos[y + 1] > K2):
                pruned["backward"] += 1
                continue
            values[i] = y
            pos[y] = i
            yield from rec(i + 1, free & ~(1 << y))
            pos[y] = -1

    return rec(len(prefix), free)


def _caps(spec: EnumSpec) -> tuple[int, int]:
    # image and domain gaps are integers, so a rational cap acts as its floor
    return math.floor(spec.k_forward), math.floor(spec.k_backward)


def _prefixes(spec: EnumSpec) -> tuple[list[tuple[int, ...]], SearchStats]:
    stats = SearchStats()
    K1, K2 = _caps(spec)
    return list(_search(spec.n, K1, K2, (), stats, stop_depth=SPLIT_DEPTH)), stats


def _branch_maps(spec: EnumSpec, prefix: tuple[int, ...]) -> tuple[list[tuple[int, ...]], SearchStats]:
    stats = SearchStats()
    if len(prefix) == spec.n:
        return [prefix], stats
    K1, K2 = _caps(spec)
    return list(_search(spec.n, K1, K2, prefix, stats)), stats


def _branch_verify(spec: EnumSpec, prefix: tuple[int, ...]) -> EnumResult:
    maps, stats = _branch_maps(spec, prefix)
    violations = [FiniteBijection(v) for v in maps if not check_finite(v)[0]]
    return EnumResult(len(maps), violations, stats)


def _branch_count(spec: EnumSpec, prefix: tuple[int, ...]) -> EnumResult:
    maps, stats = _branch_maps(spec, prefix)
    return EnumResult(len(maps), [], stats)


def _run_branches(fn, spec: EnumSpec, prefixes, workers: int):
    if workers <= 1 or len(prefixes) <= 1:
        return [fn(spec, p) for p in prefixes]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, itertools.repeat(spec), prefixes))


def default_workers() -> int:
    return os.cpu_count() or 1


def enumerate_maps(spec: EnumSpec, visitor: Callable[[FiniteBijection], None] | None = None,
                   workers: int = 1) -> EnumResult:
    """Visit every permutation of ``[0, n)`` within both caps, in lexicographic order.

    With ``workers > 1`` prefixes are searched in separate processes and the
    visitor is still called serially, in the same order.
    """
    prefixes, stats = _prefixes(spec)
    result = EnumResult(0, [], stats)
    if visitor is None:
        for part in _run_branches(_branch_count, spec, prefixes, workers):
            result = result.merge(part)
        return result
    for maps, part_stats in _run_branches(_branch_maps, spec, prefixes, workers):
        for v in maps:
            visitor(FiniteBijection(v))
        result = result.merge(EnumResult(len(maps), [], part_stats))
    return result


def iter_maps(spec: EnumSpec) -> Iterator[tuple[int, ...]]:
    K1, K2 = _caps(spec)
    return _search(spec.n, K1, K2, (), SearchStats())


def _within(values, cap: Fraction) -> bool:
    # all pairs, straight from the definition of the Lipschitz constant
    num, den = cap.numerator, cap.denominator
    n = len(values)
    return all(abs(values[j] - values[i]) * den <= num * (j - i)
               for i in range(n) for j in range(i + 1, n))


def naive_count(spec: EnumSpec) -> int:
    """Count qualifying permutations by filtering all n! of them."""
    if spec.n > NAIVE_LIMIT:
        raise TooLarge(f"n: naive filter limited to n <= {NAIVE_LIMIT}, got {spec.n}")
    count = 0
    for perm in itertools.permutations(range(spec.n)):
        if not _within(perm, spec.k_forward):
            continue
        inv = [0] * spec.n
        for i, y in enumerate(perm):
            inv[y] = i
        if _within(inv, spec.k_backward):
            count += 1
    return count


def finite_profile(values) -> tuple[int, int]:
    """Exact (forward, backward) Lipschitz constants of a permutation of [0, n)."""
    n = len(values)
    if n < 2:
        return 1, 1
    inv = [0] * n
    for i, y in enumerate(values):
        inv[y] = i
    return (max(abs(b - a) for a, b in zip(values, values[1:])),
            max(abs(b - a) for a, b in zip(inv, inv[1:])))


def best_decomposition(values) -> tuple[int, int, int]:
    """(sigma, const, residual_sup) minimizing residual_sup; ties favour +1."""
    best = None
    for sigma in (1, -1):
        ds = [y - sigma * x for x, y in enumerate(values)]
        lo, hi = min(ds), max(ds)
        const = midrange_const(lo, hi)
        sup = max(hi - const, const - lo)
        if best is None or sup < best[2]:
            best = (sigma, const, sup)
    return best


def check_finite(values) -> tuple[bool, int, int]:
    """Return (conforms, residual_sup, C) for a permutation of [0, n)."""
    fwd, bwd = finite_profile(values)
    _, _, sup = best_decomposition(values)
    return sup <= fwd * bwd, sup, fwd * bwd


def verify_theorem_over(spec: EnumSpec, workers: int = 1) -> EnumResult:
    """Enumerate and check ``sup|r| <= ||f|| * ||f^-1||`` for every map,
    using each map's own constants rather than the caps."""
    prefixes, stats = _prefixes(spec)
    result = EnumResult(0, [], stats)
    for part in _run_branches(_branch_verify, spec, prefixes, workers):
        result = result.merge(part)
    return result
