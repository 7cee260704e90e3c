import csv
import itertools
from fractions import Fraction
from pathlib import Path

import pytest

from lipz.enumerator import (
    EnumSpec,
    FiniteBijection,
    TooLarge,
    best_decomposition,
    check_finite,
    enumerate_maps,
    finite_profile,
    iter_maps,
    naive_count,
    verify_theorem_over,
)
from lipz.zline import parse_rational

from mapgen import bruteforce_lipschitz

GOLDEN = Path(__file__).parent / "golden" / "counts.csv"
CAPS = [Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]


def golden_rows():
    with open(GOLDEN) as fh:
        for row in csv.DictReader(fh):
            yield int(row["n"]), parse_rational(row["k_forward"]), parse_rational(row["k_backward"]), int(row["count"])


def collect(spec, workers=1):
    seen = []
    res = enumerate_maps(spec, seen.append, workers=workers)
    return res, [b.values for b in seen]


@pytest.mark.parametrize("n, k, count", [(1, 1, 1), (1, 3, 1), (3, 1, 2), (3, 2, 6)])
def test_enumerate_examples(n, k, count):
    assert enumerate_maps(EnumSpec(n, k, k)).count == count


def test_enumerate_small_maps_explicitly():
    _, maps = collect(EnumSpec(3, 1, 1))
    assert maps == [(0, 1, 2), (2, 1, 0)]
    _, maps = collect(EnumSpec(3, 2, 2))
    assert maps == sorted(itertools.permutations(range(3)))


@pytest.mark.parametrize("n, k, count", [(2, 1, 2), (4, 1, 2), (3, 2, 6)])
def test_naive_count_examples(n, k, count):
    assert naive_count(EnumSpec(n, k, k)) == count


def test_naive_guard():
    with pytest.raises(TooLarge):
        naive_count(EnumSpec(9, 2, 2))


def test_spec_validation():
    with pytest.raises(ValueError, match="k_forward"):
        EnumSpec(3, Fraction(1, 2), 1)
    with pytest.raises(ValueError, match="^n"):
        EnumSpec(0, 1, 1)


@pytest.mark.parametrize("n, k1, k2, count", list(golden_rows()))
def test_golden_counts(n, k1, k2, count):
    assert enumerate_maps(EnumSpec(n, k1, k2)).count == count


def test_lexicographic_and_within_caps():
    spec = EnumSpec(6, Fraction(3, 2), 3)
    _, maps = collect(spec)
    assert maps == sorted(maps) and len(set(maps)) == len(maps)
    for v in maps:
        fwd, _ = bruteforce_lipschitz(v)
        inv = FiniteBijection(v).inverse().values
        assert fwd <= spec.k_forward and bruteforce_lipschitz(inv)[0] <= spec.k_backward


@pytest.mark.parametrize("n", [4, 6, 7])
@pytest.mark.parametrize("k1, k2", [(1, 2), (Fraction(3, 2), 3), (2, 3)])
def test_closed_under_inverse_and_reflection(n, k1, k2):
    maps = set(iter_maps(EnumSpec(n, k1, k2)))
    swapped = set(iter_maps(EnumSpec(n, k2, k1)))
    assert {FiniteBijection(v).inverse().values for v in maps} == swapped
    conj = {tuple(n - 1 - v[n - 1 - i] for i in range(n)) for v in maps}
    assert conj == maps
    assert len(maps) == len(swapped)


def test_parallel_matches_sequential():
    spec = EnumSpec(7, 2, 3)
    seq, seq_maps = collect(spec, workers=1)
    par, par_maps = collect(spec, workers=3)
    assert seq_maps == par_maps
    assert seq.count == par.count and seq.stats == par.stats


def test_stats_count_prunes():
    res = enumerate_maps(EnumSpec(8, 2, 2))
    assert res.stats.nodes > res.count
    assert res.stats.pruned["forward"] > 0 and res.stats.pruned["availability"] > 0


def test_finite_profile_matches_all_pairs():
    for v in itertools.permutations(range(6)):
        inv = FiniteBijection(v).inverse().values
        assert finite_profile(v) == (bruteforce_lipschitz(v)[0], bruteforce_lipschitz(inv)[0])


def test_best_decomposition_picks_orientation():
    assert best_decomposition((0, 1, 2)) == (1, 0, 0)
    assert best_decomposition((2, 1, 0)) == (-1, 2, 0)
    # 1,2,0: d = 1,1,-2 for +1 (sup 2) and 1,3,2 for -1 (sup 1)
    assert best_decomposition((1, 2, 0)) == (-1, 2, 1)


def test_verify_examples():
    res = verify_theorem_over(EnumSpec(3, 2, 2))
    assert (res.count, res.violations) == (6, [])
    res = verify_theorem_over(EnumSpec(1, 1, 1))
    assert (res.count, res.violations) == (1, [])
    res = verify_theorem_over(EnumSpec(5, 1, 1))
    assert (res.count, res.violations) == (2, [])
    _, maps = collect(EnumSpec(5, 1, 1))
    assert [check_finite(v)[1] for v in maps] == [0, 0]


def test_verify_uses_actual_constants():
    # (1, 0, 2): constants 2 and 2, residual sup 1
    assert check_finite((1, 0, 2)) == (True, 1, 4)
