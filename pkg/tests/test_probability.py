import math
import subprocess
import sys
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paradox_lab.errors import InvalidDistribution, KernelGap
from paradox_lab.probability import (
    Dist,
    RandomSource,
    chain,
    enumerate_branches,
    format_fraction,
    merge,
    sample,
)
from oracles import binomial_bound


def test_merge_adds_repeated_outcomes():
    d = Dist((("a", F(1, 2)), ("a", F(1, 4)), ("b", F(1, 4))))
    assert merge(d).entries == (("a", F(3, 4)), ("b", F(1, 4)))


def test_merge_identity_cases():
    assert merge(Dist.point("a")).entries == (("a", F(1)),)
    third = Dist((("a", F(1, 3)), ("b", F(1, 3)), ("c", F(1, 3))))
    assert merge(third) == third


def test_negative_weight_rejected():
    with pytest.raises(InvalidDistribution):
        Dist((("a", F(3, 2)), ("b", F(-1, 2))))


def test_weights_must_sum_to_one_exactly():
    with pytest.raises(InvalidDistribution):
        Dist((("a", F(1, 3)), ("b", F(1, 3))))
    with pytest.raises(InvalidDistribution):
        Dist(())


def test_floats_rejected():
    with pytest.raises(TypeError):
        Dist((("a", 0.5), ("b", 0.5)))


def test_chain_deterministic_and_collapse():
    assert chain(Dist.point("s"), lambda s: Dist.point("t")).entries == (("t", F(1)),)
    prior = Dist((("s1", F(1, 4)), ("s2", F(3, 4))))
    assert chain(prior, lambda s: Dist.point("t")).entries == (("t", F(1)),)


def test_chain_mapping_kernel_gap():
    prior = Dist((("s1", F(1, 2)), ("s2", F(1, 2))))
    with pytest.raises(KernelGap):
        chain(prior, {"s1": Dist.point("t")})
    with pytest.raises(KernelGap):
        chain(prior, lambda s: None)


def test_chain_total_probability():
    prior = Dist((("x", F(1, 3)), ("y", F(2, 3))))
    kernel = {
        "x": Dist((("u", F(1, 2)), ("v", F(1, 2)))),
        "y": Dist((("u", F(1, 4)), ("w", F(3, 4)))),
    }
    out = chain(prior, kernel).as_dict()
    assert out == {"u": F(1, 6) + F(1, 6), "v": F(1, 6), "w": F(1, 2)}


def test_enumerate_branches_tracks_labels():
    coin = lambda s: Dist(((("h", s + 1), F(1, 2)), (("t", s), F(1, 2))))
    d = enumerate_branches(Dist.point(0), [coin, coin])
    assert d.as_dict() == {
        (("h", "h"), 2): F(1, 4),
        (("h", "t"), 1): F(1, 4),
        (("t", "h"), 1): F(1, 4),
        (("t", "t"), 0): F(1, 4),
    }


weights = st.lists(st.integers(min_value=0, max_value=6), min_size=1, max_size=6).filter(any)


def _dist_from(ws, labels="abcdef"):
    total = sum(ws)
    return Dist(tuple((labels[i % 3], F(w, total)) for i, w in enumerate(ws)))


@given(weights)
def test_merge_preserves_total_and_distinctness(ws):
    m = merge(_dist_from(ws))
    assert sum(w for _, w in m) == 1
    outcomes = [o for o, _ in m]
    assert len(outcomes) == len(set(outcomes))


@given(weights, weights, weights)
def test_chain_is_associative(w0, w1, w2):
    d = _dist_from(w0)
    k1 = lambda s: _dist_from(w1 if s != "b" else list(reversed(w1)), "xyz")
    k2 = lambda s: _dist_from(w2 if s == "x" else w2[::-1], "pqr")
    left = chain(chain(d, k1), k2)
    right = chain(d, lambda s: chain(k1(s), k2))
    assert left.as_dict() == right.as_dict()


def test_sample_certain_event():
    for seed in (0, 1, 2**64 - 1):
        assert sample(Dist.point("a"), RandomSource(seed)) == "a"


def test_sample_rejects_non_distribution():
    with pytest.raises(InvalidDistribution):
        sample([], RandomSource(0))


def test_seed_bounds():
    with pytest.raises(ValueError):
        RandomSource(-1)
    with pytest.raises(ValueError):
        RandomSource(2**64)


@settings(max_examples=25)
@given(st.integers(min_value=0, max_value=2**64 - 1))
def test_equal_seeds_reproduce_draws(seed):
    d = Dist((("a", F(1, 8)), ("b", F(5, 8)), ("c", F(1, 4))))
    r1, r2 = RandomSource(seed), RandomSource(seed)
    assert [sample(d, r1) for _ in range(50)] == [sample(d, r2) for _ in range(50)]


def test_seed_42_same_across_processes():
    code = (
        "from fractions import Fraction as F;"
        "from paradox_lab.probability import Dist, RandomSource, sample;"
        "d = Dist((('a', F(1, 8)), ('b', F(7, 8))));"
        "r = RandomSource(42);"
        "print(''.join(sample(d, r) for _ in range(64)))"
    )
    runs = {subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True).stdout for _ in range(2)}
    assert len(runs) == 1
    r = RandomSource(42)
    d = Dist((("a", F(1, 8)), ("b", F(7, 8))))
    assert runs.pop().strip() == "".join(sample(d, r) for _ in range(64))


def test_sample_frequency_binomial_bound():
    n = 100_000
    d = Dist((("a", F(1, 8)), ("b", F(7, 8))))
    rng = RandomSource(0)
    hits = sum(sample(d, rng) == "a" for _ in range(n))
    assert abs(hits / n - 1 / 8) <= binomial_bound(1 / 8, n)


def test_randrange_uniform_over_multiset_indices():
    # every index of a 6-card pile is drawn; chi-square style sanity at 4 sigma per cell
    rng = RandomSource(3)
    n = 60_000
    counts = [0] * 6
    for _ in range(n):
        counts[rng.randrange(6)] += 1
    for c in counts:
        assert abs(c / n - 1 / 6) <= binomial_bound(1 / 6, n)


def test_bernoulli_is_exact_rational_coin():
    rng = RandomSource(5)
    assert not any(rng.bernoulli(F(0)) for _ in range(1000))
    assert all(rng.bernoulli(F(1)) for _ in range(1000))
    with pytest.raises(InvalidDistribution):
        rng.bernoulli(F(3, 2))


def test_spawn_offsets_seed():
    assert RandomSource(7).spawn(3).seed == 10
    assert RandomSource(2**64 - 1).spawn(1).seed == 0


def test_format_fraction_is_lossless():
    assert format_fraction(F(1, 27)) == "1/27"
    assert format_fraction(F(1)) == "1/1"
    assert format_fraction(F(0)) == "0/1"
    assert math.isclose(float(F(format_fraction(F(22, 7)))), 22 / 7)
