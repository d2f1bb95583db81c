"""Exact discrete distributions, probability-tree enumeration and seeded sampling.

Probabilities are ``fractions.Fraction`` throughout, so certainty claims are
checked as ``== 1`` and ``== 0`` rather than against a tolerance.
"""

from __future__ import annotations

import math
import random
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Generic, TypeVar, Union

from .errors import InvalidDistribution, KernelGap

T = TypeVar("T", bound=Hashable)
S = TypeVar("S", bound=Hashable)

SEED_MAX = 2**64 - 1

RationalLike = Union[int, Fraction, str]


def as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact probabilities")
    return Fraction(value)


def format_fraction(value: Fraction) -> str:
    """Lossless ``"num/den"`` form; integers keep an explicit ``/1``."""
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Dist(Generic[T]):
    """Finite distribution as an ordered tuple of ``(outcome, weight)`` pairs.

    Entries may repeat an outcome (see :func:`merge`); weights must be
    non-negative and sum to exactly one.
    """

    entries: tuple[tuple[T, Fraction], ...]

    def __post_init__(self) -> None:
        entries = tuple((outcome, as_fraction(w)) for outcome, w in self.entries)
        if not entries:
            raise InvalidDistribution("distribution has no entries")
        for outcome, w in entries:
            if w < 0:
                raise InvalidDistribution(f"negative weight {w} on {outcome!r}")
        total = sum((w for _, w in entries), Fraction(0))
        if total != 1:
            raise InvalidDistribution(f"weights sum to {total}, not 1")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def point(cls, outcome: T) -> Dist[T]:
        return cls(((outcome, Fraction(1)),))

    @classmethod
    def uniform(cls, outcomes: Iterable[T]) -> Dist[T]:
        """Each listed item gets weight 1/n; repeated items are *not* merged."""
        items = list(outcomes)
        if not items:
            raise InvalidDistribution("uniform over an empty collection")
        w = Fraction(1, len(items))
        return cls(tuple((o, w) for o in items))

    def __iter__(self) -> Iterator[tuple[T, Fraction]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def prob(self, outcome: T) -> Fraction:
        return sum((w for o, w in self.entries if o == outcome), Fraction(0))

    def support(self) -> list[T]:
        return [o for o, w in merge(self).entries]

    def as_dict(self) -> dict[T, Fraction]:
        return dict(merge(self).entries)

    def map(self, f: Callable[[T], S]) -> Dist[S]:
        return merge(Dist(tuple((f(o), w) for o, w in self.entries)))


def merge(dist: Dist[T]) -> Dist[T]:
    """Collapse repeated outcomes by adding their weights.

    First-occurrence order is kept and zero-weight outcomes are dropped.
    """
    acc: dict[T, Fraction] = {}
    for outcome, w in dist.entries:
        if w < 0:
            raise InvalidDistribution(f"negative weight {w} on {outcome!r}")
        acc[outcome] = acc.get(outcome, Fraction(0)) + w
    return Dist(tuple((o, w) for o, w in acc.items() if w != 0))


Kernel = Union[Mapping[S, Dist[T]], Callable[[S], Dist[T]]]


def _apply_kernel(kernel: Kernel, outcome: S) -> Dist[T]:
    if isinstance(kernel, Mapping):
        try:
            result = kernel[outcome]
        except KeyError:
            raise KernelGap(f"kernel undefined on {outcome!r}") from None
    else:
        result = kernel(outcome)
    if result is None:
        raise KernelGap(f"kernel undefined on {outcome!r}")
    return result


def chain(prior: Dist[S], kernel: Kernel) -> Dist[T]:
    """Law of total probability: weight(t) = sum_s prior(s) * kernel(s)(t)."""
    out: list[tuple[T, Fraction]] = []
    for s, ws in prior.entries:
        if ws == 0:
            continue
        for t, wt in _apply_kernel(kernel, s).entries:
            out.append((t, ws * wt))
    return merge(Dist(tuple(out)))


Step = Callable[[S], Dist[tuple[str, S]]]


def enumerate_branches(
    initial: Dist[S], steps: Sequence[Step]
) -> Dist[tuple[tuple[str, ...], S]]:
    """Run a sequence of labelled transitions over every branch.

    Each step maps a state to a distribution over ``(label, next_state)``.
    The result is a distribution over ``(labels_so_far, state)``.
    """
    current: Dist = initial.map(lambda s: ((), s))
    for step in steps:
        def kernel(branch, step=step):
            labels, state = branch
            return step(state).map(lambda ls: (labels + (ls[0],), ls[1]))

        current = chain(current, kernel)
    return current


class RandomSource:
    """Seeded, single-owner random stream.

    Backed by the stdlib Mersenne Twister, whose integer seeding and
    ``randrange`` are platform independent. Parallel runs should use
    :meth:`spawn` rather than sharing one source.
    """

    def __init__(self, seed: int = 0):
        if not isinstance(seed, int) or not 0 <= seed <= SEED_MAX:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
        self.seed = seed
        self._rng = random.Random(seed)

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed})"

    def randrange(self, n: int) -> int:
        """Uniform integer in ``[0, n)``; each value has probability exactly 1/n."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        return self._rng.randrange(n)

    def random(self) -> float:
        return self._rng.random()

    def bernoulli(self, p: Fraction) -> bool:
        """Exact rational coin: true with probability exactly ``p``."""
        p = as_fraction(p)
        if not 0 <= p <= 1:
            raise InvalidDistribution(f"bernoulli parameter {p} outside [0, 1]")
        return self.randrange(p.denominator) < p.numerator

    def spawn(self, index: int) -> RandomSource:
        return RandomSource((self.seed + index) % (SEED_MAX + 1))


def sample(dist: Dist[T], rng: RandomSource) -> T:
    """Draw one outcome with exactly the stated rational probabilities.

    A single integer is drawn uniformly below the common denominator and
    located on the cumulative weights, so no float rounding is involved.
    """
    if not isinstance(dist, Dist) or not dist.entries:
        raise InvalidDistribution("cannot sample an empty distribution")
    denom = math.lcm(*(w.denominator for _, w in dist.entries))
    k = rng.randrange(denom)
    acc = 0
    for outcome, w in dist.entries:
        acc += w.numerator * (denom // w.denominator)
        if k < acc:
            return outcome
    raise InvalidDistribution("cumulative weights did not cover the draw")  # unreachable for valid Dist
