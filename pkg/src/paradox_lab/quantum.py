"""Pre- and post-selected measurements on a finite basis, in exact arithmetic.

States are kept unnormalized with Gaussian-rational components. Every
probability is a ratio of squared norms, so a state like (1, 1, 1) stands for
the normalized ray (1, 1, 1)/sqrt(3) without ever leaving the rationals.
Measurements are partitions of the basis labels (projectors onto spans of
basis vectors), and collapse is Lüders projection onto the observed cell.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import BasisMismatch, DegenerateConditioning, ValidationError
from .probability import Dist, RandomSource, enumerate_branches, merge, sample
from .report import ScenarioReport


@dataclass(frozen=True)
class GaussRational:
    """Complex number with rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value: ScalarLike) -> GaussRational:
        if isinstance(value, GaussRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(Fraction(value))

    def __add__(self, other: ScalarLike) -> GaussRational:
        o = GaussRational.coerce(other)
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> GaussRational:
        return GaussRational(-self.re, -self.im)

    def __sub__(self, other: ScalarLike) -> GaussRational:
        return self + (-GaussRational.coerce(other))

    def __mul__(self, other: ScalarLike) -> GaussRational:
        o = GaussRational.coerce(other)
        return GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        try:
            o = GaussRational.coerce(other)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> GaussRational:
        return GaussRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        if not self.im:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


ScalarLike = Union[GaussRational, int, Fraction, str, complex]


def default_basis(n: int) -> tuple[str, ...]:
    return tuple(f"p{j}" for j in range(1, n + 1))


@dataclass(frozen=True)
class AmplitudeVector:
    basis: tuple[str, ...]
    amplitudes: tuple[GaussRational, ...]

    def __post_init__(self) -> None:
        basis = tuple(self.basis)
        amps = tuple(GaussRational.coerce(a) for a in self.amplitudes)
        if len(set(basis)) != len(basis):
            raise ValidationError(f"basis labels must be distinct: {basis}")
        if len(amps) != len(basis):
            raise ValidationError(f"{len(amps)} amplitudes for a basis of size {len(basis)}")
        if not any(amps):
            raise ValidationError("the zero vector is not a state")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def of(cls, *amplitudes: ScalarLike, basis: Sequence[str] | None = None) -> AmplitudeVector:
        return cls(tuple(basis) if basis is not None else default_basis(len(amplitudes)), amplitudes)

    @classmethod
    def basis_state(cls, label: str, basis: Sequence[str]) -> AmplitudeVector:
        return cls(tuple(basis), tuple(1 if b == label else 0 for b in basis))

    def __getitem__(self, label: str) -> GaussRational:
        return self.amplitudes[self.basis.index(label)]

    def norm2(self) -> Fraction:
        return sum((a.abs2() for a in self.amplitudes), Fraction(0))

    def scaled(self, factor: ScalarLike) -> AmplitudeVector:
        return AmplitudeVector(self.basis, tuple(a * factor for a in self.amplitudes))

    def restricted(self, labels: Iterable[str]) -> AmplitudeVector:
        """Componentwise restriction (projection onto the span of ``labels``)."""
        keep = set(labels)
        return AmplitudeVector(
            self.basis, tuple(a if b in keep else GaussRational() for b, a in zip(self.basis, self.amplitudes))
        )

    def __repr__(self) -> str:
        return f"AmplitudeVector({dict(zip(self.basis, self.amplitudes))})"


def _check_basis(u: AmplitudeVector, v: AmplitudeVector) -> None:
    if u.basis != v.basis:
        raise BasisMismatch(f"basis {u.basis} differs from {v.basis}")


def inner_product(u: AmplitudeVector, v: AmplitudeVector) -> GaussRational:
    """<u|v> = sum_j conj(u_j) v_j."""
    _check_basis(u, v)
    total = GaussRational()
    for a, b in zip(u.amplitudes, v.amplitudes):
        total = total + a.conjugate() * b
    return total


@dataclass(frozen=True)
class Measurement:
    """Partition of basis labels into labelled cells (one projector per cell)."""

    cells: tuple[frozenset[str], ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        cells = tuple(frozenset(c) for c in self.cells)
        labels = tuple(self.labels) or tuple("+".join(sorted(c)) for c in cells)
        if not cells:
            raise ValidationError("measurement needs at least one cell")
        if any(not c for c in cells):
            raise ValidationError("measurement cells must be nonempty")
        seen: set[str] = set()
        for c in cells:
            if seen & c:
                raise ValidationError(f"cells overlap on {sorted(seen & c)}")
            seen |= c
        if len(labels) != len(cells) or len(set(labels)) != len(labels):
            raise ValidationError(f"need one distinct label per cell, got {labels}")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def open_box(cls, label: str, basis: Sequence[str]) -> Measurement:
        """Binary test 'is the particle in ``label``?' with outcomes found / not_found."""
        if label not in basis:
            raise ValidationError(f"no box {label!r} in basis {tuple(basis)}")
        rest = frozenset(basis) - {label}
        if not rest:
            return cls((frozenset({label}),), ("found",))
        return cls((frozenset({label}), rest), ("found", "not_found"))

    @classmethod
    def fine(cls, basis: Sequence[str]) -> Measurement:
        return cls(tuple(frozenset({b}) for b in basis), tuple(basis))

    def check(self, basis: Sequence[str]) -> None:
        covered = frozenset().union(*self.cells)
        if covered != frozenset(basis):
            raise BasisMismatch(f"cells cover {sorted(covered)}, basis is {sorted(basis)}")

    def items(self) -> Iterable[tuple[str, frozenset[str]]]:
        return zip(self.labels, self.cells)


def measure(state: AmplitudeVector, m: Measurement) -> Dist[tuple[str, AmplitudeVector]]:
    """Lüders measurement: outcome C with probability |P_C psi|^2 / |psi|^2.

    The collapsed state is left unnormalized; zero-probability cells are omitted.
    """
    m.check(state.basis)
    total = state.norm2()
    out = []
    for label, cell in m.items():
        projected = [a for b, a in zip(state.basis, state.amplitudes) if b in cell]
        weight = sum((a.abs2() for a in projected), Fraction(0))
        if weight:
            out.append(((label, state.restricted(cell)), weight / total))
    return Dist(tuple(out))


def post_select_probability(state: AmplitudeVector, filter: AmplitudeVector) -> Fraction:
    """|<filter|state>|^2 / (|filter|^2 |state|^2)."""
    overlap = inner_product(filter, state)
    return overlap.abs2() / (filter.norm2() * state.norm2())


@dataclass(frozen=True)
class PpsExperiment:
    """Prepare ``pre``, apply ``stages`` in order, then filter on ``post``."""

    pre: AmplitudeVector
    stages: tuple[Measurement, ...]
    post: AmplitudeVector

    def __post_init__(self) -> None:
        object.__setattr__(self, "stages", tuple(self.stages))
        _check_basis(self.pre, self.post)
        for m in self.stages:
            m.check(self.pre.basis)

    @property
    def basis(self) -> tuple[str, ...]:
        return self.pre.basis


def pps_branches(exp: PpsExperiment) -> Dist[tuple[tuple[str, ...], AmplitudeVector]]:
    steps = [lambda s, m=m: measure(s, m) for m in exp.stages]
    return enumerate_branches(Dist.point(exp.pre), steps)


def run_pps(exp: PpsExperiment, name: str = "quantum", metadata: dict | None = None) -> ScenarioReport:
    """Exact joint law of (stage outcomes, pass) with conditionals given pass.

    ``report.conditional(...)`` raises ``DegenerateConditioning`` when the
    post-selection cannot succeed.
    """
    return ScenarioReport.from_branches(
        "quantum",
        name,
        pps_branches(exp),
        lambda state: post_select_probability(state, exp.post),
        metadata,
    )


def abl_probabilities(pre: AmplitudeVector, post: AmplitudeVector, m: Measurement) -> Dist[str]:
    """Two-time retrodiction: P(C) proportional to |<post|P_C|pre>|^2."""
    _check_basis(pre, post)
    m.check(pre.basis)
    weights = []
    for label, cell in m.items():
        amp = GaussRational()
        for b, u, v in zip(pre.basis, post.amplitudes, pre.amplitudes):
            if b in cell:
                amp = amp + u.conjugate() * v
        weights.append((label, amp.abs2()))
    total = sum((w for _, w in weights), Fraction(0))
    if total == 0:
        raise DegenerateConditioning("pre- and post-selection are incompatible with every outcome")
    return merge(Dist(tuple((label, w / total) for label, w in weights)))


@lru_cache(maxsize=4096)
def _cached_measure(state: AmplitudeVector, m: Measurement) -> Dist[tuple[str, AmplitudeVector]]:
    return measure(state, m)


@lru_cache(maxsize=4096)
def _cached_pass(state: AmplitudeVector, post: AmplitudeVector) -> Fraction:
    return post_select_probability(state, post)


def sample_pps_run(exp: PpsExperiment, rng: RandomSource) -> tuple[tuple[str, ...], bool]:
    """One simulated run: sampled stage outcomes and whether the filter passed."""
    state = exp.pre
    labels = []
    for m in exp.stages:
        label, state = sample(_cached_measure(state, m), rng)
        labels.append(label)
    return tuple(labels), rng.bernoulli(_cached_pass(state, exp.post))


THREE_BOX_PRE = AmplitudeVector.of(1, 1, 1)
THREE_BOX_POST = AmplitudeVector.of(1, 1, -1)


def three_box(box: str | None = "p1") -> PpsExperiment:
    """The standard three-box setup, opening ``box`` (or nothing) in between."""
    stages = () if box is None else (Measurement.open_box(box, THREE_BOX_PRE.basis),)
    return PpsExperiment(THREE_BOX_PRE, stages, THREE_BOX_POST)
