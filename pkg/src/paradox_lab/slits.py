"""Three-slit Young apparatus equivalent to the three-box experiment.

Slits 1 and 2 sit at +/- a off-axis, slit 3 on-axis; the detector D is on-axis
at distance L from slit 3. With L chosen so that the outer paths are half a
wavelength longer than the middle one, the two-slit pair {2, 3} (or {1, 3})
interferes destructively at D. A which-path detector at slit 1 or 2 is ideal
and fully decohering.

This is the only floating-point engine. Zero claims here are tolerance claims;
the exact counterpart lives in :mod:`paradox_lab.quantum` via
:func:`map_to_threebox`.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .errors import GeometryViolation, UnsupportedDetectorPosition, ValidationError
from .probability import RandomSource
from .quantum import AmplitudeVector
from .report import ScenarioReport

MIN_SEPARATION_RATIO = 100.0
GEOMETRY_TOL = 1e-9
SLITS = (1, 2, 3)
# the source illuminates all three slits equally: the (1, 1, 1) state
SOURCE_WEIGHTS = {1: 1.0, 2: 1.0, 3: 1.0}


@dataclass(frozen=True)
class SlitGeometry:
    a: float
    wavelength: float
    L: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.wavelength > 0):
            raise GeometryViolation("slit separation and wavelength must be positive")
        if self.a / self.wavelength < MIN_SEPARATION_RATIO:
            raise GeometryViolation(
                f"a/lambda = {self.a / self.wavelength:g} < {MIN_SEPARATION_RATIO:g}"
            )
        if not self.L > 0:
            raise GeometryViolation(f"detector distance must be positive, got {self.L!r}")

    @classmethod
    def solved(cls, a: float, wavelength: float) -> SlitGeometry:
        return cls(a, wavelength, solve_detector_distance(a, wavelength))

    def path_excess(self) -> float:
        """sqrt(L^2 + a^2) - L, computed without cancellation."""
        return self.a * self.a / (math.hypot(self.L, self.a) + self.L)

    def residual(self) -> float:
        """Signed miss of the half-wave condition, in units of the wavelength."""
        return (self.path_excess() - self.wavelength / 2) / self.wavelength

    def phase_turns(self, slit: int) -> float:
        """Path phase of ``slit`` at D, in turns, reduced modulo 1."""
        base = math.fmod(self.L / self.wavelength, 1.0)
        if slit == 3:
            return base
        return math.fmod(base + self.path_excess() / self.wavelength, 1.0)


def solve_detector_distance(a: float, wavelength: float) -> float:
    """L with sqrt(L^2 + a^2) - L = wavelength / 2, i.e. L = a^2/lambda - lambda/4."""
    if not (a > 0 and wavelength > 0) or a / wavelength < MIN_SEPARATION_RATIO:
        raise GeometryViolation(f"need a >> lambda (ratio >= {MIN_SEPARATION_RATIO:g})")
    L = a * a / wavelength - wavelength / 4
    if abs(SlitGeometry(a, wavelength, L).residual()) > GEOMETRY_TOL:
        raise GeometryViolation("closed-form distance misses the half-wave condition")
    return L


@dataclass(frozen=True)
class PathSetup:
    open_slits: frozenset[int]
    weights: Mapping[int, complex] = field(default_factory=dict)
    which_path_detector: int | None = None

    def __post_init__(self) -> None:
        slits = frozenset(self.open_slits)
        if not slits or not slits <= set(SLITS):
            raise ValidationError(f"open slits must be a nonempty subset of {SLITS}")
        weights = {j: complex(self.weights.get(j, 1.0)) for j in sorted(slits)}
        if any(w == 0 for w in weights.values()):
            raise ValidationError("open slits need nonzero weights")
        object.__setattr__(self, "open_slits", slits)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def of(cls, slits: Iterable[int], **kw) -> PathSetup:
        return cls(frozenset(slits), **kw)


def amplitude_at_D(geometry: SlitGeometry, setup: PathSetup) -> complex:
    """sum_j w_j exp(2 pi i r_j / lambda) over open slits (unit weights by default)."""
    return sum(
        (setup.weights[j] * cmath.exp(2j * math.pi * geometry.phase_turns(j)) for j in sorted(setup.open_slits)),
        0j,
    )


def detection_probability(geometry: SlitGeometry, weights: Mapping[int, complex]) -> float:
    """Chance that D fires for a particle in the path state ``weights``.

    Normalized like a post-selection filter: |A|^2 / (3 * sum |w_j|^2), where
    A is the amplitude at D and 3 is the squared norm of D's phase ray. Rates
    are thus in units of the single-slit amplitude.
    """
    setup = PathSetup(frozenset(j for j, w in weights.items() if w != 0), weights)
    norm2 = sum(abs(w) ** 2 for w in setup.weights.values())
    return abs(amplitude_at_D(geometry, setup)) ** 2 / (len(SLITS) * norm2)


@dataclass(frozen=True)
class CoincidenceResult:
    detector: int | None
    branch_probabilities: dict[str, float]
    p_D_and_fired: float
    p_D_and_silent: float

    @property
    def p_D(self) -> float:
        return self.p_D_and_fired + self.p_D_and_silent

    @property
    def coincident_fraction(self) -> float:
        return self.p_D_and_fired / self.p_D


def _branches(detector: int | None) -> list[tuple[str, float, dict[int, float]]]:
    if detector is None:
        return [("", 1.0, dict(SOURCE_WEIGHTS))]
    if detector == 3:
        raise UnsupportedDetectorPosition("a which-path detector at slit 3 is not modeled")
    if detector not in (1, 2):
        raise ValidationError(f"detector must sit at slit 1 or 2, got {detector!r}")
    total = sum(abs(w) ** 2 for w in SOURCE_WEIGHTS.values())
    fired = {detector: SOURCE_WEIGHTS[detector]}
    silent = {j: w for j, w in SOURCE_WEIGHTS.items() if j != detector}
    return [
        ("d_fires", abs(SOURCE_WEIGHTS[detector]) ** 2 / total, fired),
        ("d_silent", sum(abs(w) ** 2 for w in silent.values()) / total, silent),
    ]


def coincidence_experiment(geometry: SlitGeometry, d_at: int | None) -> CoincidenceResult:
    """Decohere the (1,1,1) source at slit ``d_at`` and compute D statistics."""
    branches = _branches(d_at)
    probs = {label or "no_detector": p for label, p, _ in branches}
    rates = {label: p * detection_probability(geometry, w) for label, p, w in branches}
    if d_at is None:
        return CoincidenceResult(None, probs, 0.0, rates[""])
    return CoincidenceResult(d_at, probs, rates["d_fires"], rates["d_silent"])


def run_slit(
    geometry: SlitGeometry, d_at: int | None, name: str = "slit", metadata: dict | None = None
) -> ScenarioReport:
    """Float report: outcome is the which-path branch, pass is a click at D."""
    joint = {}
    for label, p, w in _branches(d_at):
        q = detection_probability(geometry, w)
        labels = (label,) if label else ()
        joint[(labels, True)] = p * q
        joint[(labels, False)] = p * (1 - q)
    return ScenarioReport.from_joint("slit", name, joint, exact=False, metadata=metadata)


def sample_slit_run(
    geometry: SlitGeometry, d_at: int | None, rng: RandomSource
) -> tuple[tuple[str, ...], bool]:
    branches = _branches(d_at)
    u = rng.random()
    acc = 0.0
    label, weights = branches[-1][0], branches[-1][2]
    for lab, p, w in branches:
        acc += p
        if u < acc:
            label, weights = lab, w
            break
    passed = rng.random() < detection_probability(geometry, weights)
    return ((label,) if label else ()), passed


def phase_ray(geometry: SlitGeometry) -> tuple[complex, complex, complex]:
    """D's filter ray in the slit basis, normalized so slit 3 carries -1.

    D registers sum_j exp(i theta_j) s_j, i.e. <phi|s> with phi_j = exp(-i theta_j).
    """
    phi = [cmath.exp(-2j * math.pi * geometry.phase_turns(j)) for j in SLITS]
    ref = -1 / phi[2]
    return tuple(p * ref for p in phi)  # type: ignore[return-value]


def map_to_threebox(geometry: SlitGeometry) -> AmplitudeVector:
    """Exact post-selection state equivalent to detector D.

    Raises ``GeometryViolation`` unless D's phase ray equals (1, 1, -1) up to
    global phase within 1e-9 per component.
    """
    target = (1, 1, -1)
    ray = phase_ray(geometry)
    miss = max(abs(r - t) for r, t in zip(ray, target))
    if miss > GEOMETRY_TOL:
        raise GeometryViolation(f"D's phase ray misses (1, 1, -1) by {miss:.3g}")
    return AmplitudeVector.of(*target)
