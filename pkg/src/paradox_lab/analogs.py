"""Contrast systems: the ad hoc three-box game and the Leifer-Spekkens box.

In the ad hoc game an agent moves the ball into box 3 whenever the opened box
is empty, and post-selection keeps only runs with the ball outside box 3. The
Leifer-Spekkens box holds a ball with a definite (x, y) position that can be
read disturbingly (shake), non-disturbingly (tilt) or directly (X-ray).
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import UnsupportedOpening, ValidationError
from .probability import Dist, RandomSource, enumerate_branches, sample
from .report import ScenarioReport

BOXES = (1, 2, 3)
X_VALUES = ("Left", "Right")
Y_VALUES = ("Front", "Rear")


@dataclass(frozen=True)
class AdHocState:
    ball: int

    def __post_init__(self) -> None:
        if self.ball not in BOXES:
            raise ValidationError(f"ball must be in box 1, 2 or 3, got {self.ball!r}")


def adhoc_open(state: AdHocState, box: int) -> tuple[bool, Dist[AdHocState]]:
    """Open ``box``; an empty box makes the agent put the ball in box 3."""
    if box not in (1, 2):
        raise UnsupportedOpening(f"only boxes 1 and 2 can be opened, got {box!r}")
    if state.ball == box:
        return True, Dist.point(state)
    return False, Dist.point(AdHocState(3))


def adhoc_post(state: AdHocState) -> bool:
    return state.ball != 3


@lru_cache(maxsize=None)
def adhoc_initial(start: int | None = None) -> Dist[AdHocState]:
    """Pinned start, or uniform over the three boxes."""
    if start is None:
        return Dist.uniform([AdHocState(b) for b in BOXES])
    return Dist.point(AdHocState(start))


def _adhoc_step(box: int):
    def step(state: AdHocState) -> Dist[tuple[str, AdHocState]]:
        found, after = adhoc_open(state, box)
        label = "found" if found else "not_found"
        return after.map(lambda s: (label, s))

    return step


def run_adhoc(
    box: int = 1, start: int | None = None, name: str = "adhoc", metadata: dict | None = None
) -> ScenarioReport:
    if box not in (1, 2):
        raise UnsupportedOpening(f"only boxes 1 and 2 can be opened, got {box!r}")
    branches = enumerate_branches(adhoc_initial(start), [_adhoc_step(box)])
    return ScenarioReport.from_branches(
        "adhoc", name, branches, lambda s: Fraction(int(adhoc_post(s))), metadata
    )


def sample_adhoc_run(box: int, start: int | None, rng: RandomSource) -> tuple[tuple[str, ...], bool]:
    state = sample(adhoc_initial(start), rng)
    found, after = adhoc_open(state, box)
    state = sample(after, rng)
    return ("found" if found else "not_found",), adhoc_post(state)


@dataclass(frozen=True)
class LSBoxState:
    x: str
    y: str

    def __post_init__(self) -> None:
        if self.x not in X_VALUES or self.y not in Y_VALUES:
            raise ValidationError(f"invalid ball position ({self.x}, {self.y})")


def _check_half(half: str) -> None:
    if half not in X_VALUES:
        raise ValidationError(f"half must be Left or Right, got {half!r}")


def ls_shake(state: LSBoxState, half: str) -> tuple[bool, Dist[LSBoxState]]:
    """Shake one half: a rattle reveals the ball and randomizes front/rear."""
    _check_half(half)
    if state.x != half:
        return False, Dist.point(state)
    return True, Dist.uniform([LSBoxState(state.x, y) for y in Y_VALUES])


def ls_tilt(state: LSBoxState, half: str) -> tuple[bool, str | None, LSBoxState]:
    """Tilt one half upright and time the fall; reads y without disturbing anything."""
    _check_half(half)
    if state.x != half:
        return False, None, state
    return True, state.y, state


def ls_xray(state: LSBoxState) -> tuple[str, str]:
    return state.x, state.y


@dataclass(frozen=True)
class LSOperation:
    op: str
    half: str | None = None

    def __post_init__(self) -> None:
        if self.op not in ("shake", "tilt", "xray"):
            raise ValidationError(f"unknown box operation {self.op!r}")
        if self.op == "xray":
            if self.half is not None:
                raise ValidationError("xray takes no half")
        else:
            _check_half(self.half)  # type: ignore[arg-type]

    @lru_cache(maxsize=None)
    def apply(self, state: LSBoxState) -> Dist[tuple[str, LSBoxState]]:
        if self.op == "shake":
            rattle, after = ls_shake(state, self.half)  # type: ignore[arg-type]
            label = "rattle" if rattle else "silent"
            return after.map(lambda s: (label, s))
        if self.op == "tilt":
            present, y, after = ls_tilt(state, self.half)  # type: ignore[arg-type]
            return Dist.point((y if present else "absent", after))
        x, y = ls_xray(state)
        return Dist.point((f"{x}-{y}", state))


@lru_cache(maxsize=None)
def ls_initial(start: LSBoxState | None = None) -> Dist[LSBoxState]:
    if start is None:
        return Dist.uniform([LSBoxState(x, y) for x in X_VALUES for y in Y_VALUES])
    return Dist.point(start)


def _ls_pass(post: dict[str, str] | None):
    def pass_probability(state: LSBoxState) -> Fraction:
        if not post:
            return Fraction(1)
        ok = all(getattr(state, k) == v for k, v in post.items())
        return Fraction(int(ok))

    return pass_probability


def run_lsbox(
    ops: Sequence[LSOperation],
    start: LSBoxState | None = None,
    post: dict[str, str] | None = None,
    name: str = "lsbox",
    metadata: dict | None = None,
) -> ScenarioReport:
    """Exact report for a sequence of box operations.

    ``post`` optionally conditions on the final position, e.g. ``{"y": "Front"}``;
    without it every run passes.
    """
    branches = enumerate_branches(ls_initial(start), [op.apply for op in ops])
    return ScenarioReport.from_branches("lsbox", name, branches, _ls_pass(post), metadata)


def sample_lsbox_run(
    ops: Sequence[LSOperation],
    start: LSBoxState | None,
    post: dict[str, str] | None,
    rng: RandomSource,
) -> tuple[tuple[str, ...], bool]:
    state = sample(ls_initial(start), rng)
    labels = []
    for op in ops:
        label, state = sample(op.apply(state), rng)
        labels.append(label)
    return tuple(labels), _ls_pass(post)(state) == 1
