"""Scenario documents: parsing, built-in presets and execution."""

from __future__ import annotations

import copy
import json
import os
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any

import jsonschema

from . import analogs, cards, quantum, slits
from .errors import EngineError, ParseError, ValidationError
from .probability import SEED_MAX, RandomSource
from .report import MonteCarloSummary, ScenarioReport, compare_mc_exact

DEFAULT_TRIALS = 100_000
SEED_ENV = "PARADOX_LAB_SEED"
MODES = {"exact": "exact", "montecarlo": "montecarlo", "mc": "montecarlo", "both": "both"}

PRESETS: dict[str, dict[str, Any]] = {
    "three-box": {
        "engine": "quantum",
        "pre": [1, 1, 1],
        "post": [1, 1, -1],
        "stages": [{"open": "p1"}],
        "anchor": "three-box: psi=(1,1,1)/sqrt3, phi=(1,1,-1)/sqrt3, open box 1 in between",
    },
    "card-game": {
        "engine": "card",
        "deck": ["QS", "QD", "KH", "KH", "JS", "JD"],
        "prep": {"attribute": "Face", "values": ["Q"]},
        "looks": ["S"],
        "post": {"attribute": "Face", "value": "K"},
        "anchor": "card game: prepare Q, look for S, post-select K",
    },
    "card-game-notJ": {
        "engine": "card",
        "deck": ["QS", "QD", "KH", "KH", "JS", "JD"],
        "prep": {"attribute": "Face", "values": ["Q", "K"]},
        "looks": ["S"],
        "post": {"attribute": "Face", "value": "K"},
        "anchor": "card game: prepare not-J (QS, QD, 2 KH in These; JS, JD in Others)",
    },
    "adhoc": {
        "engine": "adhoc",
        "open": 1,
        "start": None,
        "anchor": "ad hoc three-box: empty box sends the ball to box 3; post-select 'not in box 3'",
    },
    "ls-box": {
        "engine": "lsbox",
        "start": None,
        "ops": [
            {"op": "tilt", "half": "Left"},
            {"op": "shake", "half": "Left"},
            {"op": "tilt", "half": "Left"},
        ],
        "post": None,
        "anchor": "Leifer-Spekkens box: tilt reads front/rear, shake randomizes it",
    },
    "three-slit": {
        "engine": "slit",
        "a": 1000.0,
        "lambda": 1.0,
        "detector": 1,
        "anchor": "three-slit Young apparatus: D at the first two-slit minimum, which-path detector at slit 1",
    },
}

ENGINE_KEYS = {
    "quantum": {"basis", "pre", "post", "stages", "stage"},
    "card": {"deck", "prep", "looks", "look", "post"},
    "adhoc": {"open", "start"},
    "lsbox": {"start", "ops", "post"},
    "slit": {"a", "lambda", "L", "detector"},
}
COMMON_KEYS = {"scenario", "engine", "name", "mode", "trials", "seed"}


@lru_cache(maxsize=None)
def load_schema(kind: str = "scenario") -> dict[str, Any]:
    text = resources.files("paradox_lab").joinpath(f"schemas/{kind}.schema.json").read_text("utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class Model:
    """Engine-specific closures behind a scenario."""

    exact: Callable[[str, dict], ScenarioReport]
    sample: Callable[[RandomSource], tuple[tuple[str, ...], bool]]


@dataclass
class Scenario:
    engine: str
    name: str
    mode: str
    trials: int
    seed: int
    params: dict[str, Any]
    preset: str | None = None
    anchor: str | None = None
    model: Model | None = field(default=None, repr=False, compare=False)

    def metadata(self) -> dict[str, Any]:
        meta: dict[str, Any] = {"scenario": self.name, "engine": self.engine, "mode": self.mode}
        if self.preset:
            meta["preset"] = self.preset
        if self.anchor:
            meta["anchor"] = self.anchor
        if self.mode != "exact":
            meta["seed"] = self.seed
            meta["trials"] = self.trials
        if self.engine in ("adhoc", "lsbox") and self.params.get("start") is None:
            meta["initial"] = "uniform"
        return meta


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise ValidationError(f"{SEED_ENV}={raw!r} is not an integer") from None
    if not 0 <= seed <= SEED_MAX:
        raise ValidationError(f"{SEED_ENV} must be an unsigned 64-bit integer")
    return seed


def parse_scenario(text: str | bytes, default_seed_value: int | None = None) -> Scenario:
    """Parse and validate a JSON scenario document.

    Built-in names in ``"scenario"`` expand to their preset, and any other keys
    in the document override the preset's values.
    """
    try:
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        doc = json.loads(text)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"not a UTF-8 JSON document: {exc}") from exc
    return scenario_from_dict(doc, default_seed_value)


def scenario_from_dict(doc: Any, default_seed_value: int | None = None) -> Scenario:
    validator = jsonschema.Draft202012Validator(load_schema("scenario"))
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        raise ParseError(err.message, _pointer(err.absolute_path))

    preset = doc.get("scenario")
    params: dict[str, Any] = copy.deepcopy(PRESETS[preset]) if preset else {}
    if preset and "engine" in doc and doc["engine"] != params["engine"]:
        raise ParseError(f"preset {preset!r} uses engine {params['engine']!r}", "/engine")
    engine = doc.get("engine", params.get("engine"))
    allowed = ENGINE_KEYS[engine] | COMMON_KEYS
    for key in doc:
        if key not in allowed:
            raise ParseError(f"key {key!r} does not apply to the {engine} engine", f"/{key}")

    overrides = {k: v for k, v in doc.items() if k in ENGINE_KEYS[engine]}
    # single-item shorthands replace the list form
    if "stage" in overrides:
        params.pop("stages", None)
    if "stages" in overrides:
        params.pop("stage", None)
    if "look" in overrides:
        params.pop("looks", None)
    if "looks" in overrides:
        params.pop("look", None)
    anchor = params.pop("anchor", None)
    params.pop("engine", None)
    params.update(copy.deepcopy(overrides))

    seed = doc.get("seed")
    if seed is None:
        seed = default_seed() if default_seed_value is None else default_seed_value
    scenario = Scenario(
        engine=engine,
        name=doc.get("name", preset or engine),
        mode=MODES[doc.get("mode", "exact")],
        trials=doc.get("trials", DEFAULT_TRIALS),
        seed=seed,
        params=params,
        preset=preset,
        anchor=anchor,
    )
    try:
        scenario.model = build_model(engine, params)
    except EngineError as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}") from exc
    return scenario


def build_model(engine: str, params: dict[str, Any]) -> Model:
    return _BUILDERS[engine](params)


def _amplitude(v: Any) -> quantum.GaussRational:
    if isinstance(v, dict):
        return quantum.GaussRational(Fraction(v.get("re", 0)), Fraction(v.get("im", 0)))
    return quantum.GaussRational(Fraction(v))


def _vector(values: list, basis: list[str] | None) -> quantum.AmplitudeVector:
    return quantum.AmplitudeVector.of(*map(_amplitude, values), basis=basis)


def _stage(desc: Any, basis: tuple[str, ...]) -> quantum.Measurement:
    if isinstance(desc, dict) and "open" in desc:
        return quantum.Measurement.open_box(desc["open"], basis)
    if isinstance(desc, dict):
        return quantum.Measurement(tuple(map(frozenset, desc["cells"])), tuple(desc.get("labels", ())))
    return quantum.Measurement(tuple(map(frozenset, desc)))


def _quantum(p: dict[str, Any]) -> Model:
    for key in ("pre", "post"):
        if not isinstance(p.get(key), list):
            raise ValidationError(f"quantum scenario needs a {key!r} amplitude list")
    pre = _vector(p["pre"], p.get("basis"))
    post = _vector(p["post"], p.get("basis"))
    stage_specs = [p["stage"]] if "stage" in p else p.get("stages", [])
    exp = quantum.PpsExperiment(pre, tuple(_stage(s, pre.basis) for s in stage_specs), post)
    return Model(
        exact=lambda name, meta: quantum.run_pps(exp, name, meta),
        sample=lambda rng: quantum.sample_pps_run(exp, rng),
    )


def _look(desc: Any) -> cards.ValuePartition:
    if isinstance(desc, str):
        if desc == "fine":
            return cards.ValuePartition.fine(cards.Attribute.SUIT)
        attribute = cards.Attribute.SUIT if desc in cards.SUITS else cards.Attribute.FACE
        return cards.ValuePartition.look(attribute, desc)
    attribute = cards.Attribute.parse(desc["attribute"])
    modes = [k for k in ("look_for", "fine", "cells") if k in desc]
    if len(modes) != 1:
        raise ValidationError("a look needs exactly one of look_for, fine, cells")
    if "look_for" in desc:
        return cards.ValuePartition.look(attribute, desc["look_for"])
    if "fine" in desc:
        return cards.ValuePartition.fine(attribute)
    return cards.ValuePartition(attribute, tuple(map(frozenset, desc["cells"])), tuple(desc.get("labels", ())))


def _card(p: dict[str, Any]) -> Model:
    for key in ("deck", "prep", "post"):
        if key not in p:
            raise ValidationError(f"card scenario needs {key!r}")
    post = p["post"]
    if not (isinstance(post, dict) and "attribute" in post):
        raise ValidationError("card post-selection must be {attribute, value}")
    if "look" in p:
        looks = [] if p["look"] == "none" else [_look(p["look"])]
    else:
        looks = [_look(s) for s in p.get("looks", [])]
    exp = cards.CardExperiment(
        cards.make_deck(p["deck"]),
        (p["prep"]["attribute"], frozenset(p["prep"]["values"])),
        tuple(looks),
        (post["attribute"], post["value"]),
    )
    # surfaces ImpossiblePreparation / EmptyPile at parse time
    cards.card_branches(exp)
    cards.run_card(exp)
    return Model(
        exact=lambda name, meta: cards.run_card(exp, name, meta),
        sample=lambda rng: _card_sample(exp, rng),
    )


def _card_sample(exp: cards.CardExperiment, rng: RandomSource) -> tuple[tuple[str, ...], bool]:
    run = cards.sample_card_run(exp, rng)
    return run.outcomes, run.passed


def _adhoc(p: dict[str, Any]) -> Model:
    box = p.get("open", 1)
    start = p.get("start")
    if start is not None and not isinstance(start, int):
        raise ValidationError("adhoc start must be a box number or null")
    if start is not None:
        analogs.AdHocState(start)
    analogs.run_adhoc(box, start)
    return Model(
        exact=lambda name, meta: analogs.run_adhoc(box, start, name, meta),
        sample=lambda rng: analogs.sample_adhoc_run(box, start, rng),
    )


def _lsbox(p: dict[str, Any]) -> Model:
    start = p.get("start")
    if start is not None:
        if not isinstance(start, dict):
            raise ValidationError("lsbox start must be {x, y} or null")
        start = analogs.LSBoxState(start["x"], start["y"])
    post = p.get("post")
    if post is not None and not (isinstance(post, dict) and set(post) <= {"x", "y"}):
        raise ValidationError("lsbox post-selection must be {x?, y?} or null")
    ops = [analogs.LSOperation(o["op"], o.get("half")) for o in p.get("ops", [])]
    return Model(
        exact=lambda name, meta: analogs.run_lsbox(ops, start, post, name, meta),
        sample=lambda rng: analogs.sample_lsbox_run(ops, start, post, rng),
    )


def _slit(p: dict[str, Any]) -> Model:
    a = float(p.get("a", 1000.0))
    wavelength = float(p.get("lambda", 1.0))
    if "L" in p:
        geometry = slits.SlitGeometry(a, wavelength, float(p["L"]))
    else:
        geometry = slits.SlitGeometry.solved(a, wavelength)
    detector = p.get("detector")
    slits.coincidence_experiment(geometry, detector)
    return Model(
        exact=lambda name, meta: slits.run_slit(geometry, detector, name, meta),
        sample=lambda rng: slits.sample_slit_run(geometry, detector, rng),
    )


_BUILDERS: dict[str, Callable[[dict[str, Any]], Model]] = {
    "quantum": _quantum,
    "card": _card,
    "adhoc": _adhoc,
    "lsbox": _lsbox,
    "slit": _slit,
}


def sample_counts(model: Model, trials: int, seed: int) -> dict[tuple[tuple[str, ...], bool], int]:
    rng = RandomSource(seed)
    counts: dict[tuple[tuple[str, ...], bool], int] = {}
    for _ in range(trials):
        key = model.sample(rng)
        counts[key] = counts.get(key, 0) + 1
    return counts


def run_monte_carlo(s: Scenario) -> ScenarioReport:
    """Frequency report from ``s.trials`` seeded runs."""
    model = s.model or build_model(s.engine, s.params)
    counts = sample_counts(model, s.trials, s.seed)
    joint = {key: n / s.trials for key, n in counts.items()}
    report = ScenarioReport.from_joint(s.engine, s.name, joint, exact=False, metadata=s.metadata())
    report.mc = MonteCarloSummary(s.trials, s.seed, dict(sorted(counts.items(), key=lambda kv: (kv[0][0], not kv[0][1]))))
    return report


def run_scenario(s: Scenario) -> ScenarioReport:
    model = s.model or build_model(s.engine, s.params)
    try:
        if s.mode == "montecarlo":
            return run_monte_carlo(s)
        report = model.exact(s.name, s.metadata())
        if s.mode == "both":
            report.mc = compare_mc_exact(report, run_monte_carlo(s))
        return report
    except EngineError as exc:
        exc.args = (f"scenario {s.name!r}: {exc}",)
        raise
