"""Scenario reports: joint and conditional probabilities, Monte Carlo comparison, rendering."""

from __future__ import annotations

import json
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Union

from .errors import DegenerateConditioning, ParseError, ScenarioMismatch
from .probability import Dist, format_fraction

Prob = Union[Fraction, float]
Outcomes = tuple[str, ...]
JointKey = tuple[Outcomes, bool]

# floats closer than this to 0 or 1 count as certain events (slit engine only)
FLOAT_CERTAINTY_TOL = 1e-12


@dataclass
class MonteCarloSummary:
    trials: int
    seed: int
    counts: dict[JointKey, int]
    z_scores: dict[JointKey, float | None] = field(default_factory=dict)
    hard_failures: list[JointKey] = field(default_factory=list)

    def frequency(self, key: JointKey) -> float:
        return self.counts.get(key, 0) / self.trials

    def keys(self) -> list[JointKey]:
        return sorted(set(self.counts) | set(self.z_scores), key=lambda k: (k[0], not k[1]))

    @property
    def max_abs_z(self) -> float:
        zs = [abs(z) for z in self.z_scores.values() if z is not None]
        return max(zs, default=0.0)


@dataclass
class ScenarioReport:
    """Joint law of (intermediate outcome sequence, post-selection pass).

    ``joint`` holds exact ``Fraction`` values when ``exact`` is true and
    floats otherwise (Monte Carlo frequencies, or the floating-point slit
    engine). ``conditionals`` is ``None`` whenever the pass event has zero
    probability.
    """

    engine: str
    name: str
    exact: bool
    joint: dict[JointKey, Prob]
    conditionals: dict[Outcomes, Prob] | None
    mc: MonteCarloSummary | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_branches(
        cls,
        engine: str,
        name: str,
        branches: Dist,
        pass_probability: Callable[[Any], Fraction],
        metadata: dict[str, Any] | None = None,
    ) -> ScenarioReport:
        """Build an exact report from a ``Dist`` over ``(labels, state)``."""
        joint: dict[JointKey, Fraction] = {}
        for (labels, state), w in branches.entries:
            q = pass_probability(state)
            for passed, p in ((True, w * q), (False, w * (1 - q))):
                joint[(labels, passed)] = joint.get((labels, passed), Fraction(0)) + p
        return cls.from_joint(engine, name, joint, exact=True, metadata=metadata)

    @classmethod
    def from_joint(
        cls,
        engine: str,
        name: str,
        joint: dict[JointKey, Prob],
        exact: bool,
        metadata: dict[str, Any] | None = None,
    ) -> ScenarioReport:
        zero: Prob = Fraction(0) if exact else 0.0
        p_pass = sum((p for (_, passed), p in joint.items() if passed), zero)
        conditionals = None
        if p_pass > 0:
            conditionals = {}
            for (labels, passed), p in joint.items():
                if passed:
                    conditionals[labels] = conditionals.get(labels, zero) + p / p_pass
        return cls(engine, name, exact, dict(joint), conditionals, metadata=dict(metadata or {}))

    def p_pass(self) -> Prob:
        return sum((p for (_, passed), p in self.joint.items() if passed), self._zero())

    def joint_prob(self, labels: Outcomes, passed: bool) -> Prob:
        return self.joint.get((tuple(labels), passed), self._zero())

    def branch_pass_probability(self, labels: Outcomes) -> Prob:
        """P(pass | this outcome sequence occurred)."""
        labels = tuple(labels)
        hit = self.joint_prob(labels, True)
        total = hit + self.joint_prob(labels, False)
        if total == 0:
            raise DegenerateConditioning(f"outcome sequence {labels} never occurs")
        return hit / total

    def conditional(self, labels: Outcomes) -> Prob:
        if self.conditionals is None:
            raise DegenerateConditioning("post-selection has probability zero")
        return self.conditionals.get(tuple(labels), self._zero())

    def conditional_at(self, stage: int, label: str) -> Prob:
        """P(stage ``stage`` gave ``label`` | pass), marginal over other stages."""
        if self.conditionals is None:
            raise DegenerateConditioning("post-selection has probability zero")
        return sum(
            (p for labels, p in self.conditionals.items() if labels[stage] == label),
            self._zero(),
        )

    def outcome_sequences(self) -> list[Outcomes]:
        return sorted({labels for labels, _ in self.joint})

    def _zero(self) -> Prob:
        return Fraction(0) if self.exact else 0.0

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "engine": self.engine,
            "name": self.name,
            "exact": self.exact,
            "joint": [
                {"outcomes": list(labels), "pass": passed, "p": _dump_prob(p)}
                for (labels, passed), p in sorted(self.joint.items(), key=_key_order)
            ],
            "conditionals": None
            if self.conditionals is None
            else [
                {"outcomes": list(labels), "p": _dump_prob(p)}
                for labels, p in sorted(self.conditionals.items())
            ],
            "metadata": self.metadata,
        }
        if self.mc is not None:
            d["montecarlo"] = {
                "trials": self.mc.trials,
                "seed": self.mc.seed,
                "events": [self._mc_event(key) for key in self.mc.keys()],
                "hard_failures": [
                    {"outcomes": list(labels), "pass": passed}
                    for labels, passed in self.mc.hard_failures
                ],
            }
        return d

    def _mc_event(self, key: JointKey) -> dict[str, Any]:
        labels, passed = key
        e: dict[str, Any] = {"outcomes": list(labels), "pass": passed, "count": self.mc.counts.get(key, 0)}
        if key in self.mc.z_scores:
            e["z"] = self.mc.z_scores[key]
        return e

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ScenarioReport:
        try:
            joint = {
                (tuple(e["outcomes"]), bool(e["pass"])): _load_prob(e["p"]) for e in d["joint"]
            }
            conditionals = (
                None
                if d["conditionals"] is None
                else {tuple(e["outcomes"]): _load_prob(e["p"]) for e in d["conditionals"]}
            )
            mc = None
            if "montecarlo" in d:
                m = d["montecarlo"]
                mc = MonteCarloSummary(
                    trials=m["trials"],
                    seed=m["seed"],
                    counts={
                        (tuple(e["outcomes"]), bool(e["pass"])): e["count"]
                        for e in m["events"]
                        if e["count"]
                    },
                    z_scores={
                        (tuple(e["outcomes"]), bool(e["pass"])): e["z"]
                        for e in m["events"]
                        if "z" in e
                    },
                    hard_failures=[(tuple(e["outcomes"]), bool(e["pass"])) for e in m["hard_failures"]],
                )
            return cls(
                engine=d["engine"],
                name=d["name"],
                exact=bool(d["exact"]),
                joint=joint,
                conditionals=conditionals,
                mc=mc,
                metadata=dict(d.get("metadata", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed report: {exc}") from exc


def _key_order(item):
    (labels, passed), _ = item
    return (labels, not passed)


def _dump_prob(p: Prob) -> str | float:
    return format_fraction(p) if isinstance(p, Fraction) else float(p)


def _load_prob(v: Any) -> Prob:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"probability must be a 'p/q' string or a number, got {v!r}")
    return float(v)


def _is_certain(p: Prob) -> bool:
    if isinstance(p, Fraction):
        return p in (0, 1)
    return p <= FLOAT_CERTAINTY_TOL or p >= 1 - FLOAT_CERTAINTY_TOL


def compare_mc_exact(exact: ScenarioReport, mc: ScenarioReport) -> MonteCarloSummary:
    """Per-event z-scores of sampled frequencies against exact probabilities.

    ``z = (freq - p) * sqrt(N) / sqrt(p (1 - p))``. Events with ``p`` equal to
    0 or 1 get no z-score; any frequency other than exactly ``p`` is a hard
    failure. Sampled events missing from the exact joint have ``p = 0``.
    """
    if mc.mc is None:
        raise ScenarioMismatch("second report carries no Monte Carlo counts")
    if (exact.engine, exact.name) != (mc.engine, mc.name):
        raise ScenarioMismatch(
            f"cannot compare {exact.engine}/{exact.name} with {mc.engine}/{mc.name}"
        )
    n = mc.mc.trials
    z_scores: dict[JointKey, float | None] = {}
    failures: list[JointKey] = []
    keys = sorted(set(exact.joint) | set(mc.mc.counts), key=lambda k: (k[0], not k[1]))
    for key in keys:
        p = exact.joint.get(key, Fraction(0))
        count = mc.mc.counts.get(key, 0)
        if _is_certain(p):
            z_scores[key] = None
            certain_count = n if p >= 0.5 else 0
            if count != certain_count:
                failures.append(key)
            continue
        pf = float(p)
        z_scores[key] = (count / n - pf) * math.sqrt(n) / math.sqrt(pf * (1 - pf))
    return MonteCarloSummary(n, mc.mc.seed, dict(mc.mc.counts), z_scores, failures)


def render(report: ScenarioReport, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "table":
        return _render_table(report)
    raise ValueError(f"unknown format {fmt!r}")


def report_from_json(text: str) -> ScenarioReport:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return ScenarioReport.from_dict(data)


def _fmt(p: Prob) -> str:
    return format_fraction(p) if isinstance(p, Fraction) else f"{p:.6g}"


def _seq(labels: Outcomes) -> str:
    return " > ".join(labels) if labels else "(none)"


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    fmt_row = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
    return [fmt_row(header), "  ".join("-" * w for w in widths), *map(fmt_row, rows)]


def _render_table(report: ScenarioReport) -> str:
    kind = "exact" if report.exact else "estimated"
    lines = [f"scenario: {report.name}  engine: {report.engine}  ({kind})"]
    for k in sorted(report.metadata):
        lines.append(f"  {k}: {report.metadata[k]}")
    lines.append("")
    rows = [
        [_seq(labels), "pass" if passed else "fail", _fmt(p)]
        for (labels, passed), p in sorted(report.joint.items(), key=_key_order)
    ]
    lines += _table(["outcomes", "post", "P(joint)"], rows)
    lines.append("")
    lines.append(f"P(pass) = {_fmt(report.p_pass())}")
    if report.conditionals is not None:
        lines.append("")
        rows = [[_seq(labels), _fmt(p)] for labels, p in sorted(report.conditionals.items())]
        lines += _table(["outcomes", "P(. | pass)"], rows)
    if report.mc is not None:
        mc = report.mc
        lines.append("")
        lines.append(f"Monte Carlo: {mc.trials} trials, seed {mc.seed}")
        header = ["outcomes", "post", "count", "freq", "z"] + (["check"] if mc.hard_failures else [])
        rows = []
        for key in mc.keys():
            z = mc.z_scores.get(key)
            row = [_seq(key[0]), "pass" if key[1] else "fail", str(mc.counts.get(key, 0)),
                   f"{mc.frequency(key):.6f}", "exact" if z is None else f"{z:+.3f}"]
            if mc.hard_failures:
                row.append("FAIL" if key in mc.hard_failures else "ok")
            rows.append(row)
        lines += _table(header, rows)
    return "\n".join(lines) + "\n"
