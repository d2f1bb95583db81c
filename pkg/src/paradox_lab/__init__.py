"""Exact and sampled simulations of the three-box experiment and its classical analogs."""

from .errors import (
    BasisMismatch,
    DegenerateConditioning,
    EmptyPile,
    EngineError,
    GeometryViolation,
    ImpossiblePreparation,
    InvalidDistribution,
    KernelGap,
    ParseError,
    UnsupportedDetectorPosition,
    UnsupportedOpening,
    ValidationError,
)
from .probability import Dist, RandomSource, chain, merge, sample
from .report import ScenarioReport, compare_mc_exact, render, report_from_json
from .scenario import PRESETS, Scenario, parse_scenario, run_scenario

__all__ = [
    "BasisMismatch",
    "DegenerateConditioning",
    "Dist",
    "EmptyPile",
    "EngineError",
    "GeometryViolation",
    "ImpossiblePreparation",
    "InvalidDistribution",
    "KernelGap",
    "PRESETS",
    "ParseError",
    "RandomSource",
    "Scenario",
    "ScenarioReport",
    "UnsupportedDetectorPosition",
    "UnsupportedOpening",
    "ValidationError",
    "chain",
    "compare_mc_exact",
    "merge",
    "parse_scenario",
    "render",
    "report_from_json",
    "run_scenario",
    "sample",
]
