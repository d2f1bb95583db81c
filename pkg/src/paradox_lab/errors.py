"""Exception hierarchy shared by every engine.

``ValidationError`` and ``ParseError`` are input problems (CLI exit code 2);
everything deriving from ``EngineError`` is raised while running a model
(exit code 3).
"""

from __future__ import annotations


class ParadoxLabError(Exception):
    pass


class ParseError(ParadoxLabError):
    """Scenario document violates the schema; ``pointer`` locates the fault."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


class ValidationError(ParadoxLabError):
    pass


class EngineError(ParadoxLabError):
    pass


class InvalidDistribution(EngineError):
    pass


class KernelGap(EngineError):
    pass


class BasisMismatch(EngineError):
    pass


class DegenerateConditioning(EngineError):
    pass


class ImpossiblePreparation(EngineError):
    pass


class EmptyPile(EngineError):
    """The pile designated by the pick rule is empty.

    ``branch`` holds the outcome labels observed before the failing step.
    """

    def __init__(self, message: str, branch: tuple = ()):
        super().__init__(f"{message} (branch {list(branch)})")
        self.reason = message
        self.branch = tuple(branch)


class UnsupportedOpening(EngineError):
    pass


class GeometryViolation(EngineError):
    pass


class UnsupportedDetectorPosition(EngineError):
    pass


class ScenarioMismatch(EngineError):
    pass
