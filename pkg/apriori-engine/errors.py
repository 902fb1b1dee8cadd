"""
Engine Errors

Every failure raised by the engine is an EngineError with a stable `kind`
string. Scenario files match on that string (`expect-error <kind>`).
"""


class EngineError(Exception):
    """Base class for all engine failures"""

    kind = "engine-error"

    def __init__(self, message, agent=None, position=None):
        super().__init__(message)
        self.message = message
        self.agent = agent
        self.position = position

    def __str__(self):
        text = self.message
        if self.position is not None:
            text = f"{text} (at {self.position})"
        if self.agent is not None:
            text = f"[{self.agent}] {text}"
        return text


# --- Formula language ---

class FormulaSyntaxError(EngineError):
    kind = "parse-error"


class UndeclaredIdentifier(EngineError):
    kind = "undeclared-identifier"


# --- Models and files ---

class ModelError(EngineError):
    kind = "invalid-model"


class ModelFileError(EngineError):
    kind = "file-format"


class NotPartialEquivalence(EngineError):
    kind = "not-partial-equivalence"


# --- Dynamics ---

class AnnouncementFalseAtPoint(EngineError):
    kind = "announcement-false"


class EmptySubmodel(EngineError):
    kind = "empty-submodel"


class PointNotInconsistent(EngineError):
    kind = "point-not-inconsistent"


class NotIntrospective(EngineError):
    kind = "not-introspective"


class InvalidUpdate(EngineError):
    kind = "invalid-update"


class CoherencyFailure(EngineError):
    kind = "coherency-failure"

    def __init__(self, message, report, agent=None):
        super().__init__(message, agent=agent)
        self.report = report


class CandidateBudgetExceeded(EngineError):
    kind = "budget-exceeded"


# --- Scenarios and configuration ---

class TruncationMarginError(EngineError):
    kind = "truncation-margin"


class ScenarioError(EngineError):
    kind = "scenario-error"


class ConfigError(EngineError):
    kind = "config-error"


def tag_agent(error, agent):
    """Attach the agent to an error raised inside a per-agent step."""
    if error.agent is None:
        error.agent = agent
    return error
