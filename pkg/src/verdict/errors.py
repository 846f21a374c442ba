"""Exception types shared across the package."""

from __future__ import annotations


class VerdictError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(VerdictError):
    """An input (knowledge, value, parameter) failed validation."""


class ScenarioError(ValidationError):
    """A scenario document could not be parsed or validated.

    Carries the full list of issues so callers can report more than the
    first failure.
    """

    def __init__(self, issues):
        self.issues = list(issues)
        lines = [str(issue) for issue in self.issues]
        super().__init__("invalid scenario:\n" + "\n".join(lines))


class ContractError(VerdictError):
    """An operation was called with arguments violating its precondition."""


class ModelIncompleteError(VerdictError):
    """A model lookup (credence row, outcome entry, utility rule) found no entry."""


class DilemmaError(VerdictError):
    """The maximally ranked applicable principles permit no common option."""

    def __init__(self, world, principle_ids):
        self.world = world
        self.principle_ids = tuple(principle_ids)
        super().__init__(
            "true moral dilemma: principles %s permit no common option in world %s"
            % (", ".join(self.principle_ids), world.describe())
        )
