"""Outcome distributions under partial knowledge, expected utilities, and the
instrumental argmax choice set.

The outcome kernel is rule-based: each rule matches a (source world, option)
pair by a partial-assignment pattern and yields a distribution over patched
successor worlds. Unlisted pairs may fall back to a self-loop when the model
allows it, which keeps desk-scale scenario files small.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ModelIncompleteError, ValidationError
from .worlds import (
    CredenceModel,
    Knowledge,
    Value,
    WorldState,
    enumerate_consistent_worlds,
    world_probability,
)

#: Absolute tolerance for expected-utility comparisons.
EU_TOL = 1e-9


@dataclass(frozen=True)
class OptionSet:
    """The constant, ordered set of options available at every decision."""

    options: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "options", tuple(self.options))
        if not self.options:
            raise ValidationError("option set is empty")
        if len(set(self.options)) != len(self.options):
            raise ValidationError("option set has duplicates")

    def __iter__(self):
        return iter(self.options)

    def __len__(self):
        return len(self.options)

    def __contains__(self, option: str) -> bool:
        return option in self.options

    def index(self, option: str) -> int:
        return self.options.index(option)

    def ordered(self, subset) -> tuple[str, ...]:
        """The members of `subset` in declaration order."""
        wanted = set(subset)
        return tuple(o for o in self.options if o in wanted)


@dataclass(frozen=True)
class OutcomeRule:
    """First-match transition rule: pattern + option -> weighted patches."""

    when: Mapping[str, Value]
    option: str | None  # None matches every option
    branches: tuple[tuple[float, Mapping[str, Value]], ...]

    def __post_init__(self):
        object.__setattr__(self, "when", dict(self.when))
        object.__setattr__(
            self, "branches", tuple((float(p), dict(patch)) for p, patch in self.branches)
        )

    def applies_to(self, world: WorldState, option: str) -> bool:
        return (self.option is None or self.option == option) and world.matches(self.when)


@dataclass(frozen=True)
class OutcomeModel:
    rules: tuple[OutcomeRule, ...]
    default_self_loop: bool = True

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))

    def rule_for(self, world: WorldState, option: str) -> OutcomeRule | None:
        for rule in self.rules:
            if rule.applies_to(world, option):
                return rule
        return None

    def distribution(self, world: WorldState, option: str) -> dict[WorldState, float]:
        """Successor distribution for one (world, option) pair."""
        rule = self.rule_for(world, option)
        if rule is None:
            if self.default_self_loop:
                return {world: 1.0}
            raise ModelIncompleteError(
                f"outcome kernel has no entry for option {option!r} in world "
                f"{world.describe()}"
            )
        dist: dict[WorldState, float] = {}
        for prob, patch in rule.branches:
            successor = world.patched(patch)
            dist[successor] = dist.get(successor, 0.0) + prob
        return dist


@dataclass(frozen=True)
class UtilityRule:
    when: Mapping[str, Value]
    value: float

    def __post_init__(self):
        object.__setattr__(self, "when", dict(self.when))
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class UtilityFunction:
    """First-match (pattern, value) rules; validation demands a catch-all."""

    rules: tuple[UtilityRule, ...]

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))

    def value(self, world: WorldState) -> float:
        for rule in self.rules:
            if world.matches(rule.when):
                return rule.value
        raise ModelIncompleteError(f"no utility rule matches world {world.describe()}")


def outcome_given_knowledge(
    knowledge: Knowledge,
    option: str,
    target: WorldState,
    model: OutcomeModel,
    credences: CredenceModel,
    variables,
) -> float:
    """Probability of reaching `target` with `option`, mixing the kernel over
    all knowledge-consistent source worlds weighted by their credences.
    """
    total = 0.0
    for source in enumerate_consistent_worlds(knowledge, variables):
        p = world_probability(source, knowledge, credences)
        if p == 0.0:
            continue
        total += p * model.distribution(source, option).get(target, 0.0)
    return total


def outcome_distribution(
    knowledge: Knowledge,
    option: str,
    model: OutcomeModel,
    credences: CredenceModel,
    variables,
) -> dict[WorldState, float]:
    """The full successor distribution given knowledge (sparse form)."""
    dist: dict[WorldState, float] = {}
    for source in enumerate_consistent_worlds(knowledge, variables):
        p = world_probability(source, knowledge, credences)
        if p == 0.0:
            continue
        for successor, q in model.distribution(source, option).items():
            dist[successor] = dist.get(successor, 0.0) + p * q
    return dist


def expected_utility(
    option: str,
    knowledge: Knowledge,
    model: OutcomeModel,
    utility: UtilityFunction,
    credences: CredenceModel,
    variables,
) -> float:
    """Expected utility of an option given the agent's knowledge."""
    total = 0.0
    for source in enumerate_consistent_worlds(knowledge, variables):
        p = world_probability(source, knowledge, credences)
        if p == 0.0:
            continue
        for successor, q in model.distribution(source, option).items():
            total += p * q * utility.value(successor)
    return total


def instrumental_choice(
    options,
    knowledge: Knowledge,
    model: OutcomeModel,
    utility: UtilityFunction,
    credences: CredenceModel,
    variables,
    tol: float = EU_TOL,
) -> tuple[str, ...]:
    """The full expected-utility argmax set (ties within `tol` preserved).

    `options` may be an OptionSet or any non-empty sequence of option names;
    the result keeps the given order.
    """
    names = tuple(options)
    if not names:
        raise ValidationError("instrumental choice over an empty option set")
    eus = {
        a: expected_utility(a, knowledge, model, utility, credences, variables)
        for a in names
    }
    best = max(eus.values())
    return tuple(a for a in names if eus[a] >= best - tol)
