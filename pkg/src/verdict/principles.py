"""Moral principles, principle hierarchies, and idealized deontic filtering.

A principle is a conditional: when its condition holds in a world, its option
structure ranks the options and the topmost class is what the principle
permits. Principles live in ranked equivalence classes; only the maximally
ranked applicable ones participate in the filter, whose result is the
intersection of their permitted sets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .conditions import Condition
from .errors import ContractError, DilemmaError, ValidationError
from .instrumental import OptionSet
from .worlds import WorldState


class DilemmaPolicy(enum.Enum):
    """What to do when the filter intersection comes up empty."""

    ERROR = "error"
    UNION = "union"
    PASS_THROUGH = "pass-through"


@dataclass(frozen=True)
class OptionStructure:
    """Ordered partition of (a subset of) the options, best class first.

    Options not mentioned in any class form an implicit bottom class, so
    scenario authors only write down what a principle actually prefers.
    """

    classes: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(tuple(c) for c in self.classes))
        if not self.classes:
            raise ValidationError("option structure needs at least one class")
        seen: set[str] = set()
        for cls in self.classes:
            if not cls:
                raise ValidationError("option structure has an empty class")
            overlap = seen & set(cls)
            if overlap:
                raise ValidationError(
                    f"option structure classes overlap on {sorted(overlap)}"
                )
            seen |= set(cls)

    def topmost(self) -> tuple[str, ...]:
        return self.classes[0]

    def text(self) -> str:
        return " > ".join("{" + ", ".join(cls) + "}" for cls in self.classes)


@dataclass(frozen=True)
class Principle:
    id: str
    condition: Condition
    structure: OptionStructure


@dataclass(frozen=True)
class PrincipleStructure:
    """Principles partitioned into equivalence classes, highest rank first."""

    classes: tuple[tuple[Principle, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(tuple(c) for c in self.classes))
        ids: set[str] = set()
        for cls in self.classes:
            if not cls:
                raise ValidationError("principle structure has an empty class")
            for principle in cls:
                if principle.id in ids:
                    raise ValidationError(f"duplicate principle id {principle.id!r}")
                ids.add(principle.id)

    @classmethod
    def empty(cls) -> "PrincipleStructure":
        return cls(())

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def all_principles(self) -> tuple[Principle, ...]:
        return tuple(p for cls in self.classes for p in cls)

    def rank_of(self, principle_id: str) -> int:
        """1-based class rank; 1 is the highest class."""
        for rank, cls in enumerate(self.classes, start=1):
            if any(p.id == principle_id for p in cls):
                return rank
        raise ValidationError(f"unknown principle id {principle_id!r}")


def applies(principle: Principle, world: WorldState) -> bool:
    """Antecedent satisfaction: does the principle's condition hold here?"""
    return principle.condition.evaluate(world)


def permissible_per_principle(
    principle: Principle, options: OptionSet, world: WorldState
) -> tuple[str, ...]:
    """Options in the topmost class of the principle's structure, in option
    declaration order. Only defined when the principle applies.
    """
    if not applies(principle, world):
        raise ContractError(
            f"principle {principle.id!r} does not apply in world {world.describe()}"
        )
    permitted = options.ordered(principle.structure.topmost())
    if not permitted:
        # Validation guarantees structure classes are drawn from the option
        # set, so this only fires on hand-built, inconsistent inputs.
        raise ValidationError(
            f"principle {principle.id!r} permits none of the available options"
        )
    return permitted


def applicable_principles(
    structure: PrincipleStructure, world: WorldState
) -> tuple[tuple[Principle, ...], tuple[Principle, ...]]:
    """(all applicable principles, the maximally ranked ones among them)."""
    applying = tuple(p for p in structure.all_principles() if applies(p, world))
    if not applying:
        return (), ()
    for cls in structure.classes:
        top = tuple(p for p in cls if applies(p, world))
        if top:
            return applying, top
    return applying, ()  # unreachable; keeps mypy-style readers happy


def has_grip(principle: Principle, options: OptionSet, world: WorldState) -> bool:
    """A principle has grip when it permits a proper subset of the options."""
    return set(permissible_per_principle(principle, options, world)) != set(options)


def deontic_filter(
    structure: PrincipleStructure,
    options: OptionSet,
    world: WorldState,
    policy: DilemmaPolicy = DilemmaPolicy.ERROR,
) -> tuple[str, ...]:
    """Intersection of the permitted sets of the maximally ranked applicable
    principles; the full option set when nothing applies.

    An empty intersection is a true moral dilemma and is handled per
    `policy`: raise, fall back to the union of the gripping principles'
    permitted sets, or pass all options through.
    """
    _, max_ranked = applicable_principles(structure, world)
    if not max_ranked:
        return tuple(options)
    permitted_sets = {
        p.id: permissible_per_principle(p, options, world) for p in max_ranked
    }
    surviving = [
        o for o in options if all(o in perm for perm in permitted_sets.values())
    ]
    if surviving:
        return tuple(surviving)
    if policy is DilemmaPolicy.ERROR:
        raise DilemmaError(world, [p.id for p in max_ranked])
    if policy is DilemmaPolicy.UNION:
        gripping = [
            p for p in max_ranked if set(permitted_sets[p.id]) != set(options)
        ]
        allowed = set().union(*(permitted_sets[p.id] for p in gripping))
        return options.ordered(allowed)
    return tuple(options)
