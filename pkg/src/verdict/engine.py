"""Three-layer argumentation graphs and the interlocked decision rule.

Layer one enumerates case-distinction arguments: one per (consistent world,
applicable principle) pair. Layer two aggregates them into one argument per
supported option, summing pro-tanto strengths. Layer three is the single
final argument that maximizes overall strength plus expected utility and
picks uniformly (seeded) among ties. The idealized sequential pipeline
(filter, then expected-utility argmax, then picking) is provided alongside.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .errors import ValidationError
from .fmtutil import fmt4, force_text
from .instrumental import expected_utility, instrumental_choice
from .principles import (
    DilemmaPolicy,
    Principle,
    applies,
    deontic_filter,
    permissible_per_principle,
)
from .scenario import EngineConfig, Scenario
from .worlds import (
    CredenceModel,
    Knowledge,
    Value,
    WorldState,
    enumerate_consistent_worlds,
    world_probability,
)

#: A pro-tanto or overall strength: a positive real in archimedean mode, or a
#: per-class tier vector (highest class first) in lexicographic mode.
Force = Union[float, tuple[float, ...]]


@dataclass(frozen=True)
class RelevanceFunction:
    """Maps a principle's class rank to its relevance.

    Archimedean mode uses an exponential ladder ``base ** (t - rank)`` over
    ``t`` classes (rank 1 is the highest), or explicit per-rank weights;
    enough mass on lower-ranked principles can then outweigh a higher-ranked
    one. Lexicographic mode never trades classes off against each other:
    strengths become tier vectors compared componentwise, highest class
    first, with expected utility appended as the lowest tier.

    Dominance bound (archimedean, full knowledge, unit EU weight): if the
    weight of the top applicable class exceeds ``m * w_next + s``, where
    ``m`` is the number of principles, ``w_next`` the next lower class
    weight, and ``s`` the spread between the largest and smallest expected
    utility, the combined decision stays inside the union of the permitted
    sets of the maximally ranked applicable principles. With ladder weights
    this holds whenever ``base >= m + s + 1``.
    """

    mode: str = "archimedean"
    base: float = 10.0
    weights: tuple[tuple[int, float], ...] | None = None

    def __post_init__(self):
        if self.mode not in ("archimedean", "lexicographic"):
            raise ValidationError(f"unknown relevance mode {self.mode!r}")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(sorted(self.weights)))

    def weight(self, rank: int, num_classes: int) -> float:
        """Relevance of a principle in class `rank` (1-based, 1 highest)."""
        if self.weights is not None:
            for r, w in self.weights:
                if r == rank:
                    return w
            raise ValidationError(f"no relevance weight for class rank {rank}")
        return self.base ** (num_classes - rank)


def relevance_from_config(config: EngineConfig) -> RelevanceFunction:
    weights = config.relevance_weights
    return RelevanceFunction(
        mode=config.relevance_mode, base=config.relevance_base, weights=weights
    )


@dataclass(frozen=True)
class CaseArgument:
    """One case-distinction argument: a possible world plus an applicable
    principle, concluding what that principle permits there."""

    id: str
    world: WorldState
    principle_id: str
    rank: int  # principle class rank, 1-based
    perm_set: tuple[str, ...]
    probability: float
    premises: tuple[dict, ...]
    conclusion: dict


@dataclass(frozen=True)
class OptionArgument:
    """One reason-aggregation argument per supported option."""

    id: str
    option: str
    support: tuple[tuple[str, Force], ...]  # (case argument id, pro-tanto force)
    strength: Force
    premises: tuple[dict, ...]
    conclusion: dict


@dataclass(frozen=True)
class ScoreEntry:
    option: str
    force: Force
    eu: float
    score: Force


@dataclass(frozen=True)
class FinalArgument:
    id: str
    entries: tuple[ScoreEntry, ...]
    chosen: str
    tie_set: tuple[str, ...]
    seed: int
    premises: tuple[dict, ...]
    conclusion: dict


@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    weight: Force


@dataclass(frozen=True)
class Provenance:
    scenario: str
    digest: str
    knowledge: Mapping[str, Value]
    seed: int
    engine: Mapping[str, object]
    fallback: str | None = None
    timestamp: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "knowledge", dict(self.knowledge))
        object.__setattr__(self, "engine", dict(self.engine))


@dataclass(frozen=True)
class ArgumentationGraph:
    """The complete weighted three-layer graph plus the decision it yields."""

    v1: tuple[CaseArgument, ...]
    v2: tuple[OptionArgument, ...]
    v3: FinalArgument
    e12: tuple[GraphEdge, ...]
    e23: tuple[GraphEdge, ...]
    provenance: Provenance

    @property
    def chosen(self) -> str:
        return self.v3.chosen


# ---------------------------------------------------------------------------
# Force arithmetic


def zero_force(mode: str, num_classes: int) -> Force:
    return (0.0,) * num_classes if mode == "lexicographic" else 0.0


def add_forces(a: Force, b: Force) -> Force:
    if isinstance(a, tuple):
        return tuple(x + y for x, y in zip(a, b))
    return a + b


def combined_score(force: Force, eu: float, eu_weight: float, mode: str) -> Force:
    """Overall strength plus (weighted) expected utility; in lexicographic
    mode the utility enters as the lowest tier instead of being added."""
    if mode == "lexicographic":
        return tuple(force) + (eu_weight * eu,)
    return force + eu_weight * eu


def _as_tuple(score: Force) -> tuple[float, ...]:
    return score if isinstance(score, tuple) else (score,)


def _lex_greater(a: Force, b: Force, tol: float) -> bool:
    for x, y in zip(_as_tuple(a), _as_tuple(b)):
        if x > y + tol:
            return True
        if x < y - tol:
            return False
    return False


def _lex_equal(a: Force, b: Force, tol: float) -> bool:
    return all(abs(x - y) <= tol for x, y in zip(_as_tuple(a), _as_tuple(b)))


def argmax_set(
    candidates: Sequence[str], scores: Mapping[str, Force], tol: float
) -> tuple[str, ...]:
    """All candidates whose score ties the maximum within `tol`, keeping order."""
    best: Force | None = None
    for option in candidates:
        if best is None or _lex_greater(scores[option], best, tol):
            best = scores[option]
    return tuple(o for o in candidates if _lex_equal(scores[o], best, tol))


def pick(tie_set: Sequence[str], seed: int) -> str:
    """Uniform seeded pick among tied options.

    The rule is part of the public contract so independent implementations
    can reproduce decisions: ``random.Random(seed).randrange(len(tie_set))``
    indexes the tie set in option declaration order.
    """
    options = list(tie_set)
    return options[random.Random(seed).randrange(len(options))]


# ---------------------------------------------------------------------------
# Layer construction


def _case_premises(
    world: WorldState, principle: Principle, rank: int, perm: tuple[str, ...], prob: float
) -> tuple[tuple[dict, ...], dict]:
    perm_text = "{" + ", ".join(perm) + "}"
    premises = (
        {
            "kind": "case_fact",
            "world": world.as_dict(),
            "probability": prob,
            "text": (
                f"Possible case: {world.describe()} "
                f"(probability {fmt4(prob)} given current knowledge)."
            ),
        },
        {
            "kind": "conditional",
            "principle": principle.id,
            "condition": principle.condition.to_json(),
            "ranking": [list(c) for c in principle.structure.classes],
            "text": (
                f"Principle '{principle.id}' (class rank {rank}): "
                f"if {principle.condition.text()}, "
                f"then rank the options {principle.structure.text()}."
            ),
        },
        {
            "kind": "permissibility",
            "permitted": list(perm),
            "text": f"Under that ranking, the permissible options here are {perm_text}.",
        },
    )
    conclusion = {
        "kind": "conclusion",
        "permitted": list(perm),
        "text": f"Thus: in this case {perm_text} is permissible.",
    }
    return premises, conclusion


def build_case_layer(knowledge: Knowledge, scenario: Scenario) -> tuple[CaseArgument, ...]:
    """One argument per (consistent world, applicable principle) pair.

    Canonical order: world enumeration order, then principle class rank,
    then principle id.
    """
    args: list[CaseArgument] = []
    principles = [
        (scenario.principles.rank_of(p.id), p.id, p)
        for p in scenario.principles.all_principles()
    ]
    principles.sort(key=lambda item: (item[0], item[1]))
    for world in enumerate_consistent_worlds(knowledge, scenario.variables):
        prob = world_probability(world, knowledge, scenario.credences)
        for rank, _, principle in principles:
            if not applies(principle, world):
                continue
            perm = permissible_per_principle(principle, scenario.options, world)
            premises, conclusion = _case_premises(world, principle, rank, perm, prob)
            args.append(
                CaseArgument(
                    id=f"case:{len(args)}",
                    world=world,
                    principle_id=principle.id,
                    rank=rank,
                    perm_set=perm,
                    probability=prob,
                    premises=premises,
                    conclusion=conclusion,
                )
            )
    return tuple(args)


def pro_tanto_force(
    case_arg: CaseArgument,
    knowledge: Knowledge,
    credences: CredenceModel,
    relevance: RelevanceFunction,
    num_classes: int,
) -> Force:
    """Strength of one case argument: case probability times principle
    relevance; in lexicographic mode the probability lands in the tier of
    the principle's class."""
    prob = world_probability(case_arg.world, knowledge, credences)
    if relevance.mode == "lexicographic":
        tiers = [0.0] * num_classes
        tiers[case_arg.rank - 1] = prob
        return tuple(tiers)
    return prob * relevance.weight(case_arg.rank, num_classes)


def _force_json(force: Force):
    return list(force) if isinstance(force, tuple) else force


def build_aggregation_layer(
    v1: Sequence[CaseArgument],
    options,
    knowledge: Knowledge,
    credences: CredenceModel,
    relevance: RelevanceFunction,
    num_classes: int,
) -> tuple[tuple[OptionArgument, ...], tuple[GraphEdge, ...]]:
    """One argument per option permitted by at least one case argument, plus
    the weighted case-to-option edges. Strengths are plain sums of the
    supporting forces; nothing is thresholded away."""
    forces = {
        arg.id: pro_tanto_force(arg, knowledge, credences, relevance, num_classes)
        for arg in v1
    }
    supported = tuple(
        o for o in options if any(o in arg.perm_set for arg in v1)
    )
    v2: list[OptionArgument] = []
    e12: list[GraphEdge] = []
    for arg in v1:
        for option in arg.perm_set:
            e12.append(GraphEdge(arg.id, f"option:{option}", forces[arg.id]))
    for option in supported:
        support = tuple((arg.id, forces[arg.id]) for arg in v1 if option in arg.perm_set)
        strength: Force = zero_force(relevance.mode, num_classes)
        for _, force in support:
            strength = add_forces(strength, force)
        premises = tuple(
            {
                "kind": "reason",
                "case": case_id,
                "strength": _force_json(force),
                "text": (
                    f"There is a reason with strength {force_text(force)} "
                    f"for {option} (from {case_id})."
                ),
            }
            for case_id, force in support
        ) + (
            {
                "kind": "aggregation",
                "text": (
                    "Any number of reasons supporting the same option combine "
                    "into one overall reason whose strength is the sum of "
                    "their strengths."
                ),
            },
        )
        conclusion = {
            "kind": "conclusion",
            "option": option,
            "strength": _force_json(strength),
            "text": (
                f"Thus: there is an overall reason supporting {option} "
                f"with strength {force_text(strength)}."
            ),
        }
        v2.append(
            OptionArgument(
                id=f"option:{option}",
                option=option,
                support=support,
                strength=strength,
                premises=premises,
                conclusion=conclusion,
            )
        )
    return tuple(v2), tuple(e12)


# ---------------------------------------------------------------------------
# Decisions


def _final_argument(
    entries: Sequence[ScoreEntry], tie_set: tuple[str, ...], chosen: str, seed: int
) -> FinalArgument:
    premises = tuple(
        {
            "kind": "overall_reason",
            "option": e.option,
            "force": _force_json(e.force),
            "eu": e.eu,
            "score": _force_json(e.score),
            "text": (
                f"There is an overall reason supporting {e.option} with "
                f"strength {force_text(e.force)}; its expected utility is "
                f"{fmt4(e.eu)}, giving a combined score of {force_text(e.score)}."
            ),
        }
        for e in entries
    ) + (
        {
            "kind": "decision_rule",
            "tie_set": list(tie_set),
            "text": (
                "Perform one randomly picked option among those maximizing "
                "overall strength plus expected utility: "
                "{" + ", ".join(tie_set) + "}."
            ),
        },
    )
    conclusion = {
        "kind": "conclusion",
        "chosen": chosen,
        "text": f"Thus: perform {chosen}.",
    }
    return FinalArgument(
        id="final",
        entries=tuple(entries),
        chosen=chosen,
        tie_set=tie_set,
        seed=seed,
        premises=premises,
        conclusion=conclusion,
    )


def decide(
    knowledge: Knowledge,
    scenario: Scenario,
    seed: int,
    *,
    relevance: RelevanceFunction | None = None,
    eu_weight: float | None = None,
    timestamp: str | None = None,
) -> tuple[str, ArgumentationGraph]:
    """Build the full argumentation graph and make the interlocked decision.

    The candidates are the options supported by at least one case argument;
    the winner maximizes overall strength plus expected utility (ties broken
    uniformly by `seed`). When no principle applies in any consistent world,
    the decision falls back to the pure instrumental argmax over all options
    and the graph's provenance records the fallback.
    """
    if relevance is None:
        relevance = relevance_from_config(scenario.engine)
    if eu_weight is None:
        eu_weight = scenario.engine.eu_weight
    tol = scenario.engine.tolerance
    num_classes = scenario.principles.num_classes

    v1 = build_case_layer(knowledge, scenario)
    eus = {
        option: expected_utility(
            option,
            knowledge,
            scenario.outcome,
            scenario.utility,
            scenario.credences,
            scenario.variables,
        )
        for option in scenario.options
    }

    fallback: str | None = None
    if v1:
        v2, e12 = build_aggregation_layer(
            v1, scenario.options, knowledge, scenario.credences, relevance, num_classes
        )
        candidates = tuple(arg.option for arg in v2)
        strengths: dict[str, Force] = {arg.option: arg.strength for arg in v2}
    else:
        fallback = "instrumental"
        v2, e12 = (), ()
        candidates = tuple(scenario.options)
        strengths = {o: zero_force(relevance.mode, num_classes) for o in candidates}

    entries = tuple(
        ScoreEntry(
            option=o,
            force=strengths[o],
            eu=eus[o],
            score=combined_score(strengths[o], eus[o], eu_weight, relevance.mode),
        )
        for o in candidates
    )
    scores = {e.option: e.score for e in entries}
    tie_set = argmax_set(candidates, scores, tol)
    chosen = pick(tie_set, seed)
    final = _final_argument(entries, tie_set, chosen, seed)
    e23 = tuple(GraphEdge(arg.id, final.id, arg.strength) for arg in v2)

    provenance = Provenance(
        scenario=scenario.name,
        digest=scenario.digest(),
        knowledge=knowledge.known,
        seed=seed,
        engine={
            "relevance_mode": relevance.mode,
            "relevance_base": relevance.base,
            "relevance_weights": (
                {str(r): w for r, w in relevance.weights} if relevance.weights else None
            ),
            "eu_weight": eu_weight,
            "dilemma_policy": scenario.engine.dilemma_policy.value,
            "tolerance": tol,
        },
        fallback=fallback,
        timestamp=timestamp,
    )
    graph = ArgumentationGraph(v1=v1, v2=v2, v3=final, e12=e12, e23=e23, provenance=provenance)
    return chosen, graph


def sequential_decide(
    world: WorldState,
    knowledge: Knowledge,
    scenario: Scenario,
    seed: int,
    policy: DilemmaPolicy | None = None,
) -> str:
    """The idealized pipeline: deontic filter on the true world, then the
    expected-utility argmax over the survivors, then a seeded uniform pick.
    """
    if policy is None:
        policy = scenario.engine.dilemma_policy
    survivors = deontic_filter(scenario.principles, scenario.options, world, policy)
    ties = instrumental_choice(
        survivors,
        knowledge,
        scenario.outcome,
        scenario.utility,
        scenario.credences,
        scenario.variables,
        tol=scenario.engine.tolerance,
    )
    return pick(ties, seed)
