"""Independent brute-force recomputations used to cross-check the engine.

Everything here re-derives results from scenario *data* with plain loops:
no call ever reaches the code paths under test (enumeration, probability,
condition evaluation, kernel matching, aggregation, argmax, picking are all
reimplemented).
"""

from __future__ import annotations

import itertools
import operator
import random

_COMPARATORS = {
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}

TOL = 1e-9


def worlds(scenario, knowledge) -> list[dict]:
    """Filter the raw product space by agreement with the knowledge."""
    names = [v.name for v in scenario.variables]
    out = []
    for combo in itertools.product(*(v.domain for v in scenario.variables)):
        assignment = dict(zip(names, combo))
        if all(assignment[k] == v for k, v in knowledge.known.items()):
            out.append(assignment)
    return out


def probability(scenario, knowledge, assignment: dict) -> float:
    prob = 1.0
    for name in (v.name for v in scenario.variables):
        if name in knowledge.known:
            continue
        table = scenario.credences.tables[name]
        key = tuple(assignment[p] for p in table.parents)
        prob *= table.rows[key].get(assignment[name], 0.0)
    return prob


def condition_holds(expr, assignment: dict) -> bool:
    if isinstance(expr, bool):
        return expr
    op = expr[0]
    if op == "and":
        return all(condition_holds(sub, assignment) for sub in expr[1:])
    if op == "or":
        return any(condition_holds(sub, assignment) for sub in expr[1:])
    if op == "not":
        return not condition_holds(expr[1], assignment)
    return _COMPARATORS[op](assignment[expr[1]], expr[2])


def ranked_principles(scenario) -> list[tuple[int, object]]:
    """(rank, principle) pairs sorted by class rank then id."""
    pairs = []
    for rank, cls in enumerate(scenario.principles.classes, start=1):
        for principle in cls:
            pairs.append((rank, principle))
    pairs.sort(key=lambda item: (item[0], item[1].id))
    return pairs


def permitted(principle, options) -> tuple[str, ...]:
    top = set(principle.structure.classes[0])
    return tuple(o for o in options.options if o in top)


def applicable(scenario, assignment: dict) -> list[tuple[int, object]]:
    return [
        (rank, p)
        for rank, p in ranked_principles(scenario)
        if condition_holds(p.condition.expr, assignment)
    ]


def deontic_filter(scenario, assignment: dict, policy: str = "error"):
    """Returns the surviving options, or None for a true moral dilemma under
    the error policy."""
    applying = applicable(scenario, assignment)
    options = scenario.options.options
    if not applying:
        return tuple(options)
    top_rank = min(rank for rank, _ in applying)
    max_ranked = [p for rank, p in applying if rank == top_rank]
    perms = {p.id: permitted(p, scenario.options) for p in max_ranked}
    surviving = tuple(
        o for o in options if all(o in perm for perm in perms.values())
    )
    if surviving:
        return surviving
    if policy == "error":
        return None
    if policy == "union":
        union = set()
        for p in max_ranked:
            if set(perms[p.id]) != set(options):
                union |= set(perms[p.id])
        return tuple(o for o in options if o in union)
    return tuple(options)


def outcome_distribution(scenario, assignment: dict, option: str) -> dict:
    """First-match kernel walk; assignments are plain dicts keyed by name."""
    matched = None
    for rule in scenario.outcome.rules:
        if rule.option is not None and rule.option != option:
            continue
        if all(assignment.get(k) == v for k, v in rule.when.items()):
            matched = rule
            break
    if matched is None:
        if not scenario.outcome.default_self_loop:
            raise AssertionError("oracle hit a missing kernel entry")
        return {tuple(sorted(assignment.items())): 1.0}
    dist: dict = {}
    for prob, patch in matched.branches:
        successor = dict(assignment)
        successor.update(patch)
        key = tuple(sorted(successor.items()))
        dist[key] = dist.get(key, 0.0) + prob
    return dist


def utility_value(scenario, assignment: dict) -> float:
    for rule in scenario.utility.rules:
        if all(assignment.get(k) == v for k, v in rule.when.items()):
            return rule.value
    raise AssertionError("oracle found no utility rule")


def expected_utility(scenario, knowledge, option: str) -> float:
    """Literal two-stage sum: mix the kernel over sources into a distribution
    over every target world, then integrate the utility."""
    mixture: dict = {}
    for source in worlds(scenario, knowledge):
        p = probability(scenario, knowledge, source)
        if p == 0.0:
            continue
        for target_key, q in outcome_distribution(scenario, source, option).items():
            mixture[target_key] = mixture.get(target_key, 0.0) + p * q
    total = 0.0
    for target_key, mass in mixture.items():
        total += mass * utility_value(scenario, dict(target_key))
    return total


def relevance_weight(scenario, rank: int, base=None, weights=None) -> float:
    t = len(scenario.principles.classes)
    if weights is not None:
        return dict(weights)[rank]
    b = scenario.engine.relevance_base if base is None else base
    return b ** (t - rank)


def case_pairs(scenario, knowledge) -> list[tuple[dict, int, object]]:
    """(world, rank, principle) triples in canonical order."""
    pairs = []
    for assignment in worlds(scenario, knowledge):
        for rank, principle in ranked_principles(scenario):
            if condition_holds(principle.condition.expr, assignment):
                pairs.append((assignment, rank, principle))
    return pairs


def _lex_greater(a, b, tol):
    for x, y in zip(a, b):
        if x > y + tol:
            return True
        if x < y - tol:
            return False
    return False


def _argmax(candidates, scores, tol):
    best = None
    for option in candidates:
        if best is None or _lex_greater(scores[option], best, tol):
            best = scores[option]
    return tuple(
        o
        for o in candidates
        if all(abs(x - y) <= tol for x, y in zip(scores[o], best))
    )


def decide(
    scenario,
    knowledge,
    seed: int,
    *,
    mode: str | None = None,
    base: float | None = None,
    weights=None,
    eu_weight: float | None = None,
):
    """Full from-scratch recomputation of the interlocked decision.

    Returns (chosen, tie_set, candidates, strengths, eus).
    """
    mode = mode or scenario.engine.relevance_mode
    eu_w = scenario.engine.eu_weight if eu_weight is None else eu_weight
    t = len(scenario.principles.classes)
    pairs = case_pairs(scenario, knowledge)
    options = scenario.options.options

    def force(assignment, rank):
        p = probability(scenario, knowledge, assignment)
        if mode == "lexicographic":
            tiers = [0.0] * t
            tiers[rank - 1] = p
            return tuple(tiers)
        return p * relevance_weight(scenario, rank, base=base, weights=weights)

    supported = [
        o
        for o in options
        if any(o in permitted(pr, scenario.options) for _, _, pr in pairs)
    ]
    if supported:
        candidates = tuple(supported)
        strengths = {}
        for option in candidates:
            if mode == "lexicographic":
                total = (0.0,) * t
                for assignment, rank, principle in pairs:
                    if option in permitted(principle, scenario.options):
                        f = force(assignment, rank)
                        total = tuple(x + y for x, y in zip(total, f))
            else:
                total = 0.0
                for assignment, rank, principle in pairs:
                    if option in permitted(principle, scenario.options):
                        total += force(assignment, rank)
            strengths[option] = total
    else:
        candidates = tuple(options)
        strengths = {
            o: ((0.0,) * t if mode == "lexicographic" else 0.0) for o in options
        }

    eus = {o: expected_utility(scenario, knowledge, o) for o in candidates}
    scores = {}
    for option in candidates:
        if mode == "lexicographic":
            scores[option] = tuple(strengths[option]) + (eu_w * eus[option],)
        else:
            scores[option] = (strengths[option] + eu_w * eus[option],)
    tie_set = _argmax(candidates, scores, TOL)
    chosen = list(tie_set)[random.Random(seed).randrange(len(tie_set))]
    return chosen, tie_set, candidates, strengths, eus
