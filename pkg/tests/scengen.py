"""Random scenario generator for property and acceptance tests.

Everything is driven by a caller-supplied random.Random so failures are
reproducible from a single integer seed.
"""

from __future__ import annotations

import random

from verdict.conditions import Condition
from verdict.instrumental import (
    OptionSet,
    OutcomeModel,
    OutcomeRule,
    UtilityFunction,
    UtilityRule,
)
from verdict.principles import OptionStructure, Principle, PrincipleStructure
from verdict.scenario import EngineConfig, Scenario, validate_scenario
from verdict.worlds import CredenceModel, CredenceTable, Knowledge, VariableSpec

_LETTERS = ("a", "b", "c", "d")


def _random_domain(rng: random.Random, max_domain: int):
    size = rng.randint(2, max_domain) if max_domain >= 2 else 1
    if rng.random() < 0.5:
        return tuple(range(size))
    return _LETTERS[:size]


def _random_distribution(rng: random.Random, domain) -> dict:
    weights = [rng.random() + 0.05 for _ in domain]
    if len(domain) > 1 and rng.random() < 0.25:
        weights[rng.randrange(len(domain))] = 0.0  # exercise zero-probability worlds
    total = sum(weights)
    return {value: w / total for value, w in zip(domain, weights)}


def _random_variables(rng, max_vars, max_domain):
    count = rng.randint(1, max_vars)
    return tuple(
        VariableSpec(f"v{i}", _random_domain(rng, max_domain)) for i in range(count)
    )


def _random_credences(rng, variables) -> CredenceModel:
    tables = {}
    for i, spec in enumerate(variables):
        candidates = [v.name for v in variables[:i]]
        parents = tuple(p for p in candidates if rng.random() < 0.3)[:2]
        parent_domains = [v.domain for v in variables if v.name in parents]
        rows = {}
        import itertools

        for combo in itertools.product(*parent_domains):
            rows[combo] = _random_distribution(rng, spec.domain)
        tables[spec.name] = CredenceTable(spec.name, parents, rows)
    return CredenceModel(tables)


def _random_pattern(rng, variables, max_vars=2) -> dict:
    chosen = [v for v in variables if rng.random() < 0.4][:max_vars]
    return {v.name: rng.choice(v.domain) for v in chosen}


def _random_outcome(rng, variables, options) -> OutcomeModel:
    default_self_loop = rng.random() < 0.3
    rules = []
    for option in options:
        if default_self_loop and rng.random() < 0.4:
            continue  # this option rides the self-loop default
        if rng.random() < 0.3:
            rules.append(
                OutcomeRule(
                    _random_pattern(rng, variables),
                    option,
                    _random_branches(rng, variables),
                )
            )
        rules.append(OutcomeRule({}, option, _random_branches(rng, variables)))
    return OutcomeModel(tuple(rules), default_self_loop=default_self_loop)


def _random_branches(rng, variables):
    count = rng.randint(1, 3)
    weights = [rng.random() + 0.05 for _ in range(count)]
    total = sum(weights)
    branches = []
    for w in weights:
        patch = _random_pattern(rng, variables)
        branches.append((w / total, patch))
    return tuple(branches)


def _random_utility(rng, variables) -> UtilityFunction:
    rules = [
        UtilityRule(_random_pattern(rng, variables), rng.uniform(-10, 10))
        for _ in range(rng.randint(0, 3))
    ]
    rules.append(UtilityRule({}, rng.uniform(-10, 10)))
    return UtilityFunction(tuple(rules))


def _random_atom(rng, variables):
    spec = rng.choice(variables)
    if spec.is_integer():
        op = rng.choice(("==", "!=", "<", "<=", ">", ">="))
        if op in ("==", "!="):
            return [op, spec.name, rng.choice(spec.domain)]
        low = min(spec.domain) - 1
        high = max(spec.domain) + 1
        return [op, spec.name, rng.randint(low, high)]
    op = rng.choice(("==", "!="))
    return [op, spec.name, rng.choice(spec.domain)]


def random_condition_doc(rng, variables, depth: int = 2):
    roll = rng.random()
    if depth <= 0 or roll < 0.55:
        return _random_atom(rng, variables)
    if roll < 0.65:
        return ["not", random_condition_doc(rng, variables, depth - 1)]
    op = rng.choice(("and", "or"))
    return [
        op,
        random_condition_doc(rng, variables, depth - 1),
        random_condition_doc(rng, variables, depth - 1),
    ]


def _random_option_structure(rng, options) -> OptionStructure:
    shuffled = list(options)
    rng.shuffle(shuffled)
    first = max(1, rng.randint(1, len(shuffled)))
    classes = [tuple(shuffled[:first])]
    rest = shuffled[first:]
    if rest and rng.random() < 0.5:
        second = rng.randint(1, len(rest))
        classes.append(tuple(rest[:second]))
    return OptionStructure(tuple(classes))


def _random_principles(rng, variables, options, max_principles) -> PrincipleStructure:
    count = rng.randint(0, max_principles)
    principles = [
        Principle(
            f"p{i}",
            Condition.from_json(random_condition_doc(rng, variables)),
            _random_option_structure(rng, options),
        )
        for i in range(count)
    ]
    if not principles:
        return PrincipleStructure.empty()
    rng.shuffle(principles)
    class_count = rng.randint(1, min(3, len(principles)))
    classes: list[list[Principle]] = [[] for _ in range(class_count)]
    for i, principle in enumerate(principles):
        classes[i % class_count].append(principle)
    return PrincipleStructure(tuple(tuple(c) for c in classes))


def random_scenario(
    rng: random.Random,
    *,
    max_vars: int = 4,
    max_domain: int = 3,
    max_options: int = 5,
    max_principles: int = 6,
    relevance_mode: str | None = None,
) -> Scenario:
    variables = _random_variables(rng, max_vars, max_domain)
    options = OptionSet(tuple(f"o{i}" for i in range(rng.randint(2, max_options))))
    mode = relevance_mode or rng.choice(("archimedean", "lexicographic"))
    scenario = Scenario(
        name=f"random-{rng.randrange(10**9)}",
        variables=variables,
        credences=_random_credences(rng, variables),
        options=options,
        outcome=_random_outcome(rng, variables, options),
        utility=_random_utility(rng, variables),
        principles=_random_principles(rng, variables, options, max_principles),
        engine=EngineConfig(
            relevance_mode=mode,
            relevance_base=rng.choice((2.0, 10.0)),
        ),
    )
    report = validate_scenario(scenario)
    assert report.ok, f"generator produced an invalid scenario: {report.format()}"
    return scenario


def random_knowledge(rng: random.Random, scenario: Scenario, full: bool = False) -> Knowledge:
    known = {}
    for spec in scenario.variables:
        if full or rng.random() < 0.4:
            known[spec.name] = rng.choice(spec.domain)
    return Knowledge(known)
