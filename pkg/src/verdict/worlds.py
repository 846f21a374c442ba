"""Finite-domain world states, partial knowledge, and credences.

A world state is a full assignment of the scenario's variables; knowledge is
a partial assignment (any subset of variables, not necessarily a prefix).
Credences are per-variable conditional probability tables whose conditioning
relation must be acyclic, so the joint probability of the unknown variables
factorizes in topological order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .errors import ContractError, ModelIncompleteError, ValidationError
from .validation import ValidationReport

Value = Union[str, int]

#: Absolute tolerance for probability-mass checks throughout the package.
PROB_TOL = 1e-9

#: Domains larger than this are rejected at validation; exhaustive case
#: enumeration is only meant for desk-scale variable spaces.
MAX_DOMAIN_SIZE = 512


@dataclass(frozen=True)
class VariableSpec:
    """A named variable with an ordered, finite domain."""

    name: str
    domain: tuple[Value, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        if not self.domain:
            raise ValidationError(f"variable {self.name!r} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise ValidationError(f"variable {self.name!r} has duplicate domain values")

    def is_integer(self) -> bool:
        return all(isinstance(v, int) and not isinstance(v, bool) for v in self.domain)


@dataclass(frozen=True)
class WorldState:
    """A full assignment: one value per declared variable, in declaration order."""

    names: tuple[str, ...]
    values: tuple[Value, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.names) != len(self.values):
            raise ValidationError(
                f"world state has {len(self.values)} values for {len(self.names)} variables"
            )
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    def value_of(self, name: str) -> Value:
        try:
            return self.values[self._index[name]]
        except KeyError:
            raise ValidationError(f"unknown variable {name!r}") from None

    def as_dict(self) -> dict[str, Value]:
        return dict(zip(self.names, self.values))

    def matches(self, pattern: Mapping[str, Value]) -> bool:
        """True when every (variable, value) pair of `pattern` holds here."""
        return all(self.value_of(n) == v for n, v in pattern.items())

    def patched(self, changes: Mapping[str, Value]) -> "WorldState":
        """A copy with the given variables overridden."""
        for name in changes:
            if name not in self._index:
                raise ValidationError(f"unknown variable {name!r} in patch")
        values = tuple(changes.get(n, v) for n, v in zip(self.names, self.values))
        return WorldState(self.names, values)

    def describe(self) -> str:
        return " ".join(f"{n}={v}" for n, v in zip(self.names, self.values))


@dataclass(frozen=True)
class Knowledge:
    """The agent's partial assignment: an arbitrary subset of the variables."""

    known: Mapping[str, Value]

    def __post_init__(self):
        object.__setattr__(self, "known", dict(self.known))

    @classmethod
    def empty(cls) -> "Knowledge":
        return cls({})

    def is_known(self, name: str) -> bool:
        return name in self.known

    def value_of(self, name: str) -> Value:
        return self.known[name]

    def agrees_with(self, world: WorldState) -> bool:
        return all(world.value_of(n) == v for n, v in self.known.items())


@dataclass(frozen=True)
class CredenceTable:
    """Conditional distribution for one variable given values of its parents.

    `rows` maps a tuple of parent values (in `parents` order) to a
    distribution over the variable's domain; missing domain values carry
    probability zero. An empty parent tuple gives an unconditional
    distribution with a single row keyed by ().
    """

    variable: str
    parents: tuple[str, ...]
    rows: Mapping[tuple[Value, ...], Mapping[Value, float]]

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(
            self, "rows", {tuple(k): dict(v) for k, v in dict(self.rows).items()}
        )

    def distribution(self, context: Mapping[str, Value]) -> Mapping[Value, float]:
        key = tuple(context[p] for p in self.parents)
        try:
            return self.rows[key]
        except KeyError:
            raise ModelIncompleteError(
                f"credence table for {self.variable!r} has no row for parents "
                f"{dict(zip(self.parents, key))}"
            ) from None

    def probability(self, value: Value, context: Mapping[str, Value]) -> float:
        return self.distribution(context).get(value, 0.0)


@dataclass(frozen=True)
class CredenceModel:
    """One conditional table per variable; conditioning must be acyclic."""

    tables: Mapping[str, CredenceTable]

    def __post_init__(self):
        object.__setattr__(self, "tables", dict(self.tables))

    def table_for(self, variable: str) -> CredenceTable:
        try:
            return self.tables[variable]
        except KeyError:
            raise ModelIncompleteError(f"no credence table for variable {variable!r}") from None

    def probability(self, variable: str, value: Value, context: Mapping[str, Value]) -> float:
        return self.table_for(variable).probability(value, context)


def _variable_list(scenario_or_variables) -> tuple[VariableSpec, ...]:
    """Accept a Scenario-like object (with .variables) or a plain sequence."""
    variables = getattr(scenario_or_variables, "variables", scenario_or_variables)
    return tuple(variables)


def _check_knowledge(knowledge: Knowledge, variables: Sequence[VariableSpec]) -> None:
    by_name = {v.name: v for v in variables}
    for name, value in knowledge.known.items():
        if name not in by_name:
            raise ValidationError(f"knowledge refers to undeclared variable {name!r}")
        if value not in by_name[name].domain:
            raise ValidationError(
                f"knowledge value {value!r} is outside the domain of {name!r}"
            )


def enumerate_consistent_worlds(knowledge: Knowledge, scenario) -> list[WorldState]:
    """All full world states agreeing with `knowledge`, in canonical order.

    Canonical order is lexicographic by variable declaration order, each
    variable running through its domain in declared order.
    """
    variables = _variable_list(scenario)
    _check_knowledge(knowledge, variables)
    names = tuple(v.name for v in variables)
    axes: list[Iterable[Value]] = [
        (knowledge.value_of(v.name),) if knowledge.is_known(v.name) else v.domain
        for v in variables
    ]
    return [WorldState(names, combo) for combo in itertools.product(*axes)]


def world_probability(world: WorldState, knowledge: Knowledge, model: CredenceModel) -> float:
    """Probability of `world` given `knowledge`: the product of the credence
    table entries of the unknown variables (1.0 when everything is known).
    """
    if not knowledge.agrees_with(world):
        raise ContractError(
            f"world {world.describe()} is inconsistent with knowledge {knowledge.known}"
        )
    context = world.as_dict()
    prob = 1.0
    for name in world.names:
        if knowledge.is_known(name):
            continue
        prob *= model.probability(name, world.value_of(name), context)
    return prob


def validate_credences(model: CredenceModel, scenario) -> ValidationReport:
    """Check normalization, probability ranges, row coverage, and acyclicity."""
    variables = _variable_list(scenario)
    by_name = {v.name: v for v in variables}
    report = ValidationReport()

    for v in variables:
        if v.name not in model.tables:
            report.error(f"credences.{v.name}", "no credence table for this variable")

    for name, table in model.tables.items():
        path = f"credences.{name}"
        if name not in by_name:
            report.error(path, "table for undeclared variable")
            continue
        domain = set(by_name[name].domain)
        for parent in table.parents:
            if parent not in by_name:
                report.error(path, f"conditioned on undeclared variable {parent!r}")
            elif parent == name:
                report.error(path, "variable conditioned on itself")
        parent_specs = [by_name[p] for p in table.parents if p in by_name]
        if len(parent_specs) == len(table.parents):
            expected_rows = set(itertools.product(*(p.domain for p in parent_specs)))
            missing = expected_rows - set(table.rows)
            if missing:
                report.error(
                    path, f"missing rows for {len(missing)} parent combination(s)"
                )
            extra = set(table.rows) - expected_rows
            if extra:
                report.error(path, f"rows for invalid parent values: {sorted(map(str, extra))}")
        for key, dist in table.rows.items():
            row_path = f"{path}.rows[{','.join(map(str, key))}]"
            unknown_values = set(dist) - domain
            if unknown_values:
                report.error(
                    row_path,
                    f"probabilities for values outside the domain: {sorted(map(str, unknown_values))}",
                )
            for value, p in dist.items():
                if not 0.0 <= p <= 1.0:
                    report.error(row_path, f"probability {p!r} for {value!r} is outside [0, 1]")
            mass = sum(dist.values())
            if abs(mass - 1.0) > PROB_TOL:
                report.error(row_path, f"distribution sums to {mass!r}, not 1")

    # Cycle detection over the conditioning relation (variable -> parent).
    edges = {
        name: [p for p in table.parents if p in by_name]
        for name, table in model.tables.items()
        if name in by_name
    }
    state: dict[str, int] = {}  # 0 = visiting, 1 = done

    def visit(node: str, stack: list[str]) -> list[str] | None:
        if state.get(node) == 1:
            return None
        if state.get(node) == 0:
            return stack[stack.index(node):] + [node]
        state[node] = 0
        stack.append(node)
        for parent in edges.get(node, ()):
            cycle = visit(parent, stack)
            if cycle:
                return cycle
        stack.pop()
        state[node] = 1
        return None

    for name in edges:
        cycle = visit(name, [])
        if cycle:
            report.error("credences", f"conditioning cycle: {' -> '.join(cycle)}")
            break

    return report
