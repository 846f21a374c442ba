"""Scenario files: parsing, validation, and canonical serialization.

A scenario bundles everything one decision needs: variables, credences,
options, the outcome kernel, utilities, the principle hierarchy, and engine
configuration. The on-disk format is JSON with a top-level
``schema_version: "1"``; see docs/scenario-schema.md for the full schema.
Probabilities and utility values may be written as numbers or as exact
fraction strings like ``"1/3"``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Mapping

from .conditions import Condition, validate_condition
from .errors import ScenarioError, ValidationError
from .instrumental import OptionSet, OutcomeModel, OutcomeRule, UtilityFunction, UtilityRule
from .principles import (
    DilemmaPolicy,
    OptionStructure,
    Principle,
    PrincipleStructure,
)
from .validation import ValidationReport
from .worlds import (
    MAX_DOMAIN_SIZE,
    PROB_TOL,
    CredenceModel,
    CredenceTable,
    Knowledge,
    Value,
    VariableSpec,
    validate_credences,
)

SCHEMA_VERSION = "1"

#: Totality checks enumerate the full state space only below this size.
_TOTALITY_CHECK_LIMIT = 50_000


@dataclass(frozen=True)
class EngineConfig:
    """Knobs for the argumentation engine and the sequential pipeline."""

    relevance_mode: str = "archimedean"
    relevance_base: float = 10.0
    relevance_weights: tuple[tuple[int, float], ...] | None = None
    dilemma_policy: DilemmaPolicy = DilemmaPolicy.ERROR
    eu_weight: float = 1.0
    tolerance: float = 1e-9

    def weights_map(self) -> dict[int, float] | None:
        return dict(self.relevance_weights) if self.relevance_weights else None


@dataclass(frozen=True)
class Scenario:
    """The immutable, fully cross-referenced decision model."""

    name: str
    variables: tuple[VariableSpec, ...]
    credences: CredenceModel
    options: OptionSet
    outcome: OutcomeModel
    utility: UtilityFunction
    principles: PrincipleStructure
    engine: EngineConfig = field(default_factory=EngineConfig)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))

    @property
    def variable_map(self) -> dict[str, VariableSpec]:
        return {v.name: v for v in self.variables}

    def digest(self) -> str:
        """Stable content digest of the canonical serialization."""
        return hashlib.sha256(serialize_scenario(self).encode("utf-8")).hexdigest()[:12]

    def with_engine(self, **changes) -> "Scenario":
        return replace(self, engine=replace(self.engine, **changes))


# ---------------------------------------------------------------------------
# Parsing


def _num(value, path: str, report: ValidationReport) -> float | None:
    """A JSON number or an exact fraction string 'p/q'."""
    if isinstance(value, bool):
        report.error(path, f"expected a number, got {value!r}")
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value))
        except (ValueError, ZeroDivisionError):
            report.error(path, f"not a number or 'p/q' fraction: {value!r}")
            return None
    report.error(path, f"expected a number, got {value!r}")
    return None


def _domain_value(value, path: str, report: ValidationReport) -> Value | None:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        report.error(path, f"domain values must be strings or integers, got {value!r}")
        return None
    return value


def _expect(doc, key: str, kind, path: str, report: ValidationReport, default=None):
    if key not in doc:
        if default is not None:
            return default
        report.error(path, f"missing required field {key!r}")
        return None
    value = doc[key]
    if not isinstance(value, kind):
        report.error(f"{path}.{key}", f"expected {kind.__name__}, got {type(value).__name__}")
        return None
    return value


def _parse_variables(doc, report: ValidationReport) -> tuple[VariableSpec, ...]:
    out: list[VariableSpec] = []
    seen: set[str] = set()
    entries = _expect(doc, "variables", list, "$", report) or []
    for i, entry in enumerate(entries):
        path = f"variables[{i}]"
        if not isinstance(entry, dict):
            report.error(path, "each variable must be an object with name and domain")
            continue
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            report.error(path, f"bad variable name {name!r}")
            continue
        if name in seen:
            report.error(path, f"duplicate variable name {name!r}")
            continue
        raw_domain = entry.get("domain")
        if not isinstance(raw_domain, list) or not raw_domain:
            report.error(path, "domain must be a non-empty array")
            continue
        domain = []
        for j, raw in enumerate(raw_domain):
            value = _domain_value(raw, f"{path}.domain[{j}]", report)
            if value is not None:
                domain.append(value)
        if len(domain) != len(raw_domain):
            continue
        if len(set(domain)) != len(domain):
            report.error(path, "domain has duplicate values")
            continue
        if len(domain) > MAX_DOMAIN_SIZE:
            report.error(
                path,
                f"domain of size {len(domain)} exceeds the supported maximum "
                f"of {MAX_DOMAIN_SIZE}; enumerate-all-cases reasoning needs "
                "small finite domains",
            )
            continue
        types = {type(v) for v in domain}
        if len(types) > 1:
            report.error(path, "domain mixes strings and integers")
            continue
        seen.add(name)
        out.append(VariableSpec(name, tuple(domain)))
    return tuple(out)


def _parse_credences(doc, variables, report: ValidationReport) -> CredenceModel:
    tables: dict[str, CredenceTable] = {}
    section = _expect(doc, "credences", dict, "$", report)
    if section is None:
        return CredenceModel({})
    by_name = {v.name: v for v in variables}
    for name, spec in section.items():
        path = f"credences.{name}"
        if not isinstance(spec, dict):
            report.error(path, "expected an object with optional parents and a table")
            continue
        parents = spec.get("parents", [])
        if not isinstance(parents, list) or not all(isinstance(p, str) for p in parents):
            report.error(path, "parents must be an array of variable names")
            continue
        rows_doc = spec.get("table")
        if not isinstance(rows_doc, list) or not rows_doc:
            report.error(path, "table must be a non-empty array of rows")
            continue
        rows: dict[tuple[Value, ...], dict[Value, float]] = {}
        for i, row in enumerate(rows_doc):
            row_path = f"{path}.table[{i}]"
            if not isinstance(row, dict):
                report.error(row_path, "each row must be an object")
                continue
            given = row.get("given", {})
            if not isinstance(given, dict):
                report.error(row_path, "given must be an object of parent values")
                continue
            if set(given) != set(parents):
                report.error(
                    row_path,
                    f"given must assign exactly the parents {sorted(parents)}, "
                    f"got {sorted(given)}",
                )
                continue
            key = tuple(given[p] for p in parents)
            if key in rows:
                report.error(row_path, "duplicate row for the same parent values")
                continue
            probs_doc = row.get("probs")
            if not isinstance(probs_doc, dict):
                report.error(row_path, "probs must be an object value -> probability")
                continue
            domain = by_name[name].domain if name in by_name else None
            probs: dict[Value, float] = {}
            for raw_value, raw_p in probs_doc.items():
                # JSON object keys are strings; map back to integer domain values.
                value: Value = raw_value
                if domain is not None and raw_value not in domain:
                    try:
                        as_int = int(raw_value)
                    except ValueError:
                        as_int = None
                    if as_int is not None and as_int in domain:
                        value = as_int
                p = _num(raw_p, f"{row_path}.probs[{raw_value}]", report)
                if p is not None:
                    probs[value] = p
            rows[key] = probs
        tables[name] = CredenceTable(name, tuple(parents), rows)
    return CredenceModel(tables)


def _parse_pattern(doc, path: str, report: ValidationReport) -> dict[str, Value]:
    if not isinstance(doc, dict):
        report.error(path, "pattern must be an object of variable -> value")
        return {}
    pattern: dict[str, Value] = {}
    for name, raw in doc.items():
        value = _domain_value(raw, f"{path}.{name}", report)
        if value is not None:
            pattern[name] = value
    return pattern


def _parse_outcome(doc, report: ValidationReport) -> OutcomeModel:
    section = _expect(doc, "outcome", dict, "$", report)
    if section is None:
        return OutcomeModel((), default_self_loop=True)
    default_self_loop = section.get("default_self_loop", True)
    if not isinstance(default_self_loop, bool):
        report.error("outcome.default_self_loop", "expected true or false")
        default_self_loop = True
    rules: list[OutcomeRule] = []
    for i, rule_doc in enumerate(section.get("rules", [])):
        path = f"outcome.rules[{i}]"
        if not isinstance(rule_doc, dict):
            report.error(path, "each rule must be an object")
            continue
        when = _parse_pattern(rule_doc.get("when", {}), f"{path}.when", report)
        option = rule_doc.get("option")
        if option is not None and not isinstance(option, str):
            report.error(f"{path}.option", "option must be a string or null")
            continue
        branches: list[tuple[float, dict[str, Value]]] = []
        branch_docs = rule_doc.get("branches")
        if not isinstance(branch_docs, list) or not branch_docs:
            report.error(path, "branches must be a non-empty array")
            continue
        for j, branch in enumerate(branch_docs):
            bpath = f"{path}.branches[{j}]"
            if not isinstance(branch, dict):
                report.error(bpath, "each branch must be an object")
                continue
            p = _num(branch.get("prob", 1.0), f"{bpath}.prob", report)
            patch = _parse_pattern(branch.get("set", {}), f"{bpath}.set", report)
            if p is not None:
                branches.append((p, patch))
        rules.append(OutcomeRule(when, option, tuple(branches)))
    return OutcomeModel(tuple(rules), default_self_loop=default_self_loop)


def _parse_utility(doc, report: ValidationReport) -> UtilityFunction:
    section = _expect(doc, "utility", dict, "$", report)
    if section is None:
        return UtilityFunction((UtilityRule({}, 0.0),))
    rules: list[UtilityRule] = []
    for i, rule_doc in enumerate(section.get("rules", [])):
        path = f"utility.rules[{i}]"
        if not isinstance(rule_doc, dict):
            report.error(path, "each rule must be an object")
            continue
        when = _parse_pattern(rule_doc.get("when", {}), f"{path}.when", report)
        value = _num(rule_doc.get("value", 0.0), f"{path}.value", report)
        if value is not None:
            rules.append(UtilityRule(when, value))
    return UtilityFunction(tuple(rules))


def _parse_principles(doc, report: ValidationReport) -> PrincipleStructure:
    section = doc.get("principles", {"classes": []})
    if not isinstance(section, dict):
        report.error("principles", "expected an object with a classes array")
        return PrincipleStructure.empty()
    classes_doc = section.get("classes", [])
    if not isinstance(classes_doc, list):
        report.error("principles.classes", "expected an array of principle classes")
        return PrincipleStructure.empty()
    classes: list[tuple[Principle, ...]] = []
    for i, cls_doc in enumerate(classes_doc):
        cls_path = f"principles.classes[{i}]"
        if not isinstance(cls_doc, list) or not cls_doc:
            report.error(cls_path, "each class must be a non-empty array of principles")
            continue
        members: list[Principle] = []
        for j, p_doc in enumerate(cls_doc):
            path = f"{cls_path}[{j}]"
            if not isinstance(p_doc, dict):
                report.error(path, "each principle must be an object")
                continue
            pid = p_doc.get("id")
            if not isinstance(pid, str) or not pid:
                report.error(path, f"bad principle id {pid!r}")
                continue
            try:
                condition = Condition.from_json(p_doc.get("condition", True))
            except ValidationError as exc:
                report.error(f"{path}.condition", str(exc))
                continue
            prefer = p_doc.get("prefer")
            if (
                not isinstance(prefer, list)
                or not prefer
                or not all(isinstance(cls, list) for cls in prefer)
            ):
                report.error(f"{path}.prefer", "prefer must be an array of option arrays")
                continue
            try:
                structure = OptionStructure(tuple(tuple(c) for c in prefer))
            except ValidationError as exc:
                report.error(f"{path}.prefer", str(exc))
                continue
            members.append(Principle(pid, condition, structure))
        if members:
            classes.append(tuple(members))
    try:
        return PrincipleStructure(tuple(classes))
    except ValidationError as exc:
        report.error("principles", str(exc))
        return PrincipleStructure.empty()


def _parse_engine(doc, report: ValidationReport) -> EngineConfig:
    section = doc.get("engine", {})
    if not isinstance(section, dict):
        report.error("engine", "expected an object")
        return EngineConfig()
    relevance = section.get("relevance", {})
    if not isinstance(relevance, dict):
        report.error("engine.relevance", "expected an object")
        relevance = {}
    mode = relevance.get("mode", "archimedean")
    base_raw = _num(relevance.get("base", 10.0), "engine.relevance.base", report)
    base = 10.0 if base_raw is None else base_raw
    weights_doc = relevance.get("weights")
    weights: tuple[tuple[int, float], ...] | None = None
    if weights_doc is not None:
        if not isinstance(weights_doc, dict):
            report.error("engine.relevance.weights", "expected an object rank -> weight")
        else:
            pairs: list[tuple[int, float]] = []
            for rank_str, raw in weights_doc.items():
                path = f"engine.relevance.weights[{rank_str}]"
                try:
                    rank = int(rank_str)
                except ValueError:
                    report.error(path, "rank keys must be integers")
                    continue
                w = _num(raw, path, report)
                if w is not None:
                    pairs.append((rank, w))
            weights = tuple(sorted(pairs))
    policy_str = section.get("dilemma_policy", DilemmaPolicy.ERROR.value)
    try:
        policy = DilemmaPolicy(policy_str)
    except ValueError:
        report.error(
            "engine.dilemma_policy",
            f"unknown policy {policy_str!r}; expected one of "
            f"{[p.value for p in DilemmaPolicy]}",
        )
        policy = DilemmaPolicy.ERROR
    eu_weight = _num(section.get("eu_weight", 1.0), "engine.eu_weight", report)
    tolerance = _num(section.get("tolerance", 1e-9), "engine.tolerance", report)
    return EngineConfig(
        relevance_mode=mode,
        relevance_base=base,
        relevance_weights=weights,
        dilemma_policy=policy,
        eu_weight=1.0 if eu_weight is None else eu_weight,
        tolerance=1e-9 if tolerance is None else tolerance,
    )


def build_scenario(doc: Mapping[str, Any], report: ValidationReport) -> Scenario | None:
    """Construct a Scenario from a parsed JSON document, collecting issues.

    Returns None when the document is too broken to build at all.
    """
    if not isinstance(doc, Mapping):
        report.error("$", "scenario document must be a JSON object")
        return None
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        report.error(
            "schema_version", f"expected {SCHEMA_VERSION!r}, got {version!r}"
        )
    name = doc.get("name", "scenario")
    if not isinstance(name, str):
        report.error("name", "name must be a string")
        name = "scenario"
    variables = _parse_variables(doc, report)
    credences = _parse_credences(doc, variables, report)
    options_doc = _expect(doc, "options", list, "$", report)
    if not options_doc or not all(isinstance(o, str) for o in options_doc):
        report.error("options", "options must be a non-empty array of strings")
        return None
    try:
        options = OptionSet(tuple(options_doc))
    except ValidationError as exc:
        report.error("options", str(exc))
        return None
    outcome = _parse_outcome(doc, report)
    utility = _parse_utility(doc, report)
    principles = _parse_principles(doc, report)
    engine = _parse_engine(doc, report)
    if report.errors:
        return None
    return Scenario(
        name=name,
        variables=variables,
        credences=credences,
        options=options,
        outcome=outcome,
        utility=utility,
        principles=principles,
        engine=engine,
    )


def check_scenario_payload(payload: str | bytes) -> tuple[Scenario | None, ValidationReport]:
    """Parse and validate, returning the scenario (if buildable) plus every issue."""
    report = ValidationReport()
    if isinstance(payload, bytes):
        try:
            payload = payload.decode("utf-8")
        except UnicodeDecodeError as exc:
            report.error("$", f"not valid UTF-8: {exc}")
            return None, report
    try:
        doc = json.loads(payload)
    except json.JSONDecodeError as exc:
        report.error(f"line {exc.lineno}, column {exc.colno}", f"JSON syntax error: {exc.msg}")
        return None, report
    scenario = build_scenario(doc, report)
    if scenario is None:
        return None, report
    report.extend(validate_scenario(scenario))
    return scenario, report


def parse_scenario(payload: str | bytes) -> Scenario:
    """Parse a scenario document; raise ScenarioError listing every problem."""
    scenario, report = check_scenario_payload(payload)
    if scenario is None or not report.ok:
        raise ScenarioError(report.errors)
    return scenario


def load_scenario(path) -> Scenario:
    with open(path, "rb") as fh:
        return parse_scenario(fh.read())


def parse_knowledge(payload: str | bytes, scenario: Scenario | None = None) -> Knowledge:
    """Parse a knowledge document: a flat JSON object of variable -> value."""
    if isinstance(payload, bytes):
        payload = payload.decode("utf-8")
    doc = json.loads(payload)
    if not isinstance(doc, dict):
        raise ValidationError("knowledge document must be a JSON object")
    known: dict[str, Value] = {}
    domains = scenario.variable_map if scenario is not None else None
    for name, value in doc.items():
        if isinstance(value, bool) or not isinstance(value, (str, int)):
            raise ValidationError(f"bad knowledge value for {name!r}: {value!r}")
        if domains is not None:
            if name not in domains:
                raise ValidationError(f"knowledge refers to undeclared variable {name!r}")
            if value not in domains[name].domain:
                raise ValidationError(
                    f"knowledge value {value!r} is outside the domain of {name!r}"
                )
        known[name] = value
    return Knowledge(known)


# ---------------------------------------------------------------------------
# Validation


def _validate_pattern(pattern, variable_map, path: str, report: ValidationReport) -> None:
    for name, value in pattern.items():
        if name not in variable_map:
            report.error(path, f"pattern references undeclared variable {name!r}")
        elif value not in variable_map[name].domain:
            report.error(
                path, f"pattern value {value!r} is outside the domain of {name!r}"
            )


def validate_scenario(scenario: Scenario) -> ValidationReport:
    """Semantic validation across every sub-model; never raises."""
    report = ValidationReport()
    variable_map = scenario.variable_map

    report.extend(validate_credences(scenario.credences, scenario.variables))

    # Outcome kernel.
    for i, rule in enumerate(scenario.outcome.rules):
        path = f"outcome.rules[{i}]"
        _validate_pattern(rule.when, variable_map, f"{path}.when", report)
        if rule.option is not None and rule.option not in scenario.options:
            report.error(f"{path}.option", f"unknown option {rule.option!r}")
        mass = 0.0
        for j, (prob, patch) in enumerate(rule.branches):
            bpath = f"{path}.branches[{j}]"
            if not 0.0 <= prob <= 1.0:
                report.error(bpath, f"branch probability {prob!r} is outside [0, 1]")
            mass += prob
            _validate_pattern(patch, variable_map, f"{bpath}.set", report)
        if abs(mass - 1.0) > PROB_TOL:
            report.error(path, f"branch probabilities sum to {mass!r}, not 1")
    if scenario.outcome.default_self_loop:
        report.warning(
            "outcome",
            "default_self_loop is enabled: unlisted (world, option) pairs keep "
            "the state unchanged",
        )
    else:
        space = 1
        for v in scenario.variables:
            space *= len(v.domain)
        if space * len(scenario.options) <= _TOTALITY_CHECK_LIMIT:
            from .worlds import enumerate_consistent_worlds

            for world in enumerate_consistent_worlds(Knowledge.empty(), scenario.variables):
                for option in scenario.options:
                    if scenario.outcome.rule_for(world, option) is None:
                        report.error(
                            "outcome",
                            f"no rule covers option {option!r} in world "
                            f"{world.describe()} and default_self_loop is off",
                        )
                        break
                else:
                    continue
                break
        else:
            report.warning(
                "outcome",
                "state space too large for a kernel totality check; missing "
                "entries will fail at decision time",
            )

    # Utility totality: a catch-all (empty pattern) rule is required.
    for i, rule in enumerate(scenario.utility.rules):
        _validate_pattern(rule.when, variable_map, f"utility.rules[{i}].when", report)
    if not any(not rule.when for rule in scenario.utility.rules):
        report.error("utility", "no catch-all rule (empty when) — utility is not total")

    # Principles.
    for rank, cls in enumerate(scenario.principles.classes, start=1):
        for principle in cls:
            path = f"principles.{principle.id}"
            for problem in validate_condition(principle.condition, variable_map):
                report.error(f"{path}.condition", problem)
            mentioned = {o for c in principle.structure.classes for o in c}
            stray = mentioned - set(scenario.options.options)
            if stray:
                report.error(
                    f"{path}.prefer", f"unknown options {sorted(stray)} in option structure"
                )

    # Engine configuration.
    cfg = scenario.engine
    if cfg.relevance_mode not in ("archimedean", "lexicographic"):
        report.error("engine.relevance.mode", f"unknown mode {cfg.relevance_mode!r}")
    if cfg.relevance_mode == "archimedean" and cfg.relevance_base <= 1.0:
        report.error("engine.relevance.base", "base must be greater than 1")
    weights = cfg.weights_map()
    if weights is not None:
        t = scenario.principles.num_classes
        expected = set(range(1, t + 1))
        if set(weights) != expected:
            report.error(
                "engine.relevance.weights",
                f"weights must cover exactly the class ranks {sorted(expected)}",
            )
        else:
            ordered = [weights[r] for r in range(1, t + 1)]
            if any(w <= 0 for w in ordered):
                report.error("engine.relevance.weights", "weights must be positive")
            if any(a <= b for a, b in zip(ordered, ordered[1:])):
                report.error(
                    "engine.relevance.weights",
                    "weights must strictly decrease with class rank",
                )
    if cfg.eu_weight < 0:
        report.error("engine.eu_weight", "eu_weight must be non-negative")
    if cfg.tolerance <= 0:
        report.error("engine.tolerance", "tolerance must be positive")

    return report


# ---------------------------------------------------------------------------
# Serialization


def scenario_to_doc(scenario: Scenario) -> dict[str, Any]:
    """The canonical JSON-ready document for a scenario."""
    credences: dict[str, Any] = {}
    for name in sorted(scenario.credences.tables):
        table = scenario.credences.tables[name]
        rows = []
        for key in sorted(table.rows, key=lambda k: tuple(map(str, k))):
            probs = table.rows[key]
            rows.append(
                {
                    "given": dict(zip(table.parents, key)),
                    "probs": {str(v): p for v, p in sorted(probs.items(), key=lambda kv: str(kv[0]))},
                }
            )
        credences[name] = {"parents": list(table.parents), "table": rows}
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "name": scenario.name,
        "variables": [
            {"name": v.name, "domain": list(v.domain)} for v in scenario.variables
        ],
        "credences": credences,
        "options": list(scenario.options.options),
        "outcome": {
            "default_self_loop": scenario.outcome.default_self_loop,
            "rules": [
                {
                    "when": dict(rule.when),
                    "option": rule.option,
                    "branches": [
                        {"prob": prob, "set": dict(patch)} for prob, patch in rule.branches
                    ],
                }
                for rule in scenario.outcome.rules
            ],
        },
        "utility": {
            "rules": [
                {"when": dict(rule.when), "value": rule.value}
                for rule in scenario.utility.rules
            ]
        },
        "principles": {
            "classes": [
                [
                    {
                        "id": p.id,
                        "condition": p.condition.to_json(),
                        "prefer": [list(c) for c in p.structure.classes],
                    }
                    for p in cls
                ]
                for cls in scenario.principles.classes
            ]
        },
        "engine": {
            "relevance": {
                "mode": scenario.engine.relevance_mode,
                "base": scenario.engine.relevance_base,
                "weights": (
                    {str(rank): w for rank, w in scenario.engine.relevance_weights}
                    if scenario.engine.relevance_weights
                    else None
                ),
            },
            "dilemma_policy": scenario.engine.dilemma_policy.value,
            "eu_weight": scenario.engine.eu_weight,
            "tolerance": scenario.engine.tolerance,
        },
    }
    return doc


def serialize_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_doc(scenario), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
