"""Ethically constrained decision-making with argumentation-graph explanations.

The engine enumerates every world state consistent with the agent's partial
knowledge, pairs each with the moral principles that apply there, aggregates
the resulting weighted reasons per option, and decides by maximizing overall
normative strength plus expected utility. The full three-layer graph behind
each decision is kept and can be rendered as JSON, DOT, or text.
"""

from .conditions import Condition
from .engine import (
    ArgumentationGraph,
    CaseArgument,
    FinalArgument,
    OptionArgument,
    RelevanceFunction,
    build_aggregation_layer,
    build_case_layer,
    decide,
    pro_tanto_force,
    sequential_decide,
)
from .errors import (
    ContractError,
    DilemmaError,
    ModelIncompleteError,
    ScenarioError,
    ValidationError,
    VerdictError,
)
from .instrumental import (
    OptionSet,
    OutcomeModel,
    OutcomeRule,
    UtilityFunction,
    UtilityRule,
    expected_utility,
    instrumental_choice,
    outcome_given_knowledge,
)
from .principles import (
    DilemmaPolicy,
    OptionStructure,
    Principle,
    PrincipleStructure,
    applicable_principles,
    applies,
    deontic_filter,
    permissible_per_principle,
)
from .render import parse_graph_json, render_dot, render_graph_json, render_text
from .scenario import (
    EngineConfig,
    Scenario,
    load_scenario,
    parse_knowledge,
    parse_scenario,
    serialize_scenario,
    validate_scenario,
)
from .worlds import (
    CredenceModel,
    CredenceTable,
    Knowledge,
    VariableSpec,
    WorldState,
    enumerate_consistent_worlds,
    validate_credences,
    world_probability,
)

__version__ = "0.1.0"

__all__ = [
    "ArgumentationGraph",
    "CaseArgument",
    "Condition",
    "ContractError",
    "CredenceModel",
    "CredenceTable",
    "DilemmaError",
    "DilemmaPolicy",
    "EngineConfig",
    "FinalArgument",
    "Knowledge",
    "ModelIncompleteError",
    "OptionArgument",
    "OptionSet",
    "OptionStructure",
    "OutcomeModel",
    "OutcomeRule",
    "Principle",
    "PrincipleStructure",
    "RelevanceFunction",
    "Scenario",
    "ScenarioError",
    "UtilityFunction",
    "UtilityRule",
    "ValidationError",
    "VariableSpec",
    "VerdictError",
    "WorldState",
    "applicable_principles",
    "applies",
    "build_aggregation_layer",
    "build_case_layer",
    "decide",
    "deontic_filter",
    "enumerate_consistent_worlds",
    "expected_utility",
    "instrumental_choice",
    "load_scenario",
    "outcome_given_knowledge",
    "parse_graph_json",
    "parse_knowledge",
    "parse_scenario",
    "permissible_per_principle",
    "pro_tanto_force",
    "render_dot",
    "render_graph_json",
    "render_text",
    "sequential_decide",
    "serialize_scenario",
    "validate_credences",
    "validate_scenario",
    "world_probability",
]
