"""The medical-care-robot world: facility map, stepper, episode runner, and
the expected-utility-versus-principle dilemma fixture.

The robot moves between three patient rooms and a charging station, serving
requests whose task (and hence priority) is deliberately hidden from it; it
only knows a probability distribution over tasks. Derived facts a principle
needs ("enough energy to serve", "enough to serve and return") are
precomputed into scenario variables because conditions cannot do arithmetic.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, replace

import networkx as nx

from .engine import decide, pick, sequential_decide
from .errors import ValidationError
from .instrumental import (
    OptionSet,
    OutcomeModel,
    OutcomeRule,
    UtilityFunction,
    UtilityRule,
    instrumental_choice,
)
from .conditions import Condition
from .principles import OptionStructure, Principle, PrincipleStructure
from .scenario import EngineConfig, Scenario
from .worlds import CredenceModel, CredenceTable, Knowledge, VariableSpec, WorldState

logger = logging.getLogger(__name__)

ANSWER_REQUEST = "AnsReq"
CHARGE = "Charge"

#: Hallway segments with their travel distances (one energy unit per unit).
FACILITY_EDGES = (
    ("R1", "J1", 1),
    ("R2", "J2", 1),
    ("R3", "J3", 1),
    ("CS", "J4", 1),
    ("J1", "J4", 2),
    ("J4", "J2", 2),
    ("J2", "J3", 1),
)

_GRAPH = nx.Graph()
for _a, _b, _w in FACILITY_EDGES:
    _GRAPH.add_edge(_a, _b, weight=_w)
_DISTANCES = {
    source: dict(lengths)
    for source, lengths in nx.all_pairs_dijkstra_path_length(_GRAPH, weight="weight")
}

FACILITY_NODES = tuple(sorted(_GRAPH.nodes))
ROOMS = ("R1", "R2", "R3")
CHARGING_STATION = "CS"


def shortest_distance(origin: str, destination: str) -> int:
    """Shortest travel distance (= energy cost) between two facility nodes."""
    if origin not in _DISTANCES or destination not in _DISTANCES:
        raise ValidationError(f"unknown facility node in {origin!r} -> {destination!r}")
    return int(_DISTANCES[origin][destination])


@dataclass(frozen=True)
class TaskSpec:
    """A possible hidden task behind a request."""

    name: str
    priority: str  # "low" or "high"
    energy_cost: int
    reward: float

    def __post_init__(self):
        if self.priority not in ("low", "high"):
            raise ValidationError(f"task priority must be low or high, got {self.priority!r}")
        if self.energy_cost <= 0:
            raise ValidationError("task energy_cost must be positive")


@dataclass(frozen=True)
class RobotConfig:
    """Fixture parameters for the robot world.

    These numbers are not canonical; they are tuned so that the bundled
    dilemma state (robot at R1, energy 5, request in R1) makes recharging
    the strictly better expected-utility move while a top-class principle
    still mandates serving. `build_dilemma_fixture` re-verifies that
    property by brute force on every build.
    """

    tasks: tuple[TaskSpec, ...] = (
        TaskSpec("fetch_water", "low", 1, 0.5),
        TaskSpec("give_meds", "low", 2, 0.5),
        TaskSpec("reanimation", "high", 5, 5.0),
    )
    task_probs: tuple[tuple[str, float], ...] = (
        ("fetch_water", 0.6),
        ("give_meds", 0.3),
        ("reanimation", 0.1),
    )
    capacity: int = 16
    recharge_value: float = 3.0
    fail_penalty: float = 1.0
    arrival_prob: float = 1.0
    start_location: str = CHARGING_STATION
    request_rooms: tuple[str, ...] = ROOMS

    def __post_init__(self):
        names = [t.name for t in self.tasks]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate task names")
        if set(dict(self.task_probs)) != set(names):
            raise ValidationError("task_probs must cover exactly the declared tasks")

    @property
    def task_map(self) -> dict[str, TaskSpec]:
        return {t.name: t for t in self.tasks}

    @property
    def task_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.tasks)


@dataclass(frozen=True)
class RobotWorld:
    """Simulator state between decisions; the robot sits in a room or at CS."""

    location: str
    energy: int
    capacity: int
    pending_request: tuple[str, str] | None = None  # (room, hidden task name)
    time: int = 0
    status: str = "active"  # or "depleted"
    reward_total: float = 0.0

    def __post_init__(self):
        if self.location not in FACILITY_NODES:
            raise ValidationError(f"unknown location {self.location!r}")
        if not 0 <= self.energy <= self.capacity:
            raise ValidationError("energy must lie in [0, capacity]")


# ---------------------------------------------------------------------------
# Decision scenario construction


RESULT_VALUES = ("pending", "served_safe", "served_stranded", "failed", "recharged")


def decision_knowledge() -> Knowledge:
    """What the robot knows when deciding: only that the request is pending.

    The hidden task and its priority are deliberately absent; the engine
    sees them only through the credence distribution.
    """
    return Knowledge({"result": "pending"})


def build_decision_scenario(config: RobotConfig, world: RobotWorld) -> Scenario:
    """The one-shot decision model for the robot's current state.

    Location and energy are known, so per-task feasibility facts become
    deterministic credence tables conditioned on the hidden task.
    """
    if world.pending_request is None:
        raise ValidationError("no pending request: nothing to decide")
    room = world.pending_request[0]
    return_cost = shortest_distance(room, CHARGING_STATION)
    travel = shortest_distance(world.location, room)
    can_charge = shortest_distance(world.location, CHARGING_STATION) <= world.energy

    def can_serve(task: TaskSpec) -> int:
        return int(travel + task.energy_cost <= world.energy)

    def can_serve_and_return(task: TaskSpec) -> int:
        return int(travel + task.energy_cost + return_cost <= world.energy)

    variables = (
        VariableSpec("task", config.task_names),
        VariableSpec("priority", ("low", "high")),
        VariableSpec("can_serve", (0, 1)),
        VariableSpec("can_serve_and_return", (0, 1)),
        VariableSpec("result", RESULT_VALUES),
    )
    credences = CredenceModel(
        {
            "task": CredenceTable("task", (), {(): dict(config.task_probs)}),
            "priority": CredenceTable(
                "priority",
                ("task",),
                {(t.name,): {t.priority: 1.0} for t in config.tasks},
            ),
            "can_serve": CredenceTable(
                "can_serve",
                ("task",),
                {(t.name,): {can_serve(t): 1.0} for t in config.tasks},
            ),
            "can_serve_and_return": CredenceTable(
                "can_serve_and_return",
                ("task",),
                {(t.name,): {can_serve_and_return(t): 1.0} for t in config.tasks},
            ),
            "result": CredenceTable("result", (), {(): {"pending": 1.0}}),
        }
    )
    outcome = OutcomeModel(
        (
            OutcomeRule({"can_serve": 0}, ANSWER_REQUEST, ((1.0, {"result": "failed"}),)),
            OutcomeRule(
                {"can_serve": 1, "can_serve_and_return": 1},
                ANSWER_REQUEST,
                ((1.0, {"result": "served_safe"}),),
            ),
            OutcomeRule(
                {"can_serve": 1, "can_serve_and_return": 0},
                ANSWER_REQUEST,
                ((1.0, {"result": "served_stranded"}),),
            ),
            OutcomeRule(
                {},
                CHARGE,
                ((1.0, {"result": "recharged" if can_charge else "failed"}),),
            ),
        ),
        default_self_loop=False,
    )
    utility_rules: list[UtilityRule] = []
    for task in config.tasks:
        utility_rules.append(
            UtilityRule(
                {"task": task.name, "result": "served_safe"},
                task.reward + config.recharge_value,
            )
        )
        utility_rules.append(
            UtilityRule({"task": task.name, "result": "served_stranded"}, task.reward)
        )
    utility_rules.append(UtilityRule({"result": "failed"}, -config.fail_penalty))
    utility_rules.append(UtilityRule({"result": "recharged"}, config.recharge_value))
    utility_rules.append(UtilityRule({}, 0.0))

    principles = PrincipleStructure(
        (
            (
                Principle(
                    "attempt_urgent_care",
                    Condition.from_json(
                        ["and", ["==", "priority", "high"], ["==", "can_serve", 1]]
                    ),
                    OptionStructure(((ANSWER_REQUEST,),)),
                ),
            ),
            (
                Principle(
                    "conserve_for_low_stakes",
                    Condition.from_json(
                        ["and", ["==", "priority", "low"], ["==", "can_serve_and_return", 0]]
                    ),
                    OptionStructure(((CHARGE,),)),
                ),
            ),
        )
    )
    return Scenario(
        name=f"care-robot {world.location} e{world.energy} req {room}",
        variables=variables,
        credences=credences,
        options=OptionSet((ANSWER_REQUEST, CHARGE)),
        outcome=outcome,
        utility=UtilityFunction(tuple(utility_rules)),
        principles=principles,
        engine=EngineConfig(),
    )


def true_world_state(scenario: Scenario, task_name: str) -> WorldState:
    """The full world the simulator knows: the hidden task plus the facts the
    credence tables derive from it (used by the idealized sequential policy).
    """
    values = []
    for spec in scenario.variables:
        if spec.name == "task":
            values.append(task_name)
        elif spec.name == "result":
            values.append("pending")
        else:
            dist = scenario.credences.table_for(spec.name).distribution({"task": task_name})
            values.append(max(dist, key=dist.get))
    return WorldState(tuple(v.name for v in scenario.variables), tuple(values))


def _enumerated_eu(scenario: Scenario, knowledge: Knowledge, option: str) -> float:
    """Brute-force expected utility: a raw walk over the full product space,
    kept independent of the instrumental module on purpose."""
    names = tuple(v.name for v in scenario.variables)
    total = 0.0
    for combo in itertools.product(*(v.domain for v in scenario.variables)):
        world = WorldState(names, combo)
        if not knowledge.agrees_with(world):
            continue
        prob = 1.0
        context = world.as_dict()
        for name in names:
            if name in knowledge.known:
                continue
            table = scenario.credences.tables[name]
            key = tuple(context[p] for p in table.parents)
            prob *= table.rows[key].get(context[name], 0.0)
        if prob == 0.0:
            continue
        matched = None
        for rule in scenario.outcome.rules:
            if (rule.option is None or rule.option == option) and world.matches(rule.when):
                matched = rule
                break
        branches = matched.branches if matched else ((1.0, {}),)
        for branch_prob, patch in branches:
            successor = world.patched(patch)
            for urule in scenario.utility.rules:
                if successor.matches(urule.when):
                    total += prob * branch_prob * urule.value
                    break
    return total


def dilemma_world(config: RobotConfig | None = None) -> RobotWorld:
    """Robot at R1 with a hidden reanimation request in its own room and just
    enough energy to serve it but not to make it back to the charger."""
    config = config or RobotConfig()
    return RobotWorld(
        location="R1",
        energy=5,
        capacity=config.capacity,
        pending_request=("R1", "reanimation"),
        time=0,
    )


def build_dilemma_fixture(config: RobotConfig | None = None) -> Scenario:
    """The bundled dilemma decision: recharging maximizes expected utility,
    yet serving is what the top-ranked principle demands.

    Raises if the (configurable) parameters fail the brute-force check
    EU(Charge) > EU(AnsReq), so a mistuned fixture cannot be built silently.
    """
    config = config or RobotConfig()
    scenario = build_decision_scenario(config, dilemma_world(config))
    knowledge = decision_knowledge()
    eu_serve = _enumerated_eu(scenario, knowledge, ANSWER_REQUEST)
    eu_charge = _enumerated_eu(scenario, knowledge, CHARGE)
    if not eu_charge > eu_serve:
        raise ValidationError(
            f"fixture parameters do not produce the dilemma: "
            f"EU(Charge)={eu_charge} <= EU(AnsReq)={eu_serve}"
        )
    return scenario


# ---------------------------------------------------------------------------
# Stepping and episodes


def step(config: RobotConfig, world: RobotWorld, action: str) -> RobotWorld:
    """Apply one action. Recharging is atomic (always back to full); energy
    running out mid-action ends the episode in a terminal depleted state."""
    if world.status != "active":
        logger.warning("step on a terminal world state is a no-op")
        return world
    time = world.time + 1
    if action == CHARGE:
        travel = shortest_distance(world.location, CHARGING_STATION)
        if travel > world.energy:
            return replace(
                world,
                location=CHARGING_STATION,
                energy=0,
                status="depleted",
                time=time,
                reward_total=world.reward_total - config.fail_penalty,
            )
        return replace(world, location=CHARGING_STATION, energy=world.capacity, time=time)
    if action == ANSWER_REQUEST:
        if world.pending_request is None:
            logger.warning("AnsReq with no pending request is a no-op")
            return replace(world, time=time)
        room, task_name = world.pending_request
        task = config.task_map[task_name]
        need = shortest_distance(world.location, room) + task.energy_cost
        if need > world.energy:
            return replace(
                world,
                location=room,
                energy=0,
                status="depleted",
                pending_request=None,
                time=time,
                reward_total=world.reward_total - config.fail_penalty,
            )
        return replace(
            world,
            location=room,
            energy=world.energy - need,
            pending_request=None,
            time=time,
            reward_total=world.reward_total + task.reward,
        )
    raise ValidationError(f"unknown action {action!r}")


POLICIES = ("instrumental", "sequential", "interlocked")


@dataclass(frozen=True)
class TraceStep:
    time: int
    location: str
    energy: int
    action: str
    request: tuple[str, str] | None
    reward: float
    knowledge_vars: tuple[str, ...]  # variables exposed to the deciding policy


@dataclass
class EpisodeMetrics:
    served_low: int = 0
    served_high: int = 0
    urgent_attempted: int = 0
    urgent_missed: int = 0
    depleted: int = 0
    total_reward: float = 0.0


@dataclass(frozen=True)
class EpisodeResult:
    trace: tuple[TraceStep, ...]
    metrics: EpisodeMetrics
    final_world: RobotWorld


def run_episode(
    config: RobotConfig, policy: str, steps: int, seed: int
) -> EpisodeResult:
    """Run one seeded episode under a decision policy.

    Request arrivals are drawn from the episode RNG; each decision uses a
    per-step derived seed, so identical (config, policy, steps, seed) runs
    give identical traces.
    """
    if policy not in POLICIES:
        raise ValidationError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    if steps <= 0:
        raise ValidationError("steps must be positive")
    rng = random.Random(seed)
    world = RobotWorld(
        location=config.start_location, energy=config.capacity, capacity=config.capacity
    )
    task_names = list(config.task_names)
    task_weights = [dict(config.task_probs)[t] for t in task_names]
    scenario_cache: dict[tuple, Scenario] = {}
    trace: list[TraceStep] = []
    metrics = EpisodeMetrics()

    for _ in range(steps):
        if world.status != "active":
            break
        if world.pending_request is None and rng.random() < config.arrival_prob:
            room = config.request_rooms[rng.randrange(len(config.request_rooms))]
            task = rng.choices(task_names, weights=task_weights)[0]
            world = replace(world, pending_request=(room, task))

        knowledge_vars: tuple[str, ...] = ()
        if world.pending_request is not None:
            key = (world.location, world.energy, world.pending_request[0])
            scenario = scenario_cache.get(key)
            if scenario is None:
                scenario = build_decision_scenario(config, world)
                scenario_cache[key] = scenario
            knowledge = decision_knowledge()
            knowledge_vars = tuple(knowledge.known)
            decision_seed = seed * 1_000_003 + world.time
            if policy == "instrumental":
                ties = instrumental_choice(
                    scenario.options,
                    knowledge,
                    scenario.outcome,
                    scenario.utility,
                    scenario.credences,
                    scenario.variables,
                )
                action = pick(ties, decision_seed)
            elif policy == "sequential":
                action = sequential_decide(
                    true_world_state(scenario, world.pending_request[1]),
                    knowledge,
                    scenario,
                    decision_seed,
                )
            else:
                action, _ = decide(knowledge, scenario, decision_seed)
        else:
            action = CHARGE

        request = world.pending_request
        before = world.reward_total
        new_world = step(config, world, action)
        reward = new_world.reward_total - before
        trace.append(
            TraceStep(
                time=world.time,
                location=world.location,
                energy=world.energy,
                action=action,
                request=request,
                reward=reward,
                knowledge_vars=knowledge_vars,
            )
        )
        if request is not None:
            task = config.task_map[request[1]]
            served = action == ANSWER_REQUEST and new_world.status == "active"
            if served:
                if task.priority == "high":
                    metrics.served_high += 1
                else:
                    metrics.served_low += 1
            if task.priority == "high":
                if action == ANSWER_REQUEST:
                    metrics.urgent_attempted += 1
                if not served:
                    metrics.urgent_missed += 1
        if new_world.status == "depleted":
            metrics.depleted = 1
        world = new_world

    metrics.total_reward = world.reward_total
    return EpisodeResult(trace=tuple(trace), metrics=metrics, final_world=world)


@dataclass
class PolicySummary:
    policy: str
    episodes: int = 0
    served_low: int = 0
    served_high: int = 0
    urgent_attempted: int = 0
    urgent_missed: int = 0
    depleted_episodes: int = 0
    total_reward: float = 0.0

    @property
    def mean_reward(self) -> float:
        return self.total_reward / self.episodes if self.episodes else 0.0


def compare_policies(
    config: RobotConfig, episodes: int, steps: int, seed: int
) -> dict[str, PolicySummary]:
    """Aggregate metrics for all three policies over seeded episodes."""
    summaries: dict[str, PolicySummary] = {}
    for policy in POLICIES:
        summary = PolicySummary(policy=policy, episodes=episodes)
        for i in range(episodes):
            result = run_episode(config, policy, steps, seed + i)
            summary.served_low += result.metrics.served_low
            summary.served_high += result.metrics.served_high
            summary.urgent_attempted += result.metrics.urgent_attempted
            summary.urgent_missed += result.metrics.urgent_missed
            summary.depleted_episodes += result.metrics.depleted
            summary.total_reward += result.metrics.total_reward
        summaries[policy] = summary
    return summaries


def trace_lines(trace) -> list[str]:
    """One tab-separated record per step: time, location, energy, action,
    request (room/task or -), reward."""
    lines = []
    for entry in trace:
        request = f"{entry.request[0]}/{entry.request[1]}" if entry.request else "-"
        lines.append(
            f"{entry.time}\t{entry.location}\t{entry.energy}\t{entry.action}"
            f"\t{request}\t{entry.reward:g}"
        )
    return lines
