"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 true moral
dilemma under the `error` policy.
"""

from __future__ import annotations

import json
import sys

import click

from . import carerobot
from .engine import RelevanceFunction, decide, sequential_decide
from .errors import DilemmaError, ValidationError, VerdictError
from .render import parse_graph_json, render_dot, render_graph_json, render_text
from .scenario import check_scenario_payload, load_scenario, parse_knowledge
from .worlds import Knowledge, WorldState

EXIT_VALIDATION = 1
EXIT_DILEMMA = 3


@click.group()
@click.version_option(package_name="verdict")
def main():
    """Ethically constrained decisions with argumentation-graph explanations."""


@main.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
def validate(scenario_path):
    """Parse and validate a scenario file; exit 0 only when it is clean."""
    with open(scenario_path, "rb") as fh:
        scenario, report = check_scenario_payload(fh.read())
    for issue in report:
        click.echo(str(issue))
    if scenario is None or not report.ok:
        sys.exit(EXIT_VALIDATION)
    click.echo(f"ok: {scenario.name} ({len(scenario.variables)} variables, "
               f"{len(scenario.options)} options)")


def _load_knowledge(scenario, knowledge_path) -> Knowledge:
    if knowledge_path is None:
        return Knowledge.empty()
    with open(knowledge_path, "rb") as fh:
        return parse_knowledge(fh.read(), scenario)


def _write(path, payload: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(payload)


@main.command(name="decide")
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.option("-k", "--knowledge", "knowledge_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON object of known variable values.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--graph-json", "graph_json_path", type=click.Path(dir_okay=False),
              help="Write the argumentation graph as canonical JSON.")
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False),
              help="Write the argumentation graph in DOT format.")
@click.option("--text", "text_path", type=click.Path(dir_okay=False),
              help="Write the templated text rationalization.")
@click.option("--lexicographic", is_flag=True,
              help="Use lexicographic relevance, overriding the scenario config.")
@click.option("--eu-weight", type=float, default=None,
              help="Override the expected-utility coefficient.")
@click.option("--timestamp", default=None,
              help="Timestamp recorded in the graph provenance (omitted by default "
                   "so identical inputs give identical graphs).")
@click.option("--sequential", "world_path", type=click.Path(exists=True, dir_okay=False),
              help="Run the idealized sequential pipeline instead, using this "
                   "full world state (JSON object of every variable).")
def decide_cmd(scenario_path, knowledge_path, seed, graph_json_path, dot_path,
               text_path, lexicographic, eu_weight, timestamp, world_path):
    """Make one decision and print the chosen option."""
    try:
        scenario = load_scenario(scenario_path)
        knowledge = _load_knowledge(scenario, knowledge_path)
        if world_path is not None:
            with open(world_path, "rb") as fh:
                full = parse_knowledge(fh.read(), scenario)
            missing = [v.name for v in scenario.variables if v.name not in full.known]
            if missing:
                raise ValidationError(
                    f"sequential mode needs a full world state; missing {missing}"
                )
            world = WorldState(
                tuple(v.name for v in scenario.variables),
                tuple(full.known[v.name] for v in scenario.variables),
            )
            click.echo(sequential_decide(world, knowledge, scenario, seed))
            return
        relevance = None
        if lexicographic:
            relevance = RelevanceFunction(mode="lexicographic")
        chosen, graph = decide(
            knowledge, scenario, seed,
            relevance=relevance, eu_weight=eu_weight, timestamp=timestamp,
        )
    except DilemmaError as exc:
        click.echo(f"dilemma: {exc}", err=True)
        sys.exit(EXIT_DILEMMA)
    except (ValidationError, VerdictError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    if graph_json_path:
        _write(graph_json_path, render_graph_json(graph))
    if dot_path:
        _write(dot_path, render_dot(graph))
    if text_path:
        _write(text_path, render_text(graph))
    click.echo(chosen)


@main.command()
@click.argument("graph_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False),
              help="Write the DOT rendering to this path.")
@click.option("--text", "text_path", type=click.Path(dir_okay=False),
              help="Write the text rationalization to this path.")
def explain(graph_path, dot_path, text_path):
    """Re-render a previously saved graph JSON; prints the text form."""
    with open(graph_path, "rb") as fh:
        try:
            graph = parse_graph_json(fh.read())
        except (ValidationError, KeyError, json.JSONDecodeError) as exc:
            click.echo(f"error: cannot read graph: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
    if dot_path:
        _write(dot_path, render_dot(graph))
    if text_path:
        _write(text_path, render_text(graph))
    if not dot_path and not text_path:
        click.echo(render_text(graph).decode("utf-8"), nl=False)
    else:
        click.echo(graph.chosen)


def _load_robot_config(path) -> carerobot.RobotConfig:
    if path is None:
        return carerobot.RobotConfig()
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    tasks = tuple(
        carerobot.TaskSpec(t["name"], t["priority"], int(t["cost"]), float(t["reward"]))
        for t in doc["tasks"]
    )
    return carerobot.RobotConfig(
        tasks=tasks,
        task_probs=tuple((name, float(p)) for name, p in doc["task_probs"].items()),
        capacity=int(doc.get("capacity", 16)),
        recharge_value=float(doc.get("recharge_value", 3.0)),
        fail_penalty=float(doc.get("fail_penalty", 1.0)),
        arrival_prob=float(doc.get("arrival_prob", 1.0)),
        start_location=doc.get("start_location", "CS"),
    )


@main.command()
@click.argument("robot_config", required=False,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--policy", type=click.Choice(carerobot.POLICIES), default="interlocked",
              show_default=True)
@click.option("--steps", type=int, default=40, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False),
              help="Write the step-by-step trace (TSV) to this path.")
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False),
              help="Render the episode figure (energy + reward) to this path.")
def simulate(robot_config, policy, steps, seed, trace_path, plot_path):
    """Run one care-robot episode and print its trace and metrics."""
    try:
        config = _load_robot_config(robot_config)
        result = carerobot.run_episode(config, policy, steps, seed)
    except (ValidationError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    lines = carerobot.trace_lines(result.trace)
    click.echo("time\tlocation\tenergy\taction\trequest\treward")
    for line in lines:
        click.echo(line)
    if trace_path:
        with open(trace_path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    if plot_path:
        from .plots import plot_episode

        plot_episode(result.trace, plot_path)
    m = result.metrics
    click.echo(
        f"metrics\tserved_low={m.served_low}\tserved_high={m.served_high}"
        f"\turgent_attempted={m.urgent_attempted}\turgent_missed={m.urgent_missed}"
        f"\tdepleted={m.depleted}\ttotal_reward={m.total_reward:g}"
    )


@main.command()
@click.argument("robot_config", required=False,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--episodes", type=int, default=100, show_default=True)
@click.option("--steps", type=int, default=40, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False),
              help="Write the comparison table as CSV.")
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False),
              help="Render the comparison figure to this path.")
def compare(robot_config, episodes, steps, seed, csv_path, plot_path):
    """Compare the three policies over seeded episodes (TSV to stdout)."""
    if episodes <= 0:
        raise click.UsageError("--episodes must be positive")
    try:
        config = _load_robot_config(robot_config)
        summaries = carerobot.compare_policies(config, episodes, steps, seed)
    except (ValidationError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    columns = (
        "policy", "episodes", "served_low", "served_high",
        "urgent_attempted", "urgent_missed", "depleted_episodes", "mean_reward",
    )
    rows = [
        (
            s.policy, s.episodes, s.served_low, s.served_high,
            s.urgent_attempted, s.urgent_missed, s.depleted_episodes,
            f"{s.mean_reward:.4g}",
        )
        for s in summaries.values()
    ]
    click.echo("\t".join(columns))
    for row in rows:
        click.echo("\t".join(str(v) for v in row))
    if csv_path:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(str(v) for v in row) + "\n")
    if plot_path:
        from .plots import plot_policy_comparison

        plot_policy_comparison(summaries, plot_path)


if __name__ == "__main__":
    main()
