"""Rendering argumentation graphs: canonical JSON, DOT, and plain text.

The JSON form (schema_version "1", documented in docs/graph-schema.md) is
canonical and deterministic: stable key order, weights as decimal strings
with 12 significant digits, and premise records stored verbatim, so a parsed
graph re-renders byte-identically. DOT and text keep 4 significant digits
for readability.
"""

from __future__ import annotations

import json
from typing import Any

from .engine import (
    ArgumentationGraph,
    CaseArgument,
    FinalArgument,
    Force,
    GraphEdge,
    OptionArgument,
    Provenance,
    ScoreEntry,
)
from .errors import ValidationError
from .fmtutil import fmt4, fmt12
from .worlds import WorldState

GRAPH_SCHEMA_VERSION = "1"


def _weight_json(force: Force):
    if isinstance(force, tuple):
        return [fmt12(x) for x in force]
    return fmt12(force)


def _weight_from_json(value) -> Force:
    if isinstance(value, list):
        return tuple(float(x) for x in value)
    return float(value)


def _world_json(world: WorldState) -> dict[str, Any]:
    return {"names": list(world.names), "values": list(world.values)}


def _world_from_json(doc) -> WorldState:
    return WorldState(tuple(doc["names"]), tuple(doc["values"]))


def render_graph_json(graph: ArgumentationGraph) -> bytes:
    """Canonical machine-readable serialization of the complete graph."""
    doc = {
        "schema_version": GRAPH_SCHEMA_VERSION,
        "provenance": {
            "scenario": graph.provenance.scenario,
            "digest": graph.provenance.digest,
            "knowledge": dict(graph.provenance.knowledge),
            "seed": graph.provenance.seed,
            "engine": dict(graph.provenance.engine),
            "fallback": graph.provenance.fallback,
            "timestamp": graph.provenance.timestamp,
        },
        "nodes": {
            "case": [
                {
                    "id": arg.id,
                    "layer": "case",
                    "world": _world_json(arg.world),
                    "principle": arg.principle_id,
                    "rank": arg.rank,
                    "permitted": list(arg.perm_set),
                    "probability": fmt12(arg.probability),
                    "premises": list(arg.premises),
                    "conclusion": arg.conclusion,
                }
                for arg in graph.v1
            ],
            "option": [
                {
                    "id": arg.id,
                    "layer": "option",
                    "option": arg.option,
                    "strength": _weight_json(arg.strength),
                    "support": [
                        {"case": case_id, "strength": _weight_json(force)}
                        for case_id, force in arg.support
                    ],
                    "premises": list(arg.premises),
                    "conclusion": arg.conclusion,
                }
                for arg in graph.v2
            ],
            "final": {
                "id": graph.v3.id,
                "layer": "final",
                "entries": [
                    {
                        "option": e.option,
                        "force": _weight_json(e.force),
                        "eu": fmt12(e.eu),
                        "score": _weight_json(e.score),
                    }
                    for e in graph.v3.entries
                ],
                "chosen": graph.v3.chosen,
                "tie_set": list(graph.v3.tie_set),
                "seed": graph.v3.seed,
                "premises": list(graph.v3.premises),
                "conclusion": graph.v3.conclusion,
            },
        },
        "edges": {
            "case_to_option": [
                {"source": e.source, "target": e.target, "weight": _weight_json(e.weight)}
                for e in graph.e12
            ],
            "option_to_final": [
                {"source": e.source, "target": e.target, "weight": _weight_json(e.weight)}
                for e in graph.e23
            ],
        },
    }
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def parse_graph_json(payload: bytes | str) -> ArgumentationGraph:
    """Rebuild a graph from its canonical JSON form."""
    if isinstance(payload, bytes):
        payload = payload.decode("utf-8")
    doc = json.loads(payload)
    if doc.get("schema_version") != GRAPH_SCHEMA_VERSION:
        raise ValidationError(
            f"unsupported graph schema version {doc.get('schema_version')!r}"
        )
    nodes = doc["nodes"]
    v1 = tuple(
        CaseArgument(
            id=node["id"],
            world=_world_from_json(node["world"]),
            principle_id=node["principle"],
            rank=node["rank"],
            perm_set=tuple(node["permitted"]),
            probability=float(node["probability"]),
            premises=tuple(node["premises"]),
            conclusion=node["conclusion"],
        )
        for node in nodes["case"]
    )
    v2 = tuple(
        OptionArgument(
            id=node["id"],
            option=node["option"],
            support=tuple(
                (entry["case"], _weight_from_json(entry["strength"]))
                for entry in node["support"]
            ),
            strength=_weight_from_json(node["strength"]),
            premises=tuple(node["premises"]),
            conclusion=node["conclusion"],
        )
        for node in nodes["option"]
    )
    final_doc = nodes["final"]
    v3 = FinalArgument(
        id=final_doc["id"],
        entries=tuple(
            ScoreEntry(
                option=e["option"],
                force=_weight_from_json(e["force"]),
                eu=float(e["eu"]),
                score=_weight_from_json(e["score"]),
            )
            for e in final_doc["entries"]
        ),
        chosen=final_doc["chosen"],
        tie_set=tuple(final_doc["tie_set"]),
        seed=final_doc["seed"],
        premises=tuple(final_doc["premises"]),
        conclusion=final_doc["conclusion"],
    )
    prov_doc = doc["provenance"]
    provenance = Provenance(
        scenario=prov_doc["scenario"],
        digest=prov_doc["digest"],
        knowledge=prov_doc["knowledge"],
        seed=prov_doc["seed"],
        engine=prov_doc["engine"],
        fallback=prov_doc.get("fallback"),
        timestamp=prov_doc.get("timestamp"),
    )
    edges = doc["edges"]
    e12 = tuple(
        GraphEdge(e["source"], e["target"], _weight_from_json(e["weight"]))
        for e in edges["case_to_option"]
    )
    e23 = tuple(
        GraphEdge(e["source"], e["target"], _weight_from_json(e["weight"]))
        for e in edges["option_to_final"]
    )
    return ArgumentationGraph(v1=v1, v2=v2, v3=v3, e12=e12, e23=e23, provenance=provenance)


# ---------------------------------------------------------------------------
# DOT


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _weight_label(force: Force) -> str:
    if isinstance(force, tuple):
        return "<" + ", ".join(fmt4(x) for x in force) + ">"
    return fmt4(force)


def render_dot(graph: ArgumentationGraph) -> bytes:
    """A DOT digraph with the three layers ranked left to right and the
    chosen option highlighted."""
    lines = ["digraph argumentation {", "  rankdir=LR;", '  node [shape=box, fontsize=10];']
    if graph.provenance.fallback:
        lines.append(
            f'  label="fallback: {_dot_escape(graph.provenance.fallback)}"; labelloc=top;'
        )
    if graph.v1:
        lines.append("  { rank=same;")
        for arg in graph.v1:
            label = (
                f"{arg.id}\\n{arg.world.describe()}\\n"
                f"principle {arg.principle_id} (rank {arg.rank})\\n"
                f"p={fmt4(arg.probability)} permits {{{', '.join(arg.perm_set)}}}"
            )
            lines.append(f'    "{_dot_escape(arg.id)}" [label="{_dot_escape(label)}"];')
        lines.append("  }")
    if graph.v2:
        lines.append("  { rank=same;")
        for arg in graph.v2:
            label = f"{arg.option}\\nstrength {_weight_label(arg.strength)}"
            style = ""
            if arg.option == graph.v3.chosen:
                style = ", style=filled, fillcolor=lightgrey, penwidth=2"
            lines.append(
                f'    "{_dot_escape(arg.id)}" [label="{_dot_escape(label)}"{style}];'
            )
        lines.append("  }")
    final_label = f"decision: {graph.v3.chosen}"
    lines.append(
        f'  "{_dot_escape(graph.v3.id)}" [label="{_dot_escape(final_label)}", shape=doubleoctagon];'
    )
    for edge in graph.e12:
        lines.append(
            f'  "{_dot_escape(edge.source)}" -> "{_dot_escape(edge.target)}" '
            f'[label="{_weight_label(edge.weight)}"];'
        )
    for edge in graph.e23:
        lines.append(
            f'  "{_dot_escape(edge.source)}" -> "{_dot_escape(edge.target)}" '
            f'[label="{_weight_label(edge.weight)}"];'
        )
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Text


def render_text(graph: ArgumentationGraph) -> bytes:
    """Templated natural-language rationalization assembled from the premise
    texts stored in the graph."""
    paragraphs: list[str] = []
    header = [
        f"Decision explanation for scenario '{graph.provenance.scenario}' "
        f"(seed {graph.provenance.seed}).",
        f"Knowledge: {graph.provenance.knowledge or 'none'}.",
    ]
    if graph.provenance.fallback:
        header.append(
            f"No principle applies in any possible case; fell back to "
            f"{graph.provenance.fallback} choice."
        )
    paragraphs.append("\n".join(header))

    for arg in graph.v1:
        lines = [f"Case argument {arg.id}:"]
        lines += [f"  ({i}) {p['text']}" for i, p in enumerate(arg.premises, start=1)]
        lines.append(f"  Conclusion: {arg.conclusion['text']}")
        paragraphs.append("\n".join(lines))

    for arg in graph.v2:
        lines = [f"Option argument for {arg.option}:"]
        lines += [f"  ({i}) {p['text']}" for i, p in enumerate(arg.premises, start=1)]
        lines.append(f"  Conclusion: {arg.conclusion['text']}")
        paragraphs.append("\n".join(lines))

    lines = ["Final argument:"]
    lines += [f"  ({i}) {p['text']}" for i, p in enumerate(graph.v3.premises, start=1)]
    lines.append(f"  Conclusion: {graph.v3.conclusion['text']}")
    paragraphs.append("\n".join(lines))

    return ("\n\n".join(paragraphs) + "\n").encode("utf-8")
