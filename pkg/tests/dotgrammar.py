"""A DOT grammar checker built on pyparsing, used to validate rendered graphs.

Covers the slice of the DOT language that directed graphs use: graph/node/
edge statements, attribute lists, anonymous subgraphs, and quoted or bare
identifiers.
"""

from __future__ import annotations

import pyparsing as pp


def _grammar() -> pp.ParserElement:
    identifier = (
        pp.QuotedString('"', escChar="\\")
        | pp.Regex(r"-?(\.\d+|\d+(\.\d*)?)")
        | pp.Word(pp.alphas + "_", pp.alphanums + "_")
    )
    attr = identifier + pp.Suppress("=") + identifier
    attr_list = pp.Suppress("[") + pp.Optional(
        pp.delimitedList(attr, delim=pp.oneOf(", ;"))
    ) + pp.Suppress("]")
    node_id = identifier.copy()
    stmt = pp.Forward()
    stmt_list = pp.ZeroOrMore(stmt + pp.Optional(pp.Suppress(";")))
    subgraph = pp.Suppress("{") + stmt_list + pp.Suppress("}")
    edge_stmt = node_id + pp.OneOrMore(pp.Suppress("->") + node_id) + pp.Optional(attr_list)
    node_stmt = node_id + attr_list
    assignment = attr.copy()
    stmt <<= subgraph | edge_stmt | node_stmt | assignment | node_id
    graph = (
        pp.Keyword("digraph")
        + pp.Optional(identifier)
        + pp.Suppress("{")
        + stmt_list
        + pp.Suppress("}")
    )
    return graph


_GRAMMAR = _grammar()


def check_dot(payload: str) -> None:
    """Raise pyparsing.ParseException if the payload is not valid DOT."""
    _GRAMMAR.parse_string(payload, parse_all=True)
