"""Boolean condition expressions over world-state variables.

Conditions are written in scenario files as prefix-notation arrays, e.g.
``["and", ["==", "priority", "high"], [">=", "energy", 4]]``. Atoms compare
one variable against a constant; ordered comparators are only valid on
integer domains. The connectives are ``and``, ``or``, and ``not``; the JSON
literals ``true`` and ``false`` are also accepted.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ValidationError
from .worlds import Value, VariableSpec, WorldState

COMPARATORS = {
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}
ORDERED = ("<", "<=", ">", ">=")
CONNECTIVES = ("and", "or", "not")


@dataclass(frozen=True)
class Condition:
    """An immutable expression tree; `expr` is a bool or a nested tuple."""

    expr: object

    @classmethod
    def from_json(cls, doc) -> "Condition":
        return cls(_canonical(doc))

    @classmethod
    def always(cls) -> "Condition":
        return cls(True)

    def to_json(self):
        return _to_json(self.expr)

    def evaluate(self, world: WorldState) -> bool:
        return _evaluate(self.expr, world)

    def variables(self) -> set[str]:
        out: set[str] = set()
        _collect_variables(self.expr, out)
        return out

    def text(self) -> str:
        return _text(self.expr, parent=None)


def _canonical(doc) -> object:
    """Validate the JSON shape and convert nested lists to tuples."""
    if isinstance(doc, bool):
        return doc
    if not isinstance(doc, (list, tuple)) or not doc:
        raise ValidationError(f"condition must be a boolean or a non-empty array, got {doc!r}")
    op = doc[0]
    if op in ("and", "or"):
        return (op,) + tuple(_canonical(sub) for sub in doc[1:])
    if op == "not":
        if len(doc) != 2:
            raise ValidationError("'not' takes exactly one operand")
        return ("not", _canonical(doc[1]))
    if op in COMPARATORS:
        if len(doc) != 3:
            raise ValidationError(f"comparator {op!r} takes a variable and a constant")
        variable, constant = doc[1], doc[2]
        if not isinstance(variable, str):
            raise ValidationError(f"comparator {op!r} expects a variable name, got {variable!r}")
        if isinstance(constant, bool) or not isinstance(constant, (str, int)):
            raise ValidationError(f"unsupported constant {constant!r} in condition")
        return (op, variable, constant)
    raise ValidationError(f"unknown condition operator {op!r}")


def _to_json(expr) -> object:
    if isinstance(expr, bool):
        return expr
    op = expr[0]
    if op in ("and", "or"):
        return [op] + [_to_json(sub) for sub in expr[1:]]
    if op == "not":
        return ["not", _to_json(expr[1])]
    return [op, expr[1], expr[2]]


def _evaluate(expr, world: WorldState) -> bool:
    if isinstance(expr, bool):
        return expr
    op = expr[0]
    if op == "and":
        return all(_evaluate(sub, world) for sub in expr[1:])
    if op == "or":
        return any(_evaluate(sub, world) for sub in expr[1:])
    if op == "not":
        return not _evaluate(expr[1], world)
    return COMPARATORS[op](world.value_of(expr[1]), expr[2])


def _collect_variables(expr, out: set[str]) -> None:
    if isinstance(expr, bool):
        return
    op = expr[0]
    if op in ("and", "or", "not"):
        for sub in expr[1:]:
            _collect_variables(sub, out)
    else:
        out.add(expr[1])


_PRECEDENCE = {"or": 0, "and": 1, "not": 2}


def _text(expr, parent: str | None) -> str:
    if isinstance(expr, bool):
        return "true" if expr else "false"
    op = expr[0]
    if op in ("and", "or"):
        if len(expr) == 1:
            return "true" if op == "and" else "false"
        joined = f" {op} ".join(_text(sub, op) for sub in expr[1:])
        if parent is not None and _PRECEDENCE[op] < _PRECEDENCE[parent]:
            return f"({joined})"
        return joined
    if op == "not":
        return f"not {_text(expr[1], 'not')}"
    value = expr[2]
    shown = value if isinstance(value, int) else str(value)
    return f"{expr[1]} {op} {shown}"


def validate_condition(
    condition: Condition, variables: Sequence[VariableSpec] | Mapping[str, VariableSpec]
) -> list[str]:
    """Return problem descriptions (empty when the condition is well-formed)."""
    if isinstance(variables, Mapping):
        by_name = dict(variables)
    else:
        by_name = {v.name: v for v in variables}
    problems: list[str] = []

    def walk(expr) -> None:
        if isinstance(expr, bool):
            return
        op = expr[0]
        if op in ("and", "or", "not"):
            for sub in expr[1:]:
                walk(sub)
            return
        _, name, constant = expr
        spec = by_name.get(name)
        if spec is None:
            problems.append(f"references undeclared variable {name!r}")
            return
        if op in ORDERED:
            if not spec.is_integer():
                problems.append(
                    f"ordered comparator {op!r} on non-integer domain of {name!r}"
                )
            elif not isinstance(constant, int):
                problems.append(
                    f"ordered comparator {op!r} on {name!r} needs an integer constant"
                )
        elif constant not in spec.domain:
            problems.append(
                f"constant {constant!r} is outside the domain of {name!r}"
            )

    walk(condition.expr)
    return problems
