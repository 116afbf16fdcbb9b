"""Built-in registry.

A built-in has one of three behaviors:

* ``TEST`` - every argument must be bound; the evaluator returns a bool.
* ``RELATIONAL`` - may be called with unbound arguments; the evaluator
  enumerates complete argument tuples drawn from existing individuals.
* ``GENERATIVE`` - may bind the declared positions to individuals it creates.

Relational and generative evaluators receive the argument tuple with
:class:`~railsem.kb.Var` in unbound positions and yield complete tuples.
"""
from __future__ import annotations

import enum
import operator
from dataclasses import dataclass
from typing import Callable, Iterable

from ..kb import KnowledgeBase, Literal, Name

BUILTIN_PREFIXES = ("swrlb", "3D_swrlb_Processing", "3D_swrlb_Topology")


class Behavior(enum.Enum):
    TEST = "test"
    RELATIONAL = "relational"
    GENERATIVE = "generative"


@dataclass(frozen=True)
class Builtin:
    name: Name
    arities: frozenset
    behavior: Behavior
    fn: Callable
    binds: frozenset = frozenset()


class BuiltinRegistry:
    def __init__(self):
        self._by_name: dict[Name, Builtin] = {}

    def register(self, builtin: Builtin) -> None:
        if builtin.name in self._by_name:
            raise ValueError(f"built-in {builtin.name} already registered")
        if builtin.behavior is not Behavior.TEST and not builtin.binds:
            raise ValueError(f"{builtin.behavior.value} built-in {builtin.name} must declare bindable positions")
        self._by_name[builtin.name] = builtin

    def add(self, name: str, arities: Iterable[int], behavior: Behavior, fn, binds: Iterable[int] = ()) -> Builtin:
        b = Builtin(Name.parse(name), frozenset(arities), behavior, fn, frozenset(binds))
        self.register(b)
        return b

    def get(self, name: Name) -> Builtin | None:
        return self._by_name.get(name)

    def __contains__(self, name: Name) -> bool:
        return name in self._by_name

    def names(self) -> list[str]:
        return sorted(str(n) for n in self._by_name)

    def is_builtin_namespace(self, prefix: str) -> bool:
        return prefix in BUILTIN_PREFIXES or any(n.prefix == prefix for n in self._by_name)

    @classmethod
    def standard(cls, detector=None, topo_params=None) -> "BuiltinRegistry":
        """Comparisons plus the 3D-processing and topology families."""
        from .. import detect, topo

        reg = cls()
        register_comparisons(reg)
        detect.register_builtins(reg, detector if detector is not None else detect.ElementDetector())
        topo.register_builtins(reg, topo_params if topo_params is not None else topo.TopoParams())
        return reg


def _numeric_test(op):
    def test(kb: KnowledgeBase, a, b) -> bool:
        if not (isinstance(a, Literal) and isinstance(b, Literal)):
            return False
        if a.kind != "real" or b.kind != "real":
            return False
        return op(a.value, b.value)

    return test


def _equal(kb: KnowledgeBase, a, b) -> bool:
    if isinstance(a, Literal) and isinstance(b, Literal) and a.kind == b.kind == "real":
        return a.value == b.value
    return a == b


def register_comparisons(reg: BuiltinRegistry) -> None:
    for name, op in (
        ("greaterThan", operator.gt),
        ("lessThan", operator.lt),
        ("greaterThanOrEqual", operator.ge),
        ("lessThanOrEqual", operator.le),
    ):
        reg.add(f"swrlb:{name}", [2], Behavior.TEST, _numeric_test(op))
    reg.add("swrlb:equal", [2], Behavior.TEST, _equal)
