"""Forward-chaining evaluation of parsed rules against a knowledge base.

Evaluation is naive: every pass re-evaluates every rule body in file order
and asserts each head instantiation, until a pass adds no fact.  Built-ins
that create individuals memoize, so the individual universe stays finite
and the fixpoint is reached.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..kb import RDF_TYPE, Assertion, KnowledgeBase, Literal, Name, Var, sort_key
from .builtins import Behavior, BuiltinRegistry
from .syntax import BuiltinAtom, ClassAtom, PropertyAtom, Rule

log = logging.getLogger(__name__)

Binding = dict


class EvaluationError(RuntimeError):
    pass


class FixpointNotReached(RuntimeError):
    def __init__(self, max_iters: int, firing: list[str]):
        super().__init__(
            f"no fixpoint after {max_iters} passes; rules still firing: {', '.join(firing) or '(none)'}"
        )
        self.firing = firing


@dataclass
class RunStats:
    iterations: int = 0
    facts_added: int = 0
    fires: dict[str, int] = field(default_factory=dict)
    rule_facts: dict[str, int] = field(default_factory=dict)
    facts_per_pass: list[int] = field(default_factory=list)


def rule_id(rule: Rule, index: int) -> str:
    return rule.label or f"rule{index + 1}"


def _resolve(term, binding):
    if isinstance(term, Var):
        return binding.get(term.name, term)
    return term


def _unify(args, values, binding) -> Binding | None:
    out = dict(binding)
    for a, v in zip(args, values):
        a = _resolve(a, out)
        if isinstance(a, Var):
            out[a.name] = v
        elif a != v:
            return None
    return out


def _match(kb: KnowledgeBase, registry: BuiltinRegistry, atom, binding: Binding) -> list[Binding]:
    if isinstance(atom, ClassAtom):
        pattern = (_resolve(atom.arg, binding), RDF_TYPE, atom.cls)
    elif isinstance(atom, PropertyAtom):
        pattern = (_resolve(atom.subj, binding), atom.prop, _resolve(atom.obj, binding))
    else:
        return _call_builtin(kb, registry, atom, binding)
    out = []
    for b in kb.query(*pattern):
        merged = dict(binding)
        merged.update(b)
        out.append(merged)
    return out


def _call_builtin(kb, registry, atom: BuiltinAtom, binding) -> list[Binding]:
    builtin = registry.get(atom.name)
    if builtin is None:
        raise EvaluationError(f"unknown built-in {atom.name}")
    args = tuple(_resolve(a, binding) for a in atom.args)
    unbound = [i for i, a in enumerate(args) if isinstance(a, Var)]
    if builtin.behavior is Behavior.TEST:
        if unbound:
            names = ", ".join(f"?{args[i].name}" for i in unbound)
            raise EvaluationError(f"test built-in {atom.name} called with unbound {names}")
        return [binding] if builtin.fn(kb, *args) else []
    illegal = [i for i in unbound if i not in builtin.binds]
    if illegal:
        names = ", ".join(f"?{args[i].name}" for i in illegal)
        raise EvaluationError(f"built-in {atom.name} cannot bind {names}")
    out = []
    for values in builtin.fn(kb, args):
        b = _unify(args, values, binding)
        if b is not None:
            out.append(b)
    return out


def evaluate_body(kb: KnowledgeBase, registry: BuiltinRegistry, body: Sequence) -> list[Binding]:
    """Left-to-right join of ``body``; returns every complete binding in a stable order."""
    bindings: list[Binding] = [{}]
    for atom in body:
        nxt: list[Binding] = []
        for b in bindings:
            nxt.extend(_match(kb, registry, atom, b))
        bindings = nxt
        if not bindings:
            break
    seen = set()
    out = []
    for b in bindings:
        key = tuple(sorted((k, sort_key(v)) for k, v in b.items()))
        if key not in seen:
            seen.add(key)
            out.append(b)
    return out


def instantiate(atom, binding) -> Assertion:
    if isinstance(atom, ClassAtom):
        ind = _resolve(atom.arg, binding)
        if not isinstance(ind, Name):
            raise EvaluationError(f"class {atom.cls} asserted on non-individual {sort_key(ind)}")
        return Assertion(ind, RDF_TYPE, atom.cls)
    subj = _resolve(atom.subj, binding)
    obj = _resolve(atom.obj, binding)
    if not isinstance(subj, Name):
        raise EvaluationError(f"property {atom.prop} asserted on non-individual {sort_key(subj)}")
    return Assertion(subj, atom.prop, obj)


def prepare(kb: KnowledgeBase, rules: Sequence[Rule]) -> None:
    """Declare classes and properties that the rules mention but the schema lacks.

    Unknown classes go under DomainConcept.  Unknown properties become object
    properties unless some atom gives them a literal object.
    """
    domain = Name("dbb", "DomainConcept")
    literal_props = set()
    props = {}
    for i, rule in enumerate(rules):
        unsafe = rule.head_variables() - rule.body_variables()
        if unsafe or not rule.body:
            names = ", ".join(sorted(f"?{v}" for v in unsafe)) or "(empty body)"
            raise EvaluationError(f"unsafe rule {rule_id(rule, i)}: {names}")
        for atom in (*rule.body, *rule.head):
            if isinstance(atom, ClassAtom) and not kb.has_class(atom.cls):
                log.warning("class %s not in schema; declaring it under %s", atom.cls, domain)
                kb.declare_class(atom.cls, [domain] if kb.has_class(domain) else [])
            elif isinstance(atom, PropertyAtom):
                props.setdefault(atom.prop, atom)
                if isinstance(atom.obj, Literal):
                    literal_props.add(atom.prop)
    for prop in props:
        if not kb.has_property(prop):
            kind = "data" if prop in literal_props else "object"
            log.warning("property %s not in schema; declaring it as %s property", prop, kind)
            kb.declare_property(prop, kind)


def run_pass(kb, registry, rules, fires) -> dict[str, int]:
    """One pass over all rules; returns the number of new facts per rule id."""
    added: dict[str, int] = {}
    for i, rule in enumerate(rules):
        rid = rule_id(rule, i)
        before = len(kb)
        for binding in evaluate_body(kb, registry, rule.body):
            new = False
            for atom in rule.head:
                new |= kb.assert_fact(instantiate(atom, binding))
            if new:
                fires[rid] = fires.get(rid, 0) + 1
        added[rid] = len(kb) - before
    return added


def run_to_fixpoint(
    kb: KnowledgeBase,
    registry: BuiltinRegistry,
    rules: Sequence[Rule],
    max_iters: int = 100,
    on_pass: Callable[[int, KnowledgeBase], None] | None = None,
) -> RunStats:
    """Apply ``rules`` until a full pass adds no fact.

    Facts asserted as side effects of built-ins count as additions.
    Raises :class:`FixpointNotReached` after ``max_iters`` passes.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    prepare(kb, rules)
    ids = [rule_id(r, i) for i, r in enumerate(rules)]
    stats = RunStats(fires=dict.fromkeys(ids, 0), rule_facts=dict.fromkeys(ids, 0))
    start = len(kb)
    for n in range(1, max_iters + 1):
        before = len(kb)
        added = run_pass(kb, registry, rules, stats.fires)
        stats.iterations = n
        for rid, k in added.items():
            stats.rule_facts[rid] += k
        stats.facts_per_pass.append(len(kb))
        if on_pass is not None:
            on_pass(n, kb)
        if len(kb) == before:
            stats.facts_added = len(kb) - start
            return stats
        last_added = added
    raise FixpointNotReached(max_iters, [rid for rid, k in last_added.items() if k])
