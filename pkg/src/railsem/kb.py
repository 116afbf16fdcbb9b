"""In-memory knowledge base: class/property hierarchy plus a duplicate-free fact set.

Facts are (subject, predicate, object) triples.  Class membership uses the
reserved ``rdf:type`` predicate.  Queries apply subsumption closure over both
the class hierarchy and the property hierarchy; the stored fact set itself is
never closed, so the triple dump contains asserted facts only.
"""
from __future__ import annotations

import logging
import math
import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

log = logging.getLogger(__name__)

DEFAULT_PREFIX = "dbb"


class KBError(ValueError):
    """Schema or referential-integrity violation."""


@dataclass(frozen=True, order=True)
class Name:
    prefix: str
    local: str

    def __post_init__(self):
        if not self.local:
            raise KBError("name with empty local part")

    @classmethod
    def parse(cls, text: str, default_prefix: str = DEFAULT_PREFIX) -> "Name":
        if ":" in text:
            prefix, local = text.split(":", 1)
            return cls(prefix, local)
        return cls(default_prefix, text)

    def __str__(self):
        return f"{self.prefix}:{self.local}"


@dataclass(frozen=True)
class Literal:
    """Tagged data value: ``real``, ``string`` or ``bool``."""

    kind: str
    value: Union[float, str, bool]

    def __post_init__(self):
        if self.kind == "real" and not math.isfinite(self.value):
            raise KBError(f"non-finite real literal {self.value!r}")

    @classmethod
    def of(cls, value) -> "Literal":
        if isinstance(value, Literal):
            return value
        if isinstance(value, bool):
            return cls("bool", value)
        if isinstance(value, (int, float)):
            return cls("real", float(value))
        if isinstance(value, str):
            return cls("string", value)
        raise TypeError(f"unsupported literal value {value!r}")

    def render(self) -> str:
        if self.kind == "real":
            body = f"{self.value:.6f}"
        elif self.kind == "bool":
            body = "true" if self.value else "false"
        else:
            body = _escape(self.value)
        return f'"{body}"^^{self.kind}'

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return f"?{self.name}"


Value = Union[Name, Literal]
Term = Union[Name, Literal, Var]

RDF_TYPE = Name("rdf", "type")


@dataclass(frozen=True)
class Assertion:
    subject: Name
    predicate: Name
    object: Value

    def render(self) -> str:
        obj = self.object.render() if isinstance(self.object, Literal) else str(self.object)
        return f"{self.subject}\t{self.predicate}\t{obj}"


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\t": "\\t", "\n": "\\n"}


def _escape(s: str) -> str:
    return "".join(_ESCAPES.get(c, c) for c in s)


def sort_key(value) -> str:
    """Rendered form used for deterministic ordering."""
    if isinstance(value, Literal):
        return value.render()
    return str(value)


def natural_key(name: Name):
    """Sort key treating digit runs numerically, so geo_2 < geo_10."""
    parts = re.split(r"(\d+)", str(name))
    return [(0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts]


class KnowledgeBase:
    def __init__(self):
        self._class_parents: dict[Name, set[Name]] = {}
        self._prop_parents: dict[Name, set[Name]] = {}
        self._prop_kind: dict[Name, str] = {}
        self.individuals: set[Name] = set()
        self.facts: set[Assertion] = set()
        self._by_pred: dict[Name, set[Assertion]] = defaultdict(set)
        self._by_subj: dict[Name, set[Assertion]] = defaultdict(set)
        self._by_class: dict[Name, set[Assertion]] = defaultdict(set)
        self._cache: dict[tuple[str, Name], frozenset[Name]] = {}

    # -- schema ---------------------------------------------------------

    @property
    def classes(self) -> set[Name]:
        return set(self._class_parents)

    @property
    def properties(self) -> set[Name]:
        return set(self._prop_parents)

    def has_class(self, cls: Name) -> bool:
        return cls in self._class_parents

    def has_property(self, prop: Name) -> bool:
        return prop in self._prop_parents

    def property_kind(self, prop: Name) -> str:
        return self._prop_kind[prop]

    def declare_class(self, cls: Name, parents: Iterable[Name] = ()) -> None:
        parents = set(parents)
        self._declare(self._class_parents, cls, parents, "class")

    def declare_property(self, prop: Name, kind: str = "object", parents: Iterable[Name] = ()) -> None:
        """Declare an object (``kind="object"``) or data (``kind="data"``) property."""
        if kind not in ("object", "data"):
            raise KBError(f"unknown property kind {kind!r}")
        if prop == RDF_TYPE:
            raise KBError("rdf:type is reserved")
        existing = self._prop_kind.get(prop)
        if existing is not None and existing != kind:
            raise KBError(f"property {prop} already declared as {existing}")
        self._declare(self._prop_parents, prop, set(parents), "property")
        self._prop_kind[prop] = kind

    def _declare(self, graph, node, parents, what):
        for p in parents:
            if p not in graph and p != node:
                raise KBError(f"unknown parent {what} {p}")
        if node in parents or any(node in self._ancestors(graph, p) for p in parents if p in graph):
            raise KBError(f"declaring {node} under {sorted(map(str, parents))} introduces a cycle")
        graph.setdefault(node, set()).update(parents)
        self._cache.clear()

    @staticmethod
    def _ancestors(graph, node) -> set[Name]:
        seen = {node}
        stack = [node]
        while stack:
            for p in graph.get(stack.pop(), ()):
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    def _cached(self, tag, node, compute):
        key = (tag, node)
        if key not in self._cache:
            self._cache[key] = frozenset(compute())
        return self._cache[key]

    def superclasses(self, cls: Name) -> frozenset[Name]:
        """Reflexive-transitive superclasses of ``cls``."""
        return self._cached("sup-c", cls, lambda: self._ancestors(self._class_parents, cls))

    def subclasses(self, cls: Name) -> frozenset[Name]:
        return self._cached(
            "sub-c", cls, lambda: (c for c in self._class_parents if cls in self.superclasses(c))
        )

    def superproperties(self, prop: Name) -> frozenset[Name]:
        return self._cached("sup-p", prop, lambda: self._ancestors(self._prop_parents, prop))

    def subproperties(self, prop: Name) -> frozenset[Name]:
        return self._cached(
            "sub-p", prop, lambda: (p for p in self._prop_parents if prop in self.superproperties(p))
        )

    def is_subclass(self, sub: Name, sup: Name) -> bool:
        return sup in self.superclasses(sub)

    def class_depth(self, cls: Name) -> int:
        """Longest parent chain from ``cls`` up to a root class."""
        parents = self._class_parents.get(cls, ())
        return 0 if not parents else 1 + max(self.class_depth(p) for p in parents)

    # -- facts ----------------------------------------------------------

    def add_individual(self, ind: Name) -> bool:
        if ind in self.individuals:
            return False
        self.individuals.add(ind)
        return True

    def assert_fact(self, fact: Assertion) -> bool:
        """Store ``fact``; returns True iff it was new."""
        s, p, o = fact.subject, fact.predicate, fact.object
        if not isinstance(s, Name):
            raise KBError(f"subject must be an individual name, got {s!r}")
        if p == RDF_TYPE:
            if not isinstance(o, Name) or o not in self._class_parents:
                raise KBError(f"undeclared class {o} in type assertion on {s}")
            self.individuals.add(s)
        else:
            if p not in self._prop_parents:
                raise KBError(f"undeclared property {p}")
            if s not in self.individuals:
                raise KBError(f"unknown individual {s}")
            if self._prop_kind[p] == "object":
                if not isinstance(o, Name) or o not in self.individuals:
                    raise KBError(f"object of {p} must be a known individual, got {sort_key(o)}")
            elif not isinstance(o, Literal):
                raise KBError(f"data property {p} needs a literal, got {o}")
        if fact in self.facts:
            return False
        self.facts.add(fact)
        self._by_pred[p].add(fact)
        self._by_subj[s].add(fact)
        if p == RDF_TYPE:
            self._by_class[o].add(fact)
        return True

    def add(self, subject: Name, predicate: Name, obj) -> bool:
        if not isinstance(obj, Name):
            obj = Literal.of(obj)
        return self.assert_fact(Assertion(subject, predicate, obj))

    def add_type(self, ind: Name, cls: Name) -> bool:
        return self.assert_fact(Assertion(ind, RDF_TYPE, cls))

    def __len__(self):
        return len(self.facts)

    def reset(self) -> None:
        self.individuals.clear()
        self.facts.clear()
        self._by_pred.clear()
        self._by_subj.clear()
        self._by_class.clear()

    # -- queries --------------------------------------------------------

    def types_of(self, ind: Name) -> set[Name]:
        """Entailed classes of ``ind`` (asserted types plus their superclasses)."""
        out: set[Name] = set()
        for f in self._by_subj.get(ind, ()):
            if f.predicate == RDF_TYPE:
                out |= self.superclasses(f.object)
        return out

    def individuals_of(self, cls: Name) -> list[Name]:
        return [b["x"] for b in self.query(Var("x"), RDF_TYPE, cls)]

    def values(self, subject: Name, prop: Name) -> list[Value]:
        return [b["v"] for b in self.query(subject, prop, Var("v"))]

    def value(self, subject: Name, prop: Name):
        """Single data value of ``prop`` on ``subject`` (None if absent)."""
        vals = self.values(subject, prop)
        if not vals:
            return None
        v = vals[0]
        return v.value if isinstance(v, Literal) else v

    def _entailed(self, candidates: Iterable[Assertion]) -> Iterator[tuple[Name, Name, Value]]:
        for f in candidates:
            if f.predicate == RDF_TYPE:
                for c in self.superclasses(f.object):
                    yield f.subject, RDF_TYPE, c
            else:
                for q in self.superproperties(f.predicate):
                    yield f.subject, q, f.object

    def _candidates(self, s, p, o) -> Iterable[Assertion]:
        if isinstance(s, Name):
            return self._by_subj.get(s, ())
        if isinstance(p, Name):
            if p == RDF_TYPE:
                if isinstance(o, Name):
                    out = set()
                    for c in self.subclasses(o):
                        out |= self._by_class.get(c, set())
                    return out
                return self._by_pred.get(RDF_TYPE, ())
            out = set()
            for q in self.subproperties(p):
                out |= self._by_pred.get(q, set())
            return out
        return self.facts

    def query(self, s: Term, p: Term, o: Term) -> list[dict[str, Value]]:
        """All bindings of the pattern's variables that yield an entailed fact.

        Results are sorted lexicographically on the rendered bound values.
        """
        pattern = (s, p, o)
        results = set()
        for triple in self._entailed(self._candidates(s, p, o)):
            binding: dict[str, Value] = {}
            for pat, val in zip(pattern, triple):
                if isinstance(pat, Var):
                    prev = binding.get(pat.name)
                    if prev is not None and prev != val:
                        break
                    binding[pat.name] = val
                elif pat != val:
                    break
            else:
                results.add(tuple(sorted(binding.items())))
        return [dict(r) for r in sorted(results, key=lambda r: [(k, sort_key(v)) for k, v in r])]

    def dump(self) -> str:
        """Sorted tab-separated triple dump, newline-terminated (empty if no facts)."""
        lines = sorted(f.render() for f in self.facts)
        return "".join(line + "\n" for line in lines)


def N(text: str) -> Name:
    """Shorthand for a name under the default prefix (or an explicit ``prefix:local``)."""
    return Name.parse(text)


# Top-level schema.  Four object properties are declared; a fifth is
# announced but unnamed, so none is invented here.
TOP_CLASSES = ("Algorithm", "Geometry", "DomainConcept", "Characteristics", "Scene")
TOP_OBJECT_PROPERTIES = ("hasTopologicRelation", "IsDeseignedFor", "hasGeometry", "hasCharacteristics")
GEOMETRY_CLASSES = ("Vertical_BoundingBox", "Horizontal_BoundingBox", "Ground")
DATA_PROPERTIES = (
    "hasHeight", "hasWidth", "hasDepth",
    "hasCentroidX", "hasCentroidY", "hasCentroidZ",
    "hasPointCount", "hasPointCloudDirectory",
)
TOPOLOGY_PROPERTIES = ("Intersect", "Touch", "Upper", "Perpendicular", "IsDistantFrom", "IsConnected")


def seed_schema(kb: KnowledgeBase | None = None) -> KnowledgeBase:
    kb = kb if kb is not None else KnowledgeBase()
    for c in TOP_CLASSES:
        kb.declare_class(N(c))
    kb.declare_class(N("FacilityElement"), [N("DomainConcept")])
    kb.declare_class(N("Furniture"), [N("DomainConcept")])
    for c in GEOMETRY_CLASSES:
        kb.declare_class(N(c), [N("Geometry")])
    for p in TOP_OBJECT_PROPERTIES:
        kb.declare_property(N(p), "object")
    for p in TOPOLOGY_PROPERTIES:
        kb.declare_property(N(p), "object", [N("hasTopologicRelation")])
    for p in DATA_PROPERTIES:
        kb.declare_property(N(p), "data")
    return kb
