"""Topological predicates on boxes and their rule built-ins.

These are this package's own formalizations: ``intersect`` needs overlap of
positive length on every axis; ``touch`` is a near-contact without overlap;
``upper`` compares the lower face of one box with the upper face of the
other and requires overlapping footprints; ``perpendicular`` compares
dominant axes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .detect import stored_box
from .geom import Aabb, dominant_axis, gap_distance, overlap_extents
from .kb import KnowledgeBase, Literal, Name, Var, N
from .rules.builtins import Behavior, BuiltinRegistry


@dataclass(frozen=True)
class TopoParams:
    contact_eps: float = 0.10
    upper_eps: float = 0.25
    distance_tolerance: float = 50.0

    def __post_init__(self):
        if min(self.contact_eps, self.upper_eps, self.distance_tolerance) < 0:
            raise ValueError("topology tolerances must be non-negative")


def intersect(a: Aabb, b: Aabb) -> bool:
    return all(o > 0 for o in overlap_extents(a, b))


def touch(a: Aabb, b: Aabb, contact_eps: float = 0.10) -> bool:
    return not intersect(a, b) and gap_distance(a, b) <= contact_eps


def is_connected(a: Aabb, b: Aabb, contact_eps: float = 0.10) -> bool:
    return intersect(a, b) or touch(a, b, contact_eps)


def upper(a: Aabb, b: Aabb, upper_eps: float = 0.25) -> bool:
    """``a`` sits on or above ``b`` with overlapping xy-footprints."""
    ox, oy, _ = overlap_extents(a, b)
    return a.min_corner.z >= b.max_corner.z - upper_eps and ox > 0 and oy > 0


def perpendicular(a: Aabb, b: Aabb) -> bool:
    return dominant_axis(a) != dominant_axis(b)


def is_distant_from(a: Aabb, b: Aabb, d: float, tol: float) -> bool:
    if d < 0 or tol < 0:
        raise ValueError("distance and tolerance must be non-negative")
    return abs(math.dist(a.center, b.center) - d) <= tol


def _geometries(kb: KnowledgeBase) -> list[tuple[Name, Aabb]]:
    out = []
    for ind in kb.individuals_of(N("Geometry")):
        box = stored_box(kb, ind)
        if box is not None:
            out.append((ind, box))
    return out


def _real(v, what):
    if not (isinstance(v, Literal) and v.kind == "real"):
        raise ValueError(f"{what} must be a real literal, got {v}")
    return v.value


def relational(prop: Name, test, extra_args: int = 0):
    """Wrap a box predicate as a relational built-in asserting ``prop`` on success.

    Trailing ``extra_args`` arguments are literal parameters passed to ``test``.
    Unbound box arguments enumerate stored geometries; an individual is never
    paired with itself by enumeration.
    """

    def evaluate(kb: KnowledgeBase, args):
        x, y, *extra = args
        params = [_real(v, f"argument {i + 3} of {prop.local}") for i, v in enumerate(extra)]
        geoms = None
        if isinstance(x, Var) or isinstance(y, Var):
            geoms = _geometries(kb)

        def candidates(term, other):
            if not isinstance(term, Var):
                box = stored_box(kb, term)
                return [(term, box)] if box is not None else []
            return [(n, b) for n, b in geoms if n != other]

        for xn, xb in candidates(x, y):
            for yn, yb in candidates(y, xn):
                if test(xb, yb, *params):
                    kb.add(xn, prop, yn)
                    yield (xn, yn, *extra)

    return evaluate


def register_builtins(reg: BuiltinRegistry, params: TopoParams) -> None:
    p = params
    table = [
        ("Intersect", lambda a, b: intersect(a, b), [2]),
        ("Touch", lambda a, b: touch(a, b, p.contact_eps), [2]),
        ("Upper", lambda a, b: upper(a, b, p.upper_eps), [2]),
        ("Perpendicular", perpendicular, [2]),
        ("IsConnected", lambda a, b: is_connected(a, b, p.contact_eps), [2]),
        ("IsDistantFrom", lambda a, b, d, tol=p.distance_tolerance: is_distant_from(a, b, d, tol), [3, 4]),
    ]
    for local, test, arities in table:
        reg.add(
            f"3D_swrlb_Topology:{local}", arities, Behavior.RELATIONAL,
            relational(N(local), test), binds=[0, 1],
        )
