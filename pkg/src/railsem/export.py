"""VRML97 scene export and triple dump of the enriched knowledge base."""
from __future__ import annotations

from .annotate import ColorMap, annotation_class, color_for
from .detect import BOX_PROPS, stored_box
from .kb import KnowledgeBase, N, natural_key

VRML_HEADER = "#VRML V2.0 utf8"


class ExportError(ValueError):
    pass


def boxed_geometries(kb: KnowledgeBase):
    """Geometry individuals in id order, each with its stored box.

    An individual carrying some but not all box properties is an error.
    """
    out = []
    for ind in sorted(kb.individuals_of(N("Geometry")), key=natural_key):
        box = stored_box(kb, ind)
        if box is None:
            missing = [str(p) for p in BOX_PROPS.values() if kb.value(ind, p) is None]
            raise ExportError(f"geometry {ind} lacks box properties: {', '.join(missing)}")
        out.append((ind, box))
    return out


def _f(v: float) -> str:
    s = f"{v:.4f}"
    return "0.0000" if s == "-0.0000" else s


def export_vrml(kb: KnowledgeBase, colormap: ColorMap | None = None) -> str:
    colormap = colormap if colormap is not None else ColorMap.defaults()
    lines = [VRML_HEADER]
    for ind, box in boxed_geometries(kb):
        cls = annotation_class(kb, ind)
        r, g, b = color_for(kb, ind, colormap)
        c, e = box.center, box.extents
        lines.append(f"# {ind} {cls}")
        lines.append(
            f"Transform {{ translation {_f(c.x)} {_f(c.y)} {_f(c.z)} children [ "
            f"Shape {{ appearance Appearance {{ material Material {{ diffuseColor {_f(r)} {_f(g)} {_f(b)} }} }} "
            f"geometry Box {{ size {_f(e.x)} {_f(e.y)} {_f(e.z)} }} }} ] }}"
        )
    return "\n".join(lines) + "\n"


def export_triples(kb: KnowledgeBase) -> str:
    return kb.dump()
