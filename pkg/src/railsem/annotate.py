"""Railway domain knowledge: class declarations, shipped rules, colors and summaries."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .kb import KnowledgeBase, Name, N

DOMAIN_CLASSES = ("Mast", "Schaltanlage", "SignalCandidate", "MainSignal", "DistantSignal")

RGB = tuple[float, float, float]


def default_rules() -> str:
    return resources.files("railsem").joinpath("data/default_rules.swrl").read_text(encoding="utf-8")


def declare_domain(kb: KnowledgeBase) -> KnowledgeBase:
    for c in DOMAIN_CLASSES:
        kb.declare_class(N(c), [N("FacilityElement")])
    return kb


@dataclass
class ColorMap:
    colors: dict[Name, RGB] = field(default_factory=dict)
    default: RGB = (0.6, 0.6, 0.6)

    def __post_init__(self):
        for rgb in (*self.colors.values(), self.default):
            if len(rgb) != 3 or not all(0.0 <= c <= 1.0 for c in rgb):
                raise ValueError(f"color components must lie in [0, 1], got {rgb}")

    @classmethod
    def defaults(cls) -> "ColorMap":
        return cls({
            N("Mast"): (0.8, 0.1, 0.1),
            N("Schaltanlage"): (0.1, 0.1, 0.8),
            N("MainSignal"): (0.1, 0.7, 0.1),
            N("DistantSignal"): (0.9, 0.7, 0.1),
            N("Ground"): (0.3, 0.3, 0.3),
        })

    def with_overrides(self, text: str) -> "ColorMap":
        """Apply ``ClassName r g b`` lines (``#`` comments allowed)."""
        colors = dict(self.colors)
        for lineno, line in enumerate(text.splitlines(), 1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            parts = s.split()
            if len(parts) != 4:
                raise ValueError(f"color line {lineno}: expected 'ClassName r g b'")
            try:
                rgb = tuple(float(v) for v in parts[1:])
            except ValueError:
                raise ValueError(f"color line {lineno}: bad component in {s!r}") from None
            colors[Name.parse(parts[0])] = rgb
        return ColorMap(colors, self.default)


def most_specific(kb: KnowledgeBase, classes) -> Name | None:
    """Deepest class in the hierarchy; ties go to the smallest rendered name."""
    ranked = sorted(classes, key=lambda c: (-kb.class_depth(c), str(c)))
    return ranked[0] if ranked else None


def annotation_class(kb: KnowledgeBase, ind: Name) -> Name | None:
    """The class shown for ``ind``: its most specific domain class, else its most specific class."""
    types = kb.types_of(ind)
    domain = N("DomainConcept")
    annotated = [c for c in types if c != domain and kb.is_subclass(c, domain)]
    return most_specific(kb, annotated or types)


def color_for(kb: KnowledgeBase, ind: Name, colormap: ColorMap) -> RGB:
    colored = [c for c in kb.types_of(ind) if c in colormap.colors]
    best = most_specific(kb, colored)
    return colormap.colors[best] if best is not None else colormap.default


def summarize(kb: KnowledgeBase) -> list[tuple[Name, int]]:
    """Instance counts (direct and inherited) per DomainConcept subclass, sorted by name."""
    domain = N("DomainConcept")
    if not kb.has_class(domain):
        return []
    rows = []
    for cls in sorted(kb.subclasses(domain), key=str):
        if cls == domain:
            continue
        count = len(kb.individuals_of(cls))
        if count:
            rows.append((cls, count))
    return rows


def format_summary(rows) -> str:
    return "".join(f"{cls.local} {count}\n" for cls, count in rows)
