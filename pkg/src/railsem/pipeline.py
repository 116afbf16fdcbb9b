"""End-to-end annotation of a scene directory."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .annotate import declare_domain, default_rules
from .detect import DetectionParams, ElementDetector
from .kb import KnowledgeBase, N, Name, seed_schema
from .rules import BuiltinRegistry, RunStats, parse_rules, run_to_fixpoint
from .topo import TopoParams


@dataclass
class PipelineConfig:
    detection: DetectionParams = field(default_factory=DetectionParams)
    topo: TopoParams = field(default_factory=TopoParams)
    max_iters: int = 100

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class Annotation:
    kb: KnowledgeBase
    stats: RunStats
    detector: ElementDetector


def scene_kb(cloud_dir, scene: Name = N("scene")) -> KnowledgeBase:
    """Seeded schema plus domain classes plus one Scene individual pointing at ``cloud_dir``."""
    kb = declare_domain(seed_schema())
    kb.add_type(scene, N("Scene"))
    kb.add(scene, N("hasPointCloudDirectory"), str(Path(cloud_dir)))
    return kb


def annotate_scene(cloud_dir, rules_text: str | None = None, config: PipelineConfig | None = None,
                   on_pass=None) -> Annotation:
    config = config or PipelineConfig()
    detector = ElementDetector(config.detection)
    registry = BuiltinRegistry.standard(detector, config.topo)
    rules = parse_rules(default_rules() if rules_text is None else rules_text, registry)
    kb = scene_kb(cloud_dir)
    stats = run_to_fixpoint(kb, registry, rules, config.max_iters, on_pass)
    return Annotation(kb, stats, detector)
