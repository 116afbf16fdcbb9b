"""Command line: ``railsem annotate | synth | check-rules``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import annotate as ann
from .detect import DetectionError, DetectionParams
from .export import ExportError, export_triples, export_vrml
from .kb import KBError
from .pipeline import PipelineConfig, annotate_scene
from .rules import BuiltinRegistry, EvaluationError, FixpointNotReached, RuleSyntaxError, parse_rules
from .synth import SceneSpecError, load_spec, reference_spec, write_scene
from .topo import TopoParams

EXIT_OK, EXIT_RULES, EXIT_IO, EXIT_FIXPOINT = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"railsem: {msg}", file=sys.stderr)


def _read_rules(path) -> tuple[str, str]:
    if path is None:
        return ann.default_rules(), "<default>"
    return Path(path).read_text(encoding="utf-8"), str(path)


def cmd_annotate(args) -> int:
    try:
        rules_text, rules_name = _read_rules(args.rules)
        colormap = ann.ColorMap.defaults()
        if args.colors:
            colormap = colormap.with_overrides(Path(args.colors).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_IO
    try:
        config = PipelineConfig(
            DetectionParams(voxel_resolution=args.voxel, min_points=args.min_points),
            TopoParams(contact_eps=args.contact_eps),
            args.max_iters,
        )
    except ValueError as exc:
        _err(str(exc))
        return EXIT_RULES
    print(
        f"# railsem annotate rules={rules_name} cloud_dir={args.cloud_dir} "
        f"voxel={config.detection.voxel_resolution} min_points={config.detection.min_points} "
        f"ratio={config.detection.ratio_threshold} min_major={config.detection.min_major_extent} "
        f"ground_slab={config.detection.ground_slab} contact_eps={config.topo.contact_eps} "
        f"upper_eps={config.topo.upper_eps} max_iters={config.max_iters}"
    )

    on_pass = None
    if args.snapshot_passes:
        stem = Path(args.out).with_suffix("") if args.out else Path("annotated")

        def on_pass(n, kb):
            Path(f"{stem}.pass{n}.wrl").write_text(export_vrml(kb, colormap), encoding="utf-8")

    try:
        result = annotate_scene(args.cloud_dir, rules_text, config, on_pass)
    except RuleSyntaxError as exc:
        _err(f"{rules_name}:{exc.line}:{exc.col}: {exc.message}")
        return EXIT_RULES
    except FixpointNotReached as exc:
        _err(str(exc))
        return EXIT_FIXPOINT
    except (DetectionError, OSError) as exc:
        _err(str(exc))
        return EXIT_IO
    except (EvaluationError, KBError) as exc:
        _err(f"rule evaluation failed: {exc}")
        return EXIT_RULES
    except ExportError as exc:
        _err(str(exc))
        return EXIT_IO

    try:
        if args.out:
            Path(args.out).write_text(export_vrml(result.kb, colormap), encoding="utf-8")
        if args.kb_out:
            Path(args.kb_out).write_text(export_triples(result.kb), encoding="utf-8")
    except (OSError, ExportError) as exc:
        _err(str(exc))
        return EXIT_IO

    sys.stdout.write(ann.format_summary(ann.summarize(result.kb)))
    st = result.stats
    print(f"# passes={st.iterations} facts_added={st.facts_added} facts_total={len(result.kb)}")
    for rid, count in st.fires.items():
        print(f"#   {rid}: fired {count}, facts {st.rule_facts[rid]}")
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        if args.reference:
            spec = reference_spec()
        elif args.spec:
            spec = load_spec(args.spec)
        else:
            _err("synth needs --spec <json> or --reference")
            return EXIT_RULES
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO
    except SceneSpecError as exc:
        _err(str(exc))
        return EXIT_RULES
    if args.seed is not None:
        spec.seed = args.seed
    if args.noise_sigma is not None:
        spec.noise_sigma = args.noise_sigma
    try:
        xyz, truth = write_scene(spec, args.out_dir)
    except SceneSpecError as exc:
        _err(f"invalid scene spec: {exc}")
        return EXIT_RULES
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO
    print(f"wrote {xyz} and {truth} ({len(spec.objects)} objects, seed {spec.seed})")
    return EXIT_OK


def cmd_check_rules(args) -> int:
    try:
        text, name = _read_rules(args.rules)
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO
    try:
        rules = parse_rules(text, BuiltinRegistry.standard())
    except RuleSyntaxError as exc:
        _err(f"{name}:{exc.line}:{exc.col}: {exc.message}")
        return EXIT_RULES
    for i, r in enumerate(rules):
        label = r.label or f"rule{i + 1}"
        print(f"{label}: {len(r.body)} body atoms, {len(r.head)} head atoms")
    print(f"{len(rules)} rules OK")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="railsem", description="Rule-driven annotation of railway point clouds.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("annotate", help="detect, annotate and export a scene directory")
    a.add_argument("--cloud-dir", required=True, help="directory of *.xyz files")
    a.add_argument("--rules", help="rule file (default: shipped rules)")
    a.add_argument("--out", help="VRML output file (.wrl)")
    a.add_argument("--kb-out", help="triple dump output file")
    a.add_argument("--colors", help="color overrides, lines of 'ClassName r g b'")
    a.add_argument("--voxel", type=float, default=DetectionParams.voxel_resolution, help="voxel size in m")
    a.add_argument("--min-points", type=int, default=DetectionParams.min_points)
    a.add_argument("--contact-eps", type=float, default=TopoParams.contact_eps, help="contact tolerance in m")
    a.add_argument("--snapshot-passes", action="store_true", help="write one .wrl per engine pass")
    a.add_argument("--max-iters", type=int, default=100)
    a.set_defaults(func=cmd_annotate)

    s = sub.add_parser("synth", help="generate a synthetic scene")
    s.add_argument("--spec", help="scene spec JSON")
    s.add_argument("--reference", action="store_true", help="use the built-in reference scene")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--noise-sigma", type=float)
    s.set_defaults(func=cmd_synth)

    c = sub.add_parser("check-rules", help="parse and safety-check a rule file")
    c.add_argument("--rules", help="rule file (default: shipped rules)")
    c.set_defaults(func=cmd_check_rules)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
