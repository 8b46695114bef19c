"""Command-line entry point for the summarization pipeline.

Exit codes: 0 success, 1 validation error, 2 I/O error. Diagnostics go
to stderr; data goes to files (or stdout where noted), so output
artifacts from identical inputs and seeds are byte-identical.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .clustering import (
    DEFAULT_CUTOFF,
    agglomerate,
    cut,
    pairwise_distances,
)
from .datamodel import (
    SPEC_VERSION,
    SummaryParameters,
    ValidationError,
    load_ground_truth,
    load_manifest,
    load_summary,
    read_label_csv,
    segmentation_from_labels,
    write_label_csv,
    write_manifest,
    write_segmentation,
    write_summary,
)
from .evaluation import SynthConfig, jaccard, sweep_cutoff, synth_generate
from .ingest import HistogramConfig, extract_directory
from .keyframes import summarize
from .render import render_html, render_manifest
from .temporal import DEFAULT_MIN_EVENT_DURATION, FusionConfig, refine

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    """Pipeline settings, resolvable from a JSON file plus flags."""

    linkage: str = "average"
    cutoff: float = DEFAULT_CUTOFF
    min_event_duration: float = DEFAULT_MIN_EVENT_DURATION
    method: str = "random_walk"
    seed: int = 0
    normalize: bool = False


_CONFIG_FIELDS = {f.name for f in dataclasses.fields(PipelineConfig)}


def _load_json(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    return doc


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    """Defaults, then config-file entries, then explicit flags."""
    values: dict = {}
    if getattr(args, "config", None):
        doc = _load_json(args.config)
        unknown = sorted(set(doc) - _CONFIG_FIELDS)
        if unknown:
            raise ValidationError(
                f"{args.config}: unknown config key {unknown[0]!r}"
            )
        values.update(doc)
    for name in _CONFIG_FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return PipelineConfig(**values)


def _add_config_flags(parser: argparse.ArgumentParser, *names: str) -> None:
    parser.add_argument("--config", help="JSON config file; flags override it")
    if "linkage" in names:
        parser.add_argument(
            "--linkage", choices=["single", "complete", "average", "ward"]
        )
    if "cutoff" in names:
        parser.add_argument("--cutoff", type=float)
    if "min_event_duration" in names:
        parser.add_argument("--min-event-duration", type=float,
                            dest="min_event_duration")
    if "method" in names:
        parser.add_argument(
            "--method",
            choices=["random_walk", "min_distance", "random", "uniform"],
        )
    if "seed" in names:
        parser.add_argument("--seed", type=int)


def _add_manifest_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--manifest", required=True, help="day manifest JSON")
    parser.add_argument(
        "--assume-interval", type=float, default=None, metavar="SECONDS",
        help="synthesize timestamps at this spacing when the manifest has none",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egosumm",
        description="Keyframe summaries of day-long photostreams",
    )
    parser.add_argument("--version", action="version", version=SPEC_VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-basic", help="color-histogram features for a directory")
    p.add_argument("--images", required=True)
    p.add_argument("--out", required=True, help="manifest JSON to write")
    p.add_argument("--bins", type=int, default=8)
    p.add_argument("--timestamps", choices=["pattern", "mtime"], default="pattern")
    p.add_argument("--normalize", action="store_true", default=None)
    p.add_argument("--day-id", dest="day_id")
    p.add_argument("--config", help="JSON config file; flags override it")
    p.set_defaults(handler=_cmd_extract)

    p = sub.add_parser("segment", help="cluster labels for a day")
    _add_manifest_flags(p)
    p.add_argument("--out", required=True, help="labels CSV to write")
    _add_config_flags(p, "linkage", "cutoff")
    p.set_defaults(handler=_cmd_segment)

    p = sub.add_parser("refine", help="labels to events via division and fusion")
    p.add_argument("--labels", required=True, help="labels CSV from segment")
    _add_manifest_flags(p)
    p.add_argument("--out", required=True, help="events CSV to write")
    p.add_argument("--min-event-frames", type=int, dest="min_event_frames")
    _add_config_flags(p, "min_event_duration")
    p.set_defaults(handler=_cmd_refine)

    p = sub.add_parser("summarize", help="one keyframe per event")
    _add_manifest_flags(p)
    p.add_argument("--events", required=True, help="events CSV from refine")
    p.add_argument("--out", required=True, help="summary JSON to write")
    _add_config_flags(p, "method", "seed")
    p.set_defaults(handler=_cmd_summarize)

    p = sub.add_parser("evaluate", help="score detected events against ground truth")
    p.add_argument("--pred", required=True, help="detected events CSV")
    p.add_argument("--gt", required=True, help="ground-truth CSV")
    p.add_argument("--out", required=True, help="report JSON to write")
    p.set_defaults(handler=_cmd_evaluate)

    p = sub.add_parser("sweep", help="score the pipeline across cutoffs")
    _add_manifest_flags(p)
    p.add_argument("--gt", required=True)
    p.add_argument(
        "--cutoffs", required=True,
        help="comma list (1.0,1.1) or range lo:step:hi (0.8:0.05:1.6)",
    )
    p.add_argument("--out", required=True, help="CSV table to write")
    _add_config_flags(p, "linkage", "min_event_duration")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("synth", help="generate a synthetic day with ground truth")
    p.add_argument("--config", help="SynthConfig JSON (defaults when omitted)")
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.set_defaults(handler=_cmd_synth)

    p = sub.add_parser("render", help="contact sheet for a summary")
    p.add_argument("--summary", required=True)
    _add_manifest_flags(p)
    p.add_argument("--images", help="directory of images named by frame id")
    p.add_argument("--out", required=True, help="HTML file to write")
    p.add_argument(
        "--out-manifest", dest="out_manifest",
        help="also write the machine-readable summary with time spans",
    )
    p.set_defaults(handler=_cmd_render)

    p = sub.add_parser("run-all", help="segment, refine, summarize, render, evaluate")
    _add_manifest_flags(p)
    p.add_argument("--gt", help="optional ground-truth CSV")
    p.add_argument("--images", help="optional image directory for the sheet")
    p.add_argument("--out-dir", required=True, dest="out_dir")
    _add_config_flags(p, "linkage", "cutoff", "min_event_duration", "method", "seed")
    p.set_defaults(handler=_cmd_run_all)

    return parser


def _cmd_extract(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    stream = extract_directory(
        args.images,
        config=HistogramConfig(args.bins),
        timestamps=args.timestamps,
        normalize=cfg.normalize,
        day_id=args.day_id,
    )
    write_manifest(stream, args.out)
    return 0


def _cmd_segment(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    stream = load_manifest(args.manifest, assume_interval=args.assume_interval)
    labels = cut(
        agglomerate(pairwise_distances(stream), cfg.linkage), cfg.cutoff
    )
    write_label_csv(args.out, [str(label) for label in labels])
    return 0


def _fusion_config(args: argparse.Namespace, cfg: PipelineConfig) -> FusionConfig:
    return FusionConfig(
        min_event_duration=cfg.min_event_duration,
        min_event_frames=getattr(args, "min_event_frames", None),
    )


def _cmd_refine(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    stream = load_manifest(args.manifest, assume_interval=args.assume_interval)
    labels = read_label_csv(args.labels, n_frames=len(stream))
    segmentation = refine(labels, stream, _fusion_config(args, cfg))
    write_segmentation(segmentation, args.out)
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    stream = load_manifest(args.manifest, assume_interval=args.assume_interval)
    labels = read_label_csv(args.events, n_frames=len(stream))
    segmentation = segmentation_from_labels(labels)
    summary = summarize(stream, segmentation, cfg.method, seed=cfg.seed)
    write_summary(summary, args.out)
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    pred = segmentation_from_labels(read_label_csv(args.pred))
    truth = segmentation_from_labels(read_label_csv(args.gt))
    report = jaccard(pred, truth)
    doc = report.to_dict()
    doc["spec_version"] = SPEC_VERSION
    Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"aggregate jaccard: {report.aggregate:.6f}")
    return 0


def _parse_cutoffs(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"bad cutoff range {text!r}; expected lo:step:hi")
        lo, step, hi = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise ValidationError(f"bad cutoff range {text!r}")
        count = int((hi - lo) / step + 1e-9) + 1
        return [lo + i * step for i in range(count)]
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ValidationError(f"bad cutoff list {text!r}") from None


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    stream = load_manifest(args.manifest, assume_interval=args.assume_interval)
    truth = load_ground_truth(args.gt, stream)
    table = sweep_cutoff(
        stream,
        truth,
        cfg.linkage,
        _parse_cutoffs(args.cutoffs),
        fusion=FusionConfig(min_event_duration=cfg.min_event_duration),
    )
    lines = ["cutoff,aggregate_jaccard"]
    lines.extend(f"{cutoff},{score}" for cutoff, score in table)
    Path(args.out).write_text("\n".join(lines) + "\n")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    values = _load_json(args.config) if args.config else {}
    known = {f.name for f in dataclasses.fields(SynthConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ValidationError(f"{args.config}: unknown config key {unknown[0]!r}")
    if args.seed is not None:
        values["seed"] = args.seed
    if isinstance(values.get("frames_per_event"), list):
        values["frames_per_event"] = tuple(values["frames_per_event"])
    try:
        config = SynthConfig(**values)
    except TypeError as exc:
        raise ValidationError(f"bad synth config: {exc}") from None
    stream, truth = synth_generate(config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(stream, out / "manifest.json")
    write_segmentation(truth, out / "gt.csv")
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    stream = load_manifest(args.manifest, assume_interval=args.assume_interval)
    summary = load_summary(args.summary)
    Path(args.out).write_text(render_html(summary, stream, args.images))
    if args.out_manifest:
        Path(args.out_manifest).write_text(render_manifest(summary, stream))
    return 0


def _cmd_run_all(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    stream = load_manifest(args.manifest, assume_interval=args.assume_interval)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    dist = pairwise_distances(stream)
    labels = cut(agglomerate(dist, cfg.linkage), cfg.cutoff)
    write_label_csv(out / "labels.csv", [str(label) for label in labels])

    segmentation = refine(labels, stream, _fusion_config(args, cfg))
    write_segmentation(segmentation, out / "events.csv")

    summary = summarize(
        stream,
        segmentation,
        cfg.method,
        dist=dist,
        seed=cfg.seed,
        parameters=SummaryParameters(
            seed=cfg.seed,
            linkage=cfg.linkage,
            cutoff=cfg.cutoff,
            min_event_duration=cfg.min_event_duration,
        ),
    )
    write_summary(summary, out / "summary.json")
    (out / "sheet.html").write_text(render_html(summary, stream, args.images))

    if args.gt:
        truth = load_ground_truth(args.gt, stream)
        report = jaccard(segmentation, truth)
        doc = report.to_dict()
        doc["spec_version"] = SPEC_VERSION
        (out / "report.json").write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n"
        )
        print(f"aggregate jaccard: {report.aggregate:.6f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help/--version, 2 for usage errors;
        # usage errors are validation failures under this contract.
        return 0 if exc.code == 0 else 1
    try:
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
