"""Command line: images directory in, manifest + sidecar out."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from PIL import Image, UnidentifiedImageError

from .manifest_io import ExtractError, list_images, recover_timestamp, write_day
from .model import ExtractorConfig, FeatureExtractor

log = logging.getLogger(__name__)


def extract_directory(
    images_dir: str | Path,
    out_path: str | Path,
    config: ExtractorConfig | None = None,
    timestamps: str = "exif",
    on_error: str = "skip",
    day_id: str | None = None,
) -> int:
    """Embed every decodable image and write the day files.

    Returns the number of frames written. Undecodable images are
    skipped with a warning unless ``on_error`` is "abort".
    """
    if on_error not in ("skip", "abort"):
        raise ExtractError(f"unknown on-error policy {on_error!r}")
    config = config or ExtractorConfig()
    images_dir = Path(images_dir)
    records = []
    for path in list_images(images_dir):
        try:
            with Image.open(path) as image:
                image.load()
                stamp = recover_timestamp(path, timestamps, image=image)
                records.append((stamp, path.name, image.convert("RGB")))
        except (UnidentifiedImageError, OSError) as exc:
            if on_error == "abort":
                raise ExtractError(f"{path.name}: cannot decode image") from exc
            log.warning("skipping %s: cannot decode image", path.name)
    if not records:
        raise ExtractError(f"{images_dir}: no usable images")
    records.sort(key=lambda r: (r[0], r[1]))

    extractor = FeatureExtractor(config)
    features = extractor.embed([image for _, _, image in records])
    write_day(
        out_path,
        day_id if day_id is not None else images_dir.name,
        [name for _, name, _ in records],
        [stamp for stamp, _, _ in records],
        features,
    )
    return len(records)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convnet-extract",
        description="deep per-image features for a day of photos",
    )
    parser.add_argument("--images", required=True, help="directory of images")
    parser.add_argument("--out", required=True, help="manifest JSON to write")
    parser.add_argument("--layer", default="penultimate",
                        help="which activations to keep")
    parser.add_argument("--timestamps", choices=["exif", "pattern", "mtime"],
                        default="exif")
    parser.add_argument("--model", default="alexnet")
    parser.add_argument("--batch-size", type=int, default=8, dest="batch_size")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--seed", type=int, default=0,
                        help="weight seed when no weights are available")
    parser.add_argument("--weights", help="local state-dict file")
    parser.add_argument("--on-error", choices=["skip", "abort"],
                        default="skip", dest="on_error")
    parser.add_argument("--day-id", dest="day_id")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        config = ExtractorConfig(
            model=args.model,
            layer=args.layer,
            batch_size=args.batch_size,
            device=args.device,
            seed=args.seed,
            weights=args.weights,
        )
        count = extract_directory(
            args.images,
            args.out,
            config=config,
            timestamps=args.timestamps,
            on_error=args.on_error,
            day_id=args.day_id,
        )
    except (ExtractError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {count} frames to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
