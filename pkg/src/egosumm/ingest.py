"""Baseline color-histogram features and normalization helpers.

Lets the pipeline run end-to-end on a plain directory of images when
no learned feature extractor is available. Features are raw by
default; L2 normalization changes the distance scale (and therefore
the meaning of any cut height), so it stays behind an explicit flag.
"""

from __future__ import annotations

import logging
import re
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .datamodel import Photostream, ValidationError

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp", ".gif", ".tif", ".tiff")

# Recognizes e.g. 20150321_134502 or 2015-03-21T13:45:02 inside a filename.
_NAME_TIMESTAMP = re.compile(
    r"(\d{4})-?(\d{2})-?(\d{2})[T_\- ]?(\d{2}):?(\d{2}):?(\d{2})"
)


@dataclass(frozen=True)
class HistogramConfig:
    """Per-channel bin count for the RGB histogram descriptor."""

    bins_per_channel: int = 8

    def __post_init__(self) -> None:
        if self.bins_per_channel < 2:
            raise ValidationError(
                f"bins_per_channel must be >= 2, got {self.bins_per_channel}"
            )

    @property
    def dimension(self) -> int:
        return 3 * self.bins_per_channel


def extract_histogram(
    image: np.ndarray, config: HistogramConfig = HistogramConfig()
) -> np.ndarray:
    """Concatenated RGB histograms, each channel L1-normalized.

    ``image`` is an (H, W, 3) uint8 raster. Bins split [0, 255] into
    equal widths, with 255 in the last bin. The result depends only on
    the multiset of pixel colors, never their arrangement.
    """
    raster = np.asarray(image)
    if raster.ndim != 3 or raster.shape[2] != 3:
        raise ValidationError(f"expected an (H, W, 3) raster, got shape {raster.shape}")
    if raster.size == 0:
        raise ValidationError("raster is empty")
    if raster.dtype != np.uint8:
        raise ValidationError(f"expected 8-bit channels, got dtype {raster.dtype}")
    bins = config.bins_per_channel
    n_pixels = raster.shape[0] * raster.shape[1]
    parts = []
    for channel in range(3):
        counts = np.bincount(
            (raster[:, :, channel].ravel().astype(np.int64) * bins) // 256,
            minlength=bins,
        )
        parts.append(counts / n_pixels)
    return np.concatenate(parts)


def l2_normalize(v: np.ndarray) -> np.ndarray:
    """Scale a vector to unit Euclidean length.

    A zero vector cannot be scaled; it is returned unchanged and a
    RuntimeWarning is emitted instead of dividing by zero.
    """
    arr = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("cannot normalize a vector with non-finite entries")
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        warnings.warn("l2_normalize: zero vector left unchanged", RuntimeWarning)
        return arr.copy()
    return arr / norm


def _timestamp_from_name(path: Path) -> datetime | None:
    m = _NAME_TIMESTAMP.search(path.name)
    if not m:
        return None
    try:
        return datetime(*(int(g) for g in m.groups()))
    except ValueError:
        return None


def _timestamp_from_mtime(path: Path) -> datetime:
    # Naive UTC, so it orders against naive filename timestamps.
    ts = datetime.fromtimestamp(path.stat().st_mtime, tz=timezone.utc)
    return ts.replace(tzinfo=None)


def list_images(directory: str | Path) -> list[Path]:
    """Image files under a directory, sorted by name for stable order."""
    root = Path(directory)
    if not root.is_dir():
        raise ValidationError(f"{root}: not a directory")
    return sorted(
        p for p in root.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )


def extract_directory(
    directory: str | Path,
    config: HistogramConfig = HistogramConfig(),
    timestamps: str = "pattern",
    normalize: bool = False,
    day_id: str | None = None,
) -> Photostream:
    """Histogram features for every image in a directory, as a stream.

    ``timestamps`` selects the source: "pattern" parses a date-time out
    of each filename and falls back to file modification time for names
    without one (logged); "mtime" uses modification time directly.
    Frames are ordered by timestamp, then name.
    """
    from PIL import Image

    if timestamps not in ("pattern", "mtime"):
        raise ValidationError(
            f"timestamps must be 'pattern' or 'mtime', got {timestamps!r}"
        )
    paths = list_images(directory)
    if not paths:
        raise ValidationError(f"{directory}: no image files found")

    records = []
    for path in paths:
        ts = None
        if timestamps == "pattern":
            ts = _timestamp_from_name(path)
            if ts is None:
                log.warning(
                    "%s: no timestamp in filename, using modification time", path.name
                )
        if ts is None:
            ts = _timestamp_from_mtime(path)
        with Image.open(path) as img:
            raster = np.asarray(img.convert("RGB"))
        vec = extract_histogram(raster, config)
        if normalize:
            vec = l2_normalize(vec)
        records.append((ts, path.name, vec))

    records.sort(key=lambda r: (r[0], r[1]))
    return Photostream.build(
        day_id=day_id or Path(directory).name,
        frame_ids=[name for _, name, _ in records],
        timestamps=[ts for ts, _, _ in records],
        features=np.stack([vec for _, _, vec in records]),
    )
