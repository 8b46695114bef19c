"""Timestamp recovery and day-manifest file writing.

The output contract is the summarizer's day-manifest format: a JSON
file naming the frames in temporal order plus a sidecar of raw
features (16-byte header: magic ``EGOF``, version 1, frame count,
dimension; then row-major little-endian float32). The format is
reimplemented here from its definition so this package stays
importable without the consumer installed.
"""

from __future__ import annotations

import datetime as dt
import json
import re
import struct
from pathlib import Path

import numpy as np
from PIL import Image

_EGOF_HEADER = struct.Struct("<4sIII")
_EGOF_MAGIC = b"EGOF"
_EGOF_VERSION = 1

_IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".gif", ".tif", ".tiff", ".webp"}

# 2016-01-02T08:30:00, 2016-01-02_08:30:00, 20160102_083000, etc.
_NAME_TIMESTAMP = re.compile(
    r"(\d{4})-?(\d{2})-?(\d{2})[T_\- ]?(\d{2}):?(\d{2}):?(\d{2})"
)

_EXIF_DATETIME = 306            # "DateTime" in the primary IFD
_EXIF_DATETIME_ORIGINAL = 36867  # "DateTimeOriginal" in the Exif IFD
_EXIF_IFD = 34665


class ExtractError(RuntimeError):
    """Unusable input: bad flags, undecodable image, missing timestamp."""


def list_images(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise ExtractError(f"{directory}: not a directory")
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
    )


def _from_exif(path: Path, image: Image.Image) -> dt.datetime:
    exif = image.getexif()
    raw = exif.get_ifd(_EXIF_IFD).get(_EXIF_DATETIME_ORIGINAL) or exif.get(
        _EXIF_DATETIME
    )
    if not raw:
        raise ExtractError(f"{path.name}: no EXIF capture time")
    try:
        return dt.datetime.strptime(str(raw), "%Y:%m:%d %H:%M:%S")
    except ValueError:
        raise ExtractError(f"{path.name}: malformed EXIF time {raw!r}") from None


def _from_name(path: Path) -> dt.datetime:
    match = _NAME_TIMESTAMP.search(path.name)
    if match is None:
        raise ExtractError(f"{path.name}: no timestamp in file name")
    year, month, day, hour, minute, second = (int(g) for g in match.groups())
    try:
        return dt.datetime(year, month, day, hour, minute, second)
    except ValueError:
        raise ExtractError(f"{path.name}: implausible timestamp in name") from None


def _from_mtime(path: Path) -> dt.datetime:
    stamp = dt.datetime.fromtimestamp(path.stat().st_mtime, tz=dt.timezone.utc)
    return stamp.replace(tzinfo=None)


def recover_timestamp(
    path: Path, mode: str, image: Image.Image | None = None
) -> dt.datetime:
    """Capture time by the selected source; naive UTC-like wall time."""
    if mode == "exif":
        if image is None:
            with Image.open(path) as opened:
                return _from_exif(path, opened)
        return _from_exif(path, image)
    if mode == "pattern":
        return _from_name(path)
    if mode == "mtime":
        return _from_mtime(path)
    raise ExtractError(f"unknown timestamps mode {mode!r}")


def write_day(
    out_path: str | Path,
    day_id: str,
    names: list[str],
    timestamps: list[dt.datetime],
    features: np.ndarray,
) -> None:
    """Write manifest JSON and EGOF sidecar next to each other."""
    out_path = Path(out_path)
    features = np.ascontiguousarray(features, dtype="<f4")
    n, d = features.shape
    if not (len(names) == len(timestamps) == n):
        raise ExtractError("names, timestamps, and feature rows disagree")
    sidecar = out_path.stem + ".egof"
    with open(out_path.parent / sidecar, "wb") as fh:
        fh.write(_EGOF_HEADER.pack(_EGOF_MAGIC, _EGOF_VERSION, n, d))
        fh.write(features.tobytes())
    doc = {
        "day_id": day_id,
        "dimension": d,
        "features_file": sidecar,
        "frames": [
            {"id": name, "timestamp": stamp.isoformat()}
            for name, stamp in zip(names, timestamps)
        ],
    }
    out_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
