"""Per-image deep features for a day of photos.

Runs a convolutional classifier over an image directory, keeps the
penultimate fully-connected activations (4,096 wide for the AlexNet
family), and writes them in the day-manifest format the summarization
pipeline consumes: frame metadata as JSON next to a binary float32
sidecar. The two packages share only those files, never code.
"""

from .manifest_io import ExtractError, list_images, recover_timestamp, write_day
from .model import ExtractorConfig, FeatureExtractor

__all__ = [
    "ExtractError",
    "ExtractorConfig",
    "FeatureExtractor",
    "extract_directory",
    "list_images",
    "recover_timestamp",
    "write_day",
]

from .cli import extract_directory

__version__ = "0.1.0"
