"""Network construction and batched penultimate-layer inference."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torchvision
from PIL import Image

log = logging.getLogger(__name__)

# AlexNet-family classifiers end in Dropout/Linear/ReLU/Dropout/Linear/
# ReLU/Linear; slicing off the last Linear leaves the 4096-wide
# penultimate activations.
_PENULTIMATE_WIDTH = {"alexnet": 4096}

_IMAGENET_MEAN = (0.485, 0.456, 0.406)
_IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class ExtractorConfig:
    """What to run and how to feed it."""

    model: str = "alexnet"
    layer: str = "penultimate"
    resize: int = 256            # shorter side before cropping
    crop: int = 224              # center-crop edge fed to the network
    batch_size: int = 8
    device: str = "cpu"
    seed: int = 0                # weight init when no weights are available
    weights: str | None = None   # local state-dict file; None tries the hub

    def __post_init__(self) -> None:
        if self.model not in _PENULTIMATE_WIDTH:
            known = ", ".join(sorted(_PENULTIMATE_WIDTH))
            raise ValueError(f"unknown model {self.model!r}; known: {known}")
        if self.layer != "penultimate":
            raise ValueError(f"unsupported layer {self.layer!r}")
        if self.crop > self.resize:
            raise ValueError("crop size exceeds resize size")
        if self.batch_size < 1:
            raise ValueError("batch size must be at least 1")

    @property
    def dimension(self) -> int:
        return _PENULTIMATE_WIDTH[self.model]


class FeatureExtractor:
    """Deterministic penultimate-layer embeddings for image batches."""

    def __init__(self, config: ExtractorConfig) -> None:
        self.config = config
        torch.manual_seed(config.seed)
        torch.set_num_threads(1)
        net = torchvision.models.alexnet(weights=None)
        if config.weights is not None:
            state = torch.load(config.weights, map_location="cpu", weights_only=True)
            net.load_state_dict(state)
        else:
            try:
                hub = torchvision.models.alexnet(
                    weights=torchvision.models.AlexNet_Weights.IMAGENET1K_V1
                )
                net = hub
            except Exception as exc:
                log.warning(
                    "pretrained weights unavailable (%s); "
                    "using seed-%d initialization",
                    exc, config.seed,
                )
        # keep everything up to, but not including, the class scores
        net.classifier = net.classifier[:-1]
        net.eval()
        self.net = net.to(config.device)

    def preprocess(self, image: Image.Image) -> torch.Tensor:
        """Standard inference preprocessing: resize, center crop, normalize."""
        cfg = self.config
        image = image.convert("RGB")
        w, h = image.size
        scale = cfg.resize / min(w, h)
        image = image.resize(
            (max(cfg.resize, round(w * scale)), max(cfg.resize, round(h * scale))),
            Image.BILINEAR,
        )
        w, h = image.size
        left = (w - cfg.crop) // 2
        top = (h - cfg.crop) // 2
        image = image.crop((left, top, left + cfg.crop, top + cfg.crop))
        array = np.asarray(image, dtype=np.float32) / 255.0
        array = (array - _IMAGENET_MEAN) / _IMAGENET_STD
        return torch.from_numpy(array.astype(np.float32)).permute(2, 0, 1)

    def embed(self, images: list[Image.Image]) -> np.ndarray:
        """(N, dimension) float32 activations, batched through the net."""
        cfg = self.config
        rows = []
        with torch.no_grad():
            for start in range(0, len(images), cfg.batch_size):
                chunk = images[start : start + cfg.batch_size]
                batch = torch.stack([self.preprocess(im) for im in chunk])
                out = self.net(batch.to(cfg.device))
                rows.append(out.cpu().numpy().astype(np.float32))
        if not rows:
            return np.empty((0, cfg.dimension), dtype=np.float32)
        features = np.concatenate(rows, axis=0)
        assert features.shape[1] == cfg.dimension
        return features
