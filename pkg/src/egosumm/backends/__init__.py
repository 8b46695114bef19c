"""Kernel backend selection.

The two hot kernels (pairwise Euclidean distances and the agglomerative
merge loop) exist twice: a numba-jitted implementation and a pure-numpy
fallback. The ``EGOSUMM_BACKEND`` environment variable picks one
(``numba`` or ``numpy``); unset means numba when importable, numpy
otherwise. Both backends are deterministic run-to-run; merge sequences
agree exactly on identical input matrices, distance entries agree to
~1e-9 relative (the numpy reduction order differs).
"""

from __future__ import annotations

import logging
import os
from types import ModuleType

logger = logging.getLogger(__name__)

ENV_VAR = "EGOSUMM_BACKEND"

LINKAGE_CODES = {"single": 0, "complete": 1, "average": 2, "ward": 3}

_cache: dict[str, ModuleType] = {}


def _load(name: str) -> ModuleType:
    if name in _cache:
        return _cache[name]
    if name == "numpy":
        from . import numpy_backend as module
    elif name == "numba":
        from . import numba_backend as module
    else:
        raise ValueError(f"unknown backend {name!r}, expected 'numba' or 'numpy'")
    _cache[name] = module
    return module


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module for ``name``, the env var, or auto-detect."""
    if name is None:
        name = os.environ.get(ENV_VAR, "").strip().lower() or "auto"
    if name == "auto":
        try:
            return _load("numba")
        except ImportError:
            logger.info("numba unavailable, using the numpy fallback backend")
            return _load("numpy")
    return _load(name)


def active_backend_name() -> str:
    """Name of the backend that get_backend() currently resolves to."""
    return get_backend().NAME
