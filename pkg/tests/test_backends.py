"""Kernel backends: numerical agreement and selection mechanics."""

import importlib

import numpy as np
import pytest

import egosumm.backends as backends

numba_backend = backends.get_backend("numba")
numpy_backend = backends.get_backend("numpy")
BACKENDS = [numpy_backend, numba_backend]
LINKAGES = ["single", "complete", "average", "ward"]


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.NAME)
class TestPairwise:
    def test_scalar_absolute_differences(self, backend):
        x = np.array([[0.0], [3.0], [4.0]])
        d = backend.pairwise_euclidean(x)
        assert np.array_equal(
            d, np.array([[0.0, 3.0, 4.0], [3.0, 0.0, 1.0], [4.0, 1.0, 0.0]])
        )

    def test_3_4_5(self, backend):
        d = backend.pairwise_euclidean(np.array([[0.0, 0.0], [3.0, 4.0]]))
        assert d[0, 1] == 5.0

    def test_identical_frames_exact_zero(self, backend):
        x = np.tile(np.array([1.7, -2.3, 0.9]), (5, 1))
        assert np.all(backend.pairwise_euclidean(x) == 0.0)

    def test_symmetric_zero_diagonal(self, backend):
        rng = np.random.default_rng(1)
        d = backend.pairwise_euclidean(rng.normal(size=(40, 7)))
        assert np.array_equal(d, d.T)
        assert np.all(np.diag(d) == 0.0)

    def test_single_frame(self, backend):
        d = backend.pairwise_euclidean(np.array([[1.0, 2.0]]))
        assert d.shape == (1, 1) and d[0, 0] == 0.0


class TestCrossBackend:
    def test_distances_agree(self):
        rng = np.random.default_rng(2)
        for n, d in [(2, 1), (17, 5), (64, 33), (100, 128)]:
            x = rng.normal(size=(n, d)) * 10
            a = numpy_backend.pairwise_euclidean(x)
            b = numba_backend.pairwise_euclidean(x)
            assert np.abs(a - b).max() <= 1e-9

    @pytest.mark.parametrize("linkage", LINKAGES)
    def test_merges_bit_identical(self, linkage):
        rng = np.random.default_rng(3)
        code = backends.LINKAGE_CODES[linkage]
        for n in [2, 3, 10, 40]:
            x = rng.normal(size=(n, 6))
            dist = numba_backend.pairwise_euclidean(x)
            a = numpy_backend.linkage_merge(dist.copy(), code)
            b = numba_backend.linkage_merge(dist.copy(), code)
            assert np.array_equal(a, b), f"{linkage} n={n}"

    def test_merges_bit_identical_with_ties(self):
        # Collinear equally spaced points force exact distance ties.
        x = np.arange(8.0).reshape(-1, 1)
        dist = numpy_backend.pairwise_euclidean(x)
        for linkage in LINKAGES:
            code = backends.LINKAGE_CODES[linkage]
            a = numpy_backend.linkage_merge(dist.copy(), code)
            b = numba_backend.linkage_merge(dist.copy(), code)
            assert np.array_equal(a, b), linkage


class TestSelection:
    def test_env_selects_numpy(self, monkeypatch):
        monkeypatch.setenv(backends.ENV_VAR, "numpy")
        assert backends.get_backend().NAME == "numpy"
        assert backends.active_backend_name() == "numpy"

    def test_env_selects_numba(self, monkeypatch):
        monkeypatch.setenv(backends.ENV_VAR, "numba")
        assert backends.get_backend().NAME == "numba"

    def test_unset_auto_prefers_numba(self, monkeypatch):
        monkeypatch.delenv(backends.ENV_VAR, raising=False)
        assert backends.get_backend().NAME == "numba"

    def test_unknown_name_rejected(self, monkeypatch):
        monkeypatch.setenv(backends.ENV_VAR, "cuda")
        with pytest.raises(ValueError, match="cuda"):
            backends.get_backend()

    def test_explicit_argument_wins(self, monkeypatch):
        monkeypatch.setenv(backends.ENV_VAR, "numba")
        assert backends.get_backend("numpy").NAME == "numpy"

    def test_module_reimport_stable(self):
        importlib.reload(backends)
        assert backends.get_backend("numpy").NAME == "numpy"
