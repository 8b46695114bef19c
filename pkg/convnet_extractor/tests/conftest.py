"""Shared fixtures: criterion PASS/FAIL lines that bypass capture."""

from contextlib import contextmanager

import pytest


@pytest.fixture()
def criterion(capfd):
    @contextmanager
    def _criterion(name: str):
        try:
            yield
        except BaseException:
            with capfd.disabled():
                print(f"\n[criterion] {name}: FAIL", flush=True)
            raise
        else:
            with capfd.disabled():
                print(f"\n[criterion] {name}: PASS", flush=True)

    return _criterion
