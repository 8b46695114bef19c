"""Shared fixtures.

The ``criterion`` fixture prints one PASS/FAIL line per acceptance
criterion directly to the terminal, bypassing output capture, so the
gate's verdict is visible in plain pytest runs.
"""

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
