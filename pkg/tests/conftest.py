import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE: list[tuple[str, str, str]] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion():
    """Record a PASS/FAIL line for an acceptance criterion around the enclosed checks."""

    @contextmanager
    def record(name):
        info = {}
        start = time.perf_counter()
        try:
            yield info
        except BaseException as exc:
            line = (name, "FAIL", f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
            _ACCEPTANCE.append(line)
            print(f"{name}: FAIL  {line[2]}")
            raise
        detail = info.get("detail", "")
        line = (name, "PASS", f"{detail} [{time.perf_counter() - start:.2f} s]".strip())
        _ACCEPTANCE.append(line)
        print(f"{name}: PASS  {line[2]}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict, detail in sorted(_ACCEPTANCE, key=lambda r: int(r[0].split("-")[1].split()[0])):
        terminalreporter.write_line(f"{name}: {verdict}  {detail}")
