import numpy as np
import pytest

from evcorner import EventStream, SensorGeometry

# acceptance criteria report lines, printed at the end of the run
ACCEPTANCE_RESULTS: list[tuple[int, str, bool]] = []


def record_criterion(number: int, description: str, passed: bool) -> None:
    ACCEPTANCE_RESULTS.append((number, description, passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number, description, passed in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {description}")


@pytest.fixture
def geometry():
    return SensorGeometry(64, 64)


def make_stream(geometry, events):
    """Build a stream from (t, x, y) or (t, x, y, p) tuples."""
    t = np.array([e[0] for e in events], dtype=np.uint64)
    x = np.array([e[1] for e in events], dtype=np.int64)
    y = np.array([e[2] for e in events], dtype=np.int64)
    p = np.array([e[3] if len(e) > 3 else 1 for e in events], dtype=np.uint8)
    return EventStream.from_arrays(geometry, t, x, y, p)
