from pathlib import Path

import numpy as np
import pytest

from ldp_slicing.color import PixelImage

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def random_rgb(rng):
    def make(h=16, w=16):
        return PixelImage(rng.integers(0, 256, (h, w, 3), dtype=np.uint8), "RGB")

    return make


@pytest.fixture
def fixture_dir():
    return FIXTURES


# One PASS/FAIL line per acceptance criterion, printed after the run.
_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _CRITERIA[n] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, title = _CRITERIA[n]
        terminalreporter.write_line(f"{status}  criterion {n:>2}: {title}")
