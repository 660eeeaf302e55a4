import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mpradiomics.volume_io import QuantizedStack, RoiMask, VolumeStack  # noqa: E402


def make_stack(*arrays, names=None):
    arrays = [np.asarray(a, dtype=np.float32) for a in arrays]
    return VolumeStack.from_arrays(arrays, names=names)


def make_quantized(levels, G):
    levels = np.asarray(levels, dtype=np.int32)
    return QuantizedStack(levels=levels, G=G, per_channel_range=((0.0, 1.0),) * levels.shape[0])


def full_mask(dims):
    return RoiMask(np.ones(dims, dtype=bool))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary ------------------------------------------------------
# Tests marked ``acceptance(number, title)`` get one PASS/FAIL line in the
# terminal summary, followed by whatever they recorded with ``record_property``.

_acceptance_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
        _acceptance_results[number] = ("PASS" if report.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance_results):
        status, title, detail = _acceptance_results[number]
        line = f"{status}  criterion {number:2d}: {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
