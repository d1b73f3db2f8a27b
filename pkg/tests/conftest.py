"""Shared fixtures: expensive Monte Carlo artifacts and the acceptance recorder.

The acceptance tests register one verdict line each; the terminal summary
prints them together so a full run ends with a compact scoreboard.
"""

import numpy as np
import pytest

from cohlaw import ExperimentConfig, Gaussian, run, verify_suite

_CRITERIA: dict[int, tuple[bool, str]] = {}
_SUITE_CACHE: dict[str, dict] = {}


def _record(number: int, passed: bool, detail: str) -> None:
    _CRITERIA[number] = (bool(passed), detail)


@pytest.fixture(scope="session")
def criterion():
    """Recorder callable: criterion(number, passed, detail)."""
    return _record


@pytest.fixture(scope="session")
def suite_report():
    """Memoized verify_suite runner so shared suites execute once per session."""

    def get(name: str) -> dict:
        if name not in _SUITE_CACHE:
            _SUITE_CACHE[name] = verify_suite(name)
        return _SUITE_CACHE[name]

    return get


@pytest.fixture(scope="session")
def null_coherence_samples():
    """2000 coherence draws from the 100 x 500 Gaussian null, seed-pinned."""
    config = ExperimentConfig(
        dist=Gaussian(1.0),
        n=100,
        p=500,
        replicates=2000,
        seed=20260819,
        statistic="L",
    )
    return run(config)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(987654321)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion-{number:02d} {verdict}: {detail}")
