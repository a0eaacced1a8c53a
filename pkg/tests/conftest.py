"""Shared fixtures and the acceptance-criteria summary printed after a run."""

from __future__ import annotations

import itertools
from datetime import datetime, timedelta, timezone

import pytest
from fastapi.testclient import TestClient

from fdom.api import create_app
from fdom.registry import Registry

# One human-readable line per acceptance criterion, keyed by test name in
# test_acceptance.py.
ACCEPTANCE_LABELS = {
    "test_dual_pid_system": "dual-PID: 100 creates, distinct resolvable PID pairs",
    "test_schema_conformance_corpus": "schema conformance: hand-labeled corpus, no false accepts/rejects",
    "test_tombstone_permanence": "tombstones: 410 resolution, catalog filtering, inbound citations survive",
    "test_relation_oracle_equivalence": "relations: edges and closure match brute-force oracle on 50 graphs",
    "test_persistence_replay": "persistence: replay bit-identical, snapshot+tail, crash recovery",
    "test_http_contract": "HTTP contract: every endpoint, every error code, GETs read-only",
    "test_operation_registry": "operation registry: class filtering oracle, built-ins, duplicate rejection",
}

_acceptance_outcomes: dict[str, str] = {}


def ticking_clock(start: str = "2026-01-01T00:00:00", step_seconds: int = 1):
    """A deterministic clock: starts fixed, advances one step per call."""
    base = datetime.fromisoformat(start).replace(tzinfo=timezone.utc)
    counter = itertools.count()

    def clock() -> datetime:
        return base + timedelta(seconds=step_seconds * next(counter))

    return clock


@pytest.fixture
def clock():
    return ticking_clock()


@pytest.fixture
def registry(clock) -> Registry:
    return Registry(prefix="fdom.local", clock=clock)


@pytest.fixture
def client(registry) -> TestClient:
    return TestClient(create_app(registry))


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    if name not in ACCEPTANCE_LABELS:
        return
    if report.when == "call":
        _acceptance_outcomes[name] = report.outcome
    elif report.failed:  # setup/teardown error
        _acceptance_outcomes[name] = "failed"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, label in ACCEPTANCE_LABELS.items():
        outcome = _acceptance_outcomes.get(name)
        if outcome is None:
            continue
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"ACCEPTANCE {status}: {label}")
