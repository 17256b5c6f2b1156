import numpy as np
import pytest

from rootradar import fileio, scenarios
from rootradar.cli import preprocess_chain
from rootradar.forward import synthesize_bscan


class Scene:
    """A bundled scenario loaded into memory, with helpers to run each stage."""

    def __init__(self, name):
        self.cfg = fileio.load_session(scenarios.path(name))
        self.profile = self.cfg.surface()
        self.track = fileio.session_track(self.cfg, self.profile)
        self.medium = self.cfg.medium
        self.targets = self.cfg.target_params

    def synth(self, **acq_changes):
        import dataclasses

        acq = dataclasses.replace(self.cfg.acquisition(), **acq_changes)
        return synthesize_bscan(self.profile, self.targets, self.track, self.medium, acq, 0)

    def preprocessed(self):
        return preprocess_chain(self.synth(), self.cfg)


@pytest.fixture(scope="session")
def scene():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = Scene(name)
        return cache[name]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(label, ok, detail):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        print(ACCEPTANCE_LINES[-1])
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1][1:].rstrip(":"))):
            terminalreporter.write_line(line)
