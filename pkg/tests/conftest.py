"""Suite-wide hooks.

Every Violated verdict produced by either engine anywhere in the suite is
replayed on the interpreter and recorded, so that the counterexample
contract can be checked over the whole run.  Acceptance checks report one
line each; the lines are repeated in the terminal summary.
"""

import functools

import pytest

import scanverif
import scanverif.engines as engines
from scanverif.corpus import write_corpus

VIOLATIONS = []          # (engine function, case id, replay report)
ACCEPTANCE_LINES = []


def _recording(fn):
    @functools.wraps(fn)
    def inner(case, *args, **kwargs):
        verdict = fn(case, *args, **kwargs)
        if verdict.outcome == engines.VIOLATED:
            VIOLATIONS.append((fn.__name__, case.id, engines.replay_counterexample(case, verdict.counterexample)))
        return verdict
    return inner


def pytest_configure(config):
    config.addinivalue_line("markers", "suite_wide: runs after every other test")
    for name in ("verify_explicit", "verify_bmc"):
        wrapped = _recording(getattr(engines, name))
        setattr(engines, name, wrapped)
        setattr(scanverif, name, wrapped)


def pytest_collection_modifyitems(session, config, items):
    items.sort(key=lambda item: item.get_closest_marker("suite_wide") is not None)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda line: int(line.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    write_corpus(d)
    return d
