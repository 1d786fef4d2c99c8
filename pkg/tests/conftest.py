from __future__ import annotations

from pathlib import Path

import pytest

from zfz.interpreter import execute_script
from zfz.script import parse_script
from zfz.state import Session
from zfz.synthetic import generate_synthetic_brain

REPO = Path(__file__).resolve().parent.parent
CORPUS = REPO / "corpus"

CORPUS_FILES = sorted(CORPUS.glob("*.zfz"))


@pytest.fixture(scope="session")
def brain():
    return generate_synthetic_brain(1, 10)


@pytest.fixture
def session(brain):
    """A session with the seed-1 synthetic brain preloaded; LOAD resolves to it."""
    s = Session(load_resolver=lambda path: (brain, []))
    s.adopt_model(brain)
    s.rebase_generation()
    return s


def run_text(session: Session, text: str):
    return execute_script(parse_script(text), session)


def corpus_text(name: str) -> str:
    return (CORPUS / f"{name}.zfz").read_text(encoding="utf-8")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    tr = terminalreporter
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in tr.stats.get(outcome, []):
            if "test_acceptance" in rep.nodeid and getattr(rep, "when", "call") == "call":
                rows.append((rep.nodeid.split("::")[-1], "PASS" if outcome == "passed" else "FAIL"))
    if rows:
        tr.write_sep("=", "acceptance criteria")
        for name, status in sorted(rows):
            tr.write_line(f"{status}  {name}")
