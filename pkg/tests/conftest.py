import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from memcluster.gateway import OracleScript  # noqa: E402
from memcluster.synthetic import make_corpus  # noqa: E402


@pytest.fixture
def corpus200():
    return make_corpus(200, 10, seed=1)


@pytest.fixture
def gold_labeler(corpus200):
    return {d.id: d.gold_label for d in corpus200}


@pytest.fixture
def perfect_script(gold_labeler):
    return OracleScript(gold_labeler)


class ScriptedClient:
    """Replays a fixed list of replies, recording each prompt it receives."""

    def __init__(self, replies):
        self.replies = list(replies)
        self.prompts = []

    def complete(self, prompt, *, doc_id, step):
        self.prompts.append(prompt)
        return self.replies.pop(0)


@pytest.fixture
def scripted_client():
    return ScriptedClient


# --- acceptance reporting -------------------------------------------------------
# Tests marked ``@pytest.mark.acceptance("A1", "title")`` get one PASS/FAIL line
# each in the terminal summary, in criterion order.

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    cid, title = marker.args
    if report.when == "call" or (report.when == "setup" and not report.passed):
        status = "PASS" if report.passed else "FAIL"
        _ACCEPTANCE[cid] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE, key=lambda c: int(c[1:])):
        status, title = _ACCEPTANCE[cid]
        terminalreporter.write_line(f"{cid} {status}  {title}")
