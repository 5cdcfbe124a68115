import pytest

from deops import Corpus, build_index

TOY = [
    ["he", "denied", "any", "wrongdoing"],
    ["she", "doubts", "any", "claim", ",", "he", "said"],
    ["apples", "are", "red"],
    ["he", "denied", "the", "report"],
]

_criteria = {}


@pytest.fixture
def toy_sentences():
    return [list(s) for s in TOY]


@pytest.fixture
def toy_corpus():
    return Corpus.from_sentences(TOY)


@pytest.fixture
def toy_index(toy_corpus):
    return build_index(toy_corpus)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or rep.outcome != "passed":
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        _criteria[item.nodeid] = (marker.args[0], marker.args[1], rep.outcome, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    words = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}
    for number, title, outcome, detail in sorted(_criteria.values(), key=lambda r: (r[0], r[1])):
        line = f"criterion {number}: {words.get(outcome, outcome.upper())}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
