import pytest

from blacklining import build_corpus, run_corpus

# acceptance lines collected during the run, echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def default_corpus():
    return build_corpus()


@pytest.fixture(scope="session")
def default_report(default_corpus):
    return run_corpus(default_corpus)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
