import pytest

# nodeid -> [number, title, detail, passed]
CRITERIA: dict = {}
NOTES: list = []


@pytest.fixture
def criterion(request):
    """Record ``(number, title, detail)`` for the acceptance summary; the outcome comes from the test report."""

    def record(number: int, title: str, detail: str = ""):
        CRITERIA[request.node.nodeid] = [number, title, detail, None]

    return record


@pytest.fixture
def acceptance_note():
    """Free-text line printed under the acceptance summary."""
    return NOTES.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    entry = CRITERIA.get(item.nodeid)
    if entry is not None and rep.when == "call":
        entry[3] = rep.passed


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    grouped: dict = {}
    for number, title, detail, passed in CRITERIA.values():
        g = grouped.setdefault(number, [title, [], True, 0])
        if detail:
            g[1].append(detail)
        g[2] = g[2] and bool(passed)
        g[3] += 1
    terminalreporter.section("acceptance criteria")
    for number in sorted(grouped):
        title, details, ok, cases = grouped[number]
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title} ({cases} case{'s' if cases > 1 else ''})"
        if details:
            line += " [" + "; ".join(details) + "]"
        terminalreporter.write_line(line)
    for note in NOTES:
        terminalreporter.write_line(f"NOTE {note}")
