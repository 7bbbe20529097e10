import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict = {}
_NOTES = pytest.StashKey[list]()


@pytest.fixture
def detail(request):
    """Append a measured value to the criterion's summary line."""
    notes = []
    request.node.stash[_NOTES] = notes
    return notes.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    notes = item.stash.get(_NOTES, [])
    _CRITERIA[mark.args[0]] = (report.outcome.upper(), "; ".join(notes), item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, notes, name = _CRITERIA[n]
        status = "PASS" if status == "PASSED" else "FAIL"
        tr.write_line(f"criterion {n:>2}: {status}  {name}" + (f"  [{notes}]" if notes else ""))
    passed = sum(v[0] == "PASSED" for v in _CRITERIA.values())
    tr.write_line(f"{passed}/{len(_CRITERIA)} acceptance criteria passed")
