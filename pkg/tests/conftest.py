import pytest

_criteria = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    passed = call.excinfo is None
    _criteria[number] = (title, passed, "" if passed else call.excinfo.exconly().splitlines()[0])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, passed, why = _criteria[number]
        line = f"[{'PASS' if passed else 'FAIL'}] {number:2d}. {title}"
        if why:
            line += f"  ({why[:160]})"
        terminalreporter.write_line(line)


@pytest.fixture
def default_cfg():
    from pinch_aoi.config import default_config

    return default_config()
