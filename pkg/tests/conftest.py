import os

import pytest

_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def full_runs_enabled() -> bool:
    return os.environ.get("COMPLEXSPREAD_FULL", "") not in ("", "0")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (report.when == "call" or report.when == "setup"
                              and not report.passed):
        return
    number, title = marker.args
    entry = _ACCEPTANCE.setdefault(number, {"title": title, "parts": []})
    detail = getattr(item, "acceptance_detail", "")
    status = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
    entry["parts"].append((item.name, status, detail))


@pytest.fixture
def record(request):
    """Attach a one-line measurement summary to the current acceptance test."""
    def _record(text: str) -> None:
        request.node.acceptance_detail = text
        print(text)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        entry = _ACCEPTANCE[number]
        statuses = {s for _, s, _ in entry["parts"]}
        overall = "FAIL" if "FAIL" in statuses else ("PASS" if "PASS" in statuses else "SKIP")
        details = "; ".join(d for _, s, d in entry["parts"] if d)
        terminalreporter.write_line(f"[{overall}] {number:>2}. {entry['title']}"
                                    + (f" -- {details}" if details else ""))
