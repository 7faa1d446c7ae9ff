import contextlib

import pytest

_RESULTS: dict[str, str] = {}


@pytest.fixture
def criterion():
    """``with criterion("3", "unit conversion"):`` records PASS or FAIL for the summary."""

    @contextlib.contextmanager
    def record(number: str, title: str, expect_fail: str | None = None):
        label = f"criterion {number:<3} {title}"
        try:
            yield
        except BaseException:
            note = f" (expected: {expect_fail})" if expect_fail else ""
            _RESULTS[label] = "FAIL" + note
            print(f"FAIL  {label}{note}")
            raise
        _RESULTS[label] = "PASS"
        print(f"PASS  {label}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label in sorted(_RESULTS, key=lambda s: (int(s.split()[1].rstrip("ab")), s)):
        result = _RESULTS[label]
        terminalreporter.write_line(f"{result.split(' ')[0]:<5} {label}{result[4:]}")
