import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# acceptance verdicts, printed once at the end of the run
_VERDICTS: dict[str, str] = {}


class _Recorder:
    def __call__(self, label: str):
        return _Verdict(label)


class _Verdict:
    def __init__(self, label: str):
        self.label = label

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        _VERDICTS[self.label] = "FAIL" if exc_type is not None else "PASS"
        return False


@pytest.fixture
def criterion():
    """Context manager factory recording PASS or FAIL for an acceptance label."""
    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    grouped: dict[int, list[str]] = {}
    for label in _VERDICTS:
        grouped.setdefault(int(label.split()[0]), []).append(label)
    for number in sorted(grouped):
        failed = [lab for lab in grouped[number] if _VERDICTS[lab] == "FAIL"]
        line = f"criterion {number:2d}: {'FAIL' if failed else 'PASS'}"
        if failed:
            line += "  (" + "; ".join(lab.split(" ", 1)[1] for lab in failed) + ")"
        terminalreporter.write_line(line)
