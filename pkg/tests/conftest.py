from __future__ import annotations

import sys


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance lines at the end of the run, where they are easy to find."""
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
