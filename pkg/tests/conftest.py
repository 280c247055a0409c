import sys
from pathlib import Path

# the mpmath oracle lives next to the tests
sys.path.insert(0, str(Path(__file__).resolve().parent))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in mod.SUMMARY:
            terminalreporter.write_line(line)
