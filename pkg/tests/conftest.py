import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acc.OUTCOMES):
        terminalreporter.write_line(acc.OUTCOMES[number])
