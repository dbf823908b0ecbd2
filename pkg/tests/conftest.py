import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import helpers


def pytest_terminal_summary(terminalreporter):
    if helpers.ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in helpers.ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
