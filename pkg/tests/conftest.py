import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# criterion name -> list of (test id, passed)
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, results in ACCEPTANCE.items():
        ok = all(p for _, p in results)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
        for test, p in results:
            if not p:
                terminalreporter.write_line(f"        failing part: {test}")
