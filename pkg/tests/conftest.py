import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

# fixed seeds so every run draws the same examples
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


def pytest_terminal_summary(terminalreporter):
    from helpers import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
