"""Run the acceptance suite and print its PASS/FAIL table.

    python3 scripts/run_acceptance.py [-k criterion_7]
"""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    args = [str(ROOT / "tests" / "test_acceptance.py"), "-q", "-p", "no:cacheprovider"]
    sys.exit(pytest.main(args + sys.argv[1:]))
