# Script to run the slow test suite (genus walks and Hodge searches)
import argparse
import os
import sys

import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.append(ROOT)


def main():
    parser = argparse.ArgumentParser(description="Run the tests marked slow, which pytest deselects by default")
    parser.add_argument('-k', dest='keyword', type=str, default=None, help="Only run tests matching this expression, e.g. oguiso")
    parser.add_argument('--all', action='store_true', help="Run the fast and the slow tests together")
    args = parser.parse_args()

    marker = "slow or not slow" if args.all else "slow"
    pytest_args = [os.path.join(ROOT, "tests"), "-m", marker, "-v"]
    if args.keyword:
        pytest_args += ["-k", args.keyword]
    sys.exit(pytest.main(pytest_args))


if __name__ == "__main__":
    main()
