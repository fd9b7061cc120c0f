"""
Entry script for the two-phase conductor toolkit
Run this after installing dependencies:  python run.py rho-n --dim 3
"""
import sys


def main():
    if sys.version_info < (3, 9):
        sys.stderr.write("ERROR: Python 3.9 or higher is required\n")
        sys.stderr.write(f"Current version: {sys.version}\n")
        sys.exit(1)

    try:
        import numpy  # noqa: F401
        import scipy  # noqa: F401
    except ImportError as e:
        sys.stderr.write(f"ERROR: Missing dependencies: {e}\n")
        sys.stderr.write("Please install dependencies first:\n  pip install -r requirements.txt\n")
        sys.exit(1)

    from twophase.api.cli import run
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
