#!/usr/bin/env python3
import sys
import os

# Ensure the package can be found if running main.py directly from root
if __package__ is None and not hasattr(sys, "frozen"):
    project_root = os.path.dirname(os.path.abspath(__file__))  # main.py sits alongside the app package
    if project_root not in sys.path:
        sys.path.insert(0, project_root)

from app.cli import main_cli


def main():
    main_cli()


if __name__ == "__main__":
    main()
