# lfunc_lab/app/__init__.py
# Package for the L-function verification lab.

__version__ = "0.3.0"
TOOL_NAME = "lfunc-lab"
