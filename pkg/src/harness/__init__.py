"""Scenario runner and reporting front end of the pulse simulator."""

from .__version__ import __version__

__all__ = ["__version__"]
