"""Root-cause classification by similarity of attributed system state graphs."""

__version__ = "0.1.0"
