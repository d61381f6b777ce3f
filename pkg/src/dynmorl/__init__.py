"""Multi-objective deep Q-learning under dynamically changing weights."""

__version__ = "0.1.0"
