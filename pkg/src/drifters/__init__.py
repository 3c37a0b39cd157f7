"""Agent-based micro-blogging simulator with neutral probe bots and an audit pipeline."""

__version__ = "0.1.0"
