"""Exact engine for projectively invariant operators and star products."""

__version__ = "0.1.0"
