"""Exact plumbing-graph calculus and combinatorics of plane curves and their covers."""

__version__ = "0.1.0"
