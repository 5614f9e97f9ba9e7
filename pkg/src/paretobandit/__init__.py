"""Unbalanced bandit algorithms and Pareto regret frontier tools."""

__version__ = "0.1.0"
