"""Decides (un)realizability of syntax-guided synthesis problems over
linear integer arithmetic, restricted to finite example sets, by solving
grammar flow equations exactly over semi-linear sets."""

__version__ = "0.1.0"
