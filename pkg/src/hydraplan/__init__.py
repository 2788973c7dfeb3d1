"""Multi-horizon stochastic capacity expansion with green-hydrogen rules."""

__version__ = "0.1.0"
