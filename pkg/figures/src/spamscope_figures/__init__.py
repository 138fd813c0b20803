"""Figure rendering for spamscope CSV artifacts."""

__version__ = "0.1.0"
