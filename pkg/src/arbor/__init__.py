"""Self-similar groups acting on rooted trees: recursion, quotients and wildness certificates."""

__version__ = "0.1.0"
