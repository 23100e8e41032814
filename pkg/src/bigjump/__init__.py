"""Precise deviation asymptotics for sums of heavy-tailed integer variables."""

__version__ = "0.1.0"
