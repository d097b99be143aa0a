"""Reactive synthesis for finite-trace temporal properties over linear
arithmetic with one-step lookback."""

__version__ = "0.1.0"
