"""Layered-commentary corpus engine with word-level evidence accounting and
distance-based tree reconstruction over manuscript and commentary witnesses."""

__version__ = "0.1.0"
