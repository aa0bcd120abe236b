"""Groupoid atlases and global actions: invariants at desk scale."""

from __future__ import annotations

__version__ = "0.1.0"
