"""Exact construction and verification of a generalized cluster structure on GL_n."""
from __future__ import annotations

__version__ = "0.1.0"
