"""Normal, almost normal and 2-normal surfaces in triangulated 3-manifolds."""

from __future__ import annotations

__version__ = "0.1.0"
