"""Stabilizer codes from low-depth 1D random Clifford circuits, with exact tensor-network decoding."""

import importlib.metadata
import re
from pathlib import Path


def _get_version() -> str:
    """Version from installed metadata, falling back to the repo's pyproject.toml."""
    try:
        return importlib.metadata.version("brickqec")
    except Exception:
        try:
            text = (Path(__file__).resolve().parents[2] / "pyproject.toml").read_text(encoding="utf-8")
            m = re.search(r'^version\s*=\s*"([^"]+)"', text, flags=re.MULTILINE)
            if m:
                return m.group(1)
        except Exception:
            pass
        return "0.0.0+unknown"


__version__ = _get_version()
