# brickqec.utils.libw
# -----------------------------------------------------------------------------
# Console helpers that are safe to import from anywhere in the project.
#
# IMPORTANT: Do **not** put heavy top-level imports here (especially ones that
# in turn import `brickqec.core.config`) as that easily leads to circular
# imports.  Keep everything lightweight and import lazily inside the helpers.
#
# Everything goes to stderr: stdout is reserved for data (CSV / JSON / codes).
# -----------------------------------------------------------------------------

from __future__ import annotations

from functools import lru_cache
import os, sys


# ANSI colors
ORANGE = "\033[38;5;208m"
GREEN = "\033[32m"
RED = "\033[31m"
YELLOW = "\033[33m"
RESET = "\033[0m"

def _color_enabled():
    try:
        return sys.stderr.isatty() and os.getenv("NO_COLOR") is None
    except Exception:
        return False


# -----------------------------------------------------------------------------
# Internal helpers
# -----------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _app_cfg():
    """Return a cached instance of :class:`brickqec.core.config.AppConfig`."""
    from brickqec.core.config import get_config  # local import – deliberate

    return get_config()


def is_verbose() -> bool:
    if os.getenv("BRICKQEC_VERBOSE") == "1":
        return True
    try:
        return bool(getattr(_app_cfg(), "verbosity", False))
    except Exception:
        return False


# -----------------------------------------------------------------------------
# Public helpers
# -----------------------------------------------------------------------------

def verbo(what_string: str, *args, **kwargs):
    """Conditionally print *what_string* to stderr.

    Formatted with ``str.format(*args, **kwargs)``.  Shown when the config
    ``verbosity`` flag is set or ``BRICKQEC_VERBOSE=1``.
    """
    if not is_verbose():
        return
    msg = what_string.format(*args, **kwargs) if (args or kwargs) else what_string
    if _color_enabled():
        if msg.startswith("[decoder]") or msg.startswith("[oracle]"):
            msg = f"{ORANGE}{msg}{RESET}"
        elif msg.startswith("[sweep]") or msg.startswith("[fit]"):
            msg = f"{GREEN}{msg}{RESET}"
    print(msg, file=sys.stderr, flush=True)

def verr(what_string: str, *args, **kwargs):
    """Unconditional error/warning print to stderr, red when TTY."""
    msg = what_string.format(*args, **kwargs) if (args or kwargs) else what_string
    if _color_enabled():
        msg = f"{RED}{msg}{RESET}"
    print(msg, file=sys.stderr, flush=True)

def vwarn(what_string: str, *args, **kwargs):
    """Unconditional yellow notice (low statistics, excluded trials, ...)."""
    msg = what_string.format(*args, **kwargs) if (args or kwargs) else what_string
    if _color_enabled():
        msg = f"{YELLOW}{msg}{RESET}"
    print(msg, file=sys.stderr, flush=True)
