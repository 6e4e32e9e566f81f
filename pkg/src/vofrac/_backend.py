"""Numeric backend selection.

Two interchangeable cores implement program execution and vectorized
log-gamma: ``vofrac._fastcore`` (compiled, preferred) and
``vofrac._purecore`` (pure NumPy, always available).  Selection happens once
at import:

* ``VOFRAC_BACKEND=fast``  -- require the compiled core, fail if missing;
* ``VOFRAC_BACKEND=pure``  -- force the pure core;
* ``VOFRAC_BACKEND=auto`` or unset -- compiled if importable, else pure.

:func:`use` swaps the core at runtime (tests and benchmarks only; results
agree to rounding, so numerical behaviour does not depend on the choice).
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _purecore

__all__ = ["core", "active", "available", "use"]


def _load_fast() -> ModuleType:
    from . import _fastcore

    return _fastcore


def _select_initial() -> ModuleType:
    choice = os.environ.get("VOFRAC_BACKEND", "auto").strip().lower()
    if choice == "pure":
        return _purecore
    if choice == "fast":
        return _load_fast()
    if choice == "auto" or choice == "":
        try:
            return _load_fast()
        except ImportError:
            return _purecore
    raise ValueError(
        f"VOFRAC_BACKEND={choice!r} not recognized (expected fast, pure, or auto)"
    )


core: ModuleType = _select_initial()


def active() -> str:
    """Name of the core currently in use (``"fast"`` or ``"pure"``)."""
    return core.NAME


def available() -> tuple[str, ...]:
    """Names of the cores importable in this environment."""
    try:
        _load_fast()
    except ImportError:
        return ("pure",)
    return ("fast", "pure")


def use(name: str) -> str:
    """Swap the active core; returns the previous core's name."""
    global core
    previous = core.NAME
    if name == "pure":
        core = _purecore
    elif name == "fast":
        core = _load_fast()
    else:
        raise ValueError(f"unknown backend {name!r} (expected fast or pure)")
    return previous
