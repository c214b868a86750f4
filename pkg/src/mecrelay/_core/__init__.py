"""Numeric kernel backend selection.

The compiled extension is preferred when it imports cleanly; the
pure-Python module is a drop-in fallback.  Set ``MECRELAY_BACKEND=python``
(or ``compiled``) to force a choice, e.g. for benchmarking.
"""

import importlib
import os

from mecrelay._core import pykernels

_forced = os.environ.get("MECRELAY_BACKEND", "auto").lower()

_speedups = None
if _forced in ("auto", "compiled"):
    try:
        _speedups = importlib.import_module("mecrelay._core._speedups")
    except ImportError:
        if _forced == "compiled":
            raise ImportError(
                "MECRELAY_BACKEND=compiled but the _speedups extension is "
                "not built; reinstall with a C toolchain available"
            )

kernels = pykernels if (_forced == "python" or _speedups is None) else _speedups

BACKEND = kernels.BACKEND_NAME


def available_backends():
    """Importable kernel modules, name -> module."""
    out = {"python": pykernels}
    try:
        out["compiled"] = importlib.import_module("mecrelay._core._speedups")
    except ImportError:
        pass
    return out
