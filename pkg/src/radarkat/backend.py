"""Kernel backend selection: numba-jitted loops or pure-numpy fallback.

Set RADARKAT_BACKEND=numpy to force the fallback, RADARKAT_BACKEND=numba to
require numba (import error if unavailable).  Default is numba when it
imports.  Both backends produce bit-identical integer results; the numba
path only exists for speed.
"""

from __future__ import annotations

import os

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

_requested = os.environ.get("RADARKAT_BACKEND", "auto").strip().lower()

if _requested in ("", "auto"):
    USE_NUMBA = HAVE_NUMBA
elif _requested == "numba":
    if not HAVE_NUMBA:
        raise ImportError("RADARKAT_BACKEND=numba but numba is not installed")
    USE_NUMBA = True
elif _requested == "numpy":
    USE_NUMBA = False
else:
    raise ValueError(f"unknown RADARKAT_BACKEND value {_requested!r}")


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
