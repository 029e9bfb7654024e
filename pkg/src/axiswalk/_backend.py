"""Engine backend selection.

At import time the compiled kernel is preferred when present; the
pure-Python reference engine is the fallback.  Because the two are
draw-for-draw identical (see ``_kernel_py``), switching backends never
changes numerical results, only speed.

Set ``AXISWALK_BACKEND=python`` (or ``py``) to force the fallback, e.g. to
benchmark or to debug the reference loop; ``AXISWALK_BACKEND=compiled``
(or ``c``) insists on the compiled kernel and raises if it is missing.
"""

from __future__ import annotations

import os

from . import _kernel_py
from ._kernel_py import (  # noqa: F401  (re-exported engine constants)
    DEFAULT_TIME_CAP,
    LEAP_MIN_DISTANCE,
    MODE_EXCURSION,
    MODE_TIME,
)

try:
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

_choice = os.environ.get("AXISWALK_BACKEND", "").strip().lower()
if _choice in ("python", "py"):
    _impl = _kernel_py
elif _choice in ("compiled", "c", "cython"):
    if _compiled is None:
        raise ImportError(
            "AXISWALK_BACKEND requested the compiled kernel but axiswalk._kernel "
            "is not importable; reinstall with a C toolchain or unset the variable"
        )
    _impl = _compiled
elif _choice == "":
    _impl = _compiled if _compiled is not None else _kernel_py
else:
    raise ImportError(f"unrecognized AXISWALK_BACKEND value {_choice!r}")

#: Name of the engine actually in use: "compiled" or "python".
BACKEND = _impl.BACKEND_NAME

run_walk = _impl.run_walk
run_sampled = _impl.run_sampled


def backend_name() -> str:
    """Return the name of the active stepping backend."""
    return BACKEND


def available_backends():
    """Names of importable backends, compiled first when present."""
    names = []
    if _compiled is not None:
        names.append("compiled")
    names.append("python")
    return names
