"""Stepping-backend selection.

The compiled extension (_core) is preferred when importable; otherwise the
numpy fallback (_pyref) is used.  Both implement the same chunk functions
with identical floating-point behavior, so the choice never changes
results.  Set QUBITSME_BACKEND=python or =compiled to force one (forcing
"compiled" raises if the extension is missing).
"""

import os

from . import _pyref

_forced = os.environ.get("QUBITSME_BACKEND")

if _forced == "python":
    _impl = _pyref
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        if _forced == "compiled":
            raise
        _impl = _pyref
        BACKEND = "python"
    else:
        if _forced not in (None, "compiled"):
            raise RuntimeError(
                f"QUBITSME_BACKEND={_forced!r} not understood "
                "(use 'python' or 'compiled')")

MAX_RECORDED_JUMPS = _pyref.MAX_RECORDED_JUMPS

vacuum_hd_chunk = _impl.vacuum_hd_chunk
vacuum_pd_chunk = _impl.vacuum_pd_chunk
photon_hd_chunk = _impl.photon_hd_chunk
photon_pd_chunk = _impl.photon_pd_chunk
cat_hd_chunk = _impl.cat_hd_chunk
cat_pd_chunk = _impl.cat_pd_chunk


def backend_name() -> str:
    return BACKEND
