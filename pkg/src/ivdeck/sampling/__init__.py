"""Record sampler with a compiled core and a NumPy fallback.

The backend is chosen once at import: the Cython kernel when it was
built, otherwise the vectorized fallback. Set IVDECK_SAMPLER=numpy or
IVDECK_SAMPLER=compiled to force one (forcing the compiled kernel when
it is absent raises). Both backends emit identical bytes for identical
(seed, offset, parameters); see _fallback.py for the stream contract.
"""

from __future__ import annotations

import importlib
import os

import numpy as np

from ..errors import InvalidParamsError
from . import _fallback

_MASK64 = 0xFFFFFFFFFFFFFFFF


def _import_kernel():
    return importlib.import_module(__name__ + "._kernel")


_requested = os.environ.get("IVDECK_SAMPLER", "").strip().lower()
_kernel = None
if _requested in ("", "compiled"):
    try:
        _kernel = _import_kernel()
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "IVDECK_SAMPLER=compiled but the Cython kernel is not built; "
                "reinstall with a working compiler or unset the variable"
            )
elif _requested != "numpy":
    raise ValueError(
        "IVDECK_SAMPLER must be 'compiled' or 'numpy', got %r" % (_requested,)
    )

BACKEND = "compiled" if _kernel is not None else "numpy"


def available_backends() -> dict:
    """Name -> sample_records callable for every importable backend."""
    backends = {"numpy": _fallback.sample_records}
    try:
        backends["compiled"] = _import_kernel().sample_records
    except ImportError:
        pass
    return backends


def sample_records(t, t_star, c, c_star, assign_prob, n, seed, offset=0):
    """Draw records [offset, offset+n) with the selected backend.

    Probability arrays are coerced to contiguous float64. Returns
    (latent_u int64, assign uint8, take uint8, cure uint8).
    """
    arrays = [
        np.ascontiguousarray(np.asarray(col, dtype=np.float64))
        for col in (t, t_star, c, c_star)
    ]
    size = arrays[0].shape[0]
    if size == 0:
        raise InvalidParamsError("probability arrays must be non-empty")
    for col in arrays[1:]:
        if col.shape[0] != size:
            raise InvalidParamsError("probability arrays must have equal length")
    if n < 0:
        raise InvalidParamsError("n must be >= 0, got %r" % (n,))
    if offset < 0:
        raise InvalidParamsError("offset must be >= 0, got %r" % (offset,))
    seed = int(seed) & _MASK64
    impl = _kernel.sample_records if _kernel is not None else _fallback.sample_records
    return impl(*arrays, float(assign_prob), int(n), seed, int(offset))
