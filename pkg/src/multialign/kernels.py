"""Kernel backend selection.

The compiled extension is used when it imports; set ``MULTIALIGN_PURE=1``
to force the numpy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("MULTIALIGN_PURE", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _kernels_py

adamic_adar_block = _impl.adamic_adar_block
nmf_epoch = _impl.nmf_epoch


def backends():
    """All importable backends by name, for benchmarks and cross-checks."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found["compiled"] = _kernels
    return found
