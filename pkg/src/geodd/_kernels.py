"""Kernel backend selection: compiled extension if present, else pure Python.

Set ``GEODD_PURE=1`` to force the fallback (used by the benchmark to compare
both backends in one process tree).
"""

from __future__ import annotations

import os

from . import _speedups_pure

if os.environ.get("GEODD_PURE") == "1":
    _impl = _speedups_pure
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _speedups_pure
        BACKEND = "pure"

make_table = _impl.make_table
min_permuted = _impl.min_permuted
all_permuted = _impl.all_permuted
