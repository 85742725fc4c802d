"""Hot-loop kernels: header scanning and per-sequence chain statistics.

Two interchangeable backends live here.  The compiled extension
(``_speedups``, built from Cython) is picked at import time when present;
otherwise the pure-Python implementations in :mod:`reltrace.kernels.pure`
take over.  Set the environment variable ``RELTRACE_PURE=1`` to force the
pure backend even when the extension is installed.
"""

from __future__ import annotations

import os

from . import pure

if os.environ.get("RELTRACE_PURE"):
    _impl = pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND: str = "pure" if _impl is pure else "compiled"

scan_default = _impl.scan_default
corpus_metrics = _impl.corpus_metrics

__all__ = ["BACKEND", "scan_default", "corpus_metrics", "pure"]
