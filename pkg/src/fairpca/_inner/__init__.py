"""Backend selection for the SVM inner loops.

Two interchangeable implementations of the dual coordinate descent epoch
(linear SVM) and the SMO pairwise-update loop (kernel SVM) live here: a
Cython extension and a pure-Python transliteration. The compiled one is
preferred when importable; set ``FAIRPCA_PURE_PYTHON=1`` to force the
Python version (used by the backend-equivalence tests and the benchmark).

Both backends implement the same algorithm with the same deterministic
update order; they agree to floating-point roundoff, not bit-for-bit.
"""

from __future__ import annotations

import os

_forced = os.environ.get("FAIRPCA_PURE_PYTHON", "").strip() not in ("", "0")

if _forced:
    from . import _svm_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _svm as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _svm_py as _impl
        BACKEND = "python"

dcd_fit = _impl.dcd_fit
smo_fit = _impl.smo_fit


def get_backend(name: str | None = None):
    """Return (module, label) for a named backend, default the active one.

    ``name`` may be "compiled" or "python"; requesting "compiled" when the
    extension is unavailable raises ImportError.
    """
    if name is None or name == BACKEND:
        return _impl, BACKEND
    if name == "python":
        from . import _svm_py
        return _svm_py, "python"
    if name == "compiled":
        from . import _svm  # raises ImportError if not built
        return _svm, "compiled"
    raise ValueError(f"unknown backend {name!r}")


__all__ = ["BACKEND", "dcd_fit", "smo_fit", "get_backend"]
