"""Backend selection for the hot matvec kernel.

The compiled extension is preferred when it imported cleanly; the
pure-numpy fallback is always available.  Set KONDOCHAIN_PURE_PYTHON=1 to
force the fallback (used by the benchmark and the backend-parity tests).
"""

import os

from . import _matvec_py

if os.environ.get("KONDOCHAIN_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _matvec_py
    BACKEND = "python"
else:
    try:
        from . import _matvec_cy as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _matvec_py
        BACKEND = "python"


def apply_bonds(configs, bits_a, bits_b, strengths, v, out):
    """Accumulate H @ v into out (backend-dispatched)."""
    return _impl.apply_bonds(configs, bits_a, bits_b, strengths, v, out)


def apply_bonds_python(configs, bits_a, bits_b, strengths, v, out):
    return _matvec_py.apply_bonds(configs, bits_a, bits_b, strengths, v, out)
