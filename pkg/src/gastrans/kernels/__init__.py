"""Hot-loop kernels with a compiled core and a pure numpy fallback.

The compiled extension (``gastrans.kernels._core``, Cython) accelerates the
per-step assembly of the nonlinear-recursion rows, which dominates runtime for
the full-recursion scheme.  Selection happens at import: the extension is used
when it built successfully, unless ``GASTRANS_PURE=1`` forces the fallback.
Both backends implement the same contracts (see ``_pure`` docstrings) and are
cross-checked in the test suite and compared in ``benchmarks/``.
"""

import os

from . import _pure

if os.environ.get("GASTRANS_PURE") == "1":
    _impl = _pure
    backend_name = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        backend_name = "compiled"
    except ImportError:
        _impl = _pure
        backend_name = "pure"

monomials = _pure.monomials
sas1_momentum_block = _impl.sas1_momentum_block
sas1_momentum_rhs = _impl.sas1_momentum_rhs

__all__ = ["backend_name", "monomials", "sas1_momentum_block", "sas1_momentum_rhs"]
