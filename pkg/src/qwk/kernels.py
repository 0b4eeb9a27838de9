"""Select the compiled kernel backend, falling back to pure Python.

Set ``QWK_PURE_PYTHON=1`` to force the fallback (used by the benchmark and by
the backend-equivalence tests).
"""
import os

BACKEND = "python"

if not os.environ.get("QWK_PURE_PYTHON"):
    try:
        from ._kernels import accumulate, ext_product, reorder_sign, sparse_bilinear

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._kernels_py import accumulate, ext_product, reorder_sign, sparse_bilinear

__all__ = ["BACKEND", "accumulate", "ext_product", "reorder_sign", "sparse_bilinear"]
