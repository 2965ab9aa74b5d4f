"""Hot kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time.  Set ``SCHMIDTNUM_DISABLE_NUMBA=1``
to force the numpy path (handy for debugging and for the benchmark).

Both paths compute the same thing; ``tests/test_accel.py`` pins them against
each other.
"""

import os

import numpy as np

_DISABLED = os.environ.get("SCHMIDTNUM_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag
    numba = None
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy reference kernels


def truncate_batch_numpy(mats, k):
    """Best rank-``k`` approximation of every matrix in a stack, plus tail energies."""
    u, s, vh = np.linalg.svd(mats, full_matrices=False)
    kept = (u[:, :, :k] * s[:, None, :k]) @ vh[:, :k, :]
    tails = np.sum(s[:, k:] ** 2, axis=1)
    return kept, tails


def partial_transpose_numpy(mat, da, db):
    """Transpose the first tensor factor of a ``(da*db) x (da*db)`` matrix."""
    t = mat.reshape(da, db, da, db)
    return np.ascontiguousarray(t.transpose(2, 1, 0, 3)).reshape(da * db, da * db)


# ---------------------------------------------------------------------------
# numba kernels

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def truncate_batch_numba(mats, k):
        n, r, c = mats.shape
        kept = np.zeros_like(mats)
        tails = np.zeros(n)
        for j in range(n):
            u, s, vh = np.linalg.svd(mats[j], full_matrices=False)
            t = 0.0
            for l in range(k, s.shape[0]):
                t += s[l] * s[l]
            tails[j] = t
            kk = min(k, s.shape[0])
            for a in range(r):
                for b in range(c):
                    acc = 0.0j
                    for l in range(kk):
                        acc += u[a, l] * s[l] * vh[l, b]
                    kept[j, a, b] = acc
        return kept, tails

    @numba.njit(cache=True)
    def partial_transpose_numba(mat, da, db):
        d = da * db
        out = np.empty((d, d), dtype=mat.dtype)
        for a in range(da):
            for b in range(db):
                for a2 in range(da):
                    for b2 in range(db):
                        out[a * db + b, a2 * db + b2] = mat[a2 * db + b, a * db + b2]
        return out

    truncate_batch = truncate_batch_numba
    _pt_kernel = partial_transpose_numba
else:  # pragma: no cover
    truncate_batch = truncate_batch_numpy
    _pt_kernel = partial_transpose_numpy


def partial_transpose_bipartite(mat, da, db):
    """Dispatch the bipartite partial transpose to the active backend."""
    return _pt_kernel(np.ascontiguousarray(mat, dtype=np.complex128), da, db)


def warmup():
    """Trigger JIT compilation so timed code does not pay for it."""
    m = np.eye(4, dtype=np.complex128).reshape(1, 4, 4) + 0j
    truncate_batch(np.ascontiguousarray(m), 1)
    partial_transpose_bipartite(np.eye(4, dtype=np.complex128), 2, 2)
