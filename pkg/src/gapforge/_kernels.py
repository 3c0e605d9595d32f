"""Hot numeric kernels, JIT-compiled with numba when available.

Two inner loops dominate runtime at desk scale and live here:

* scattering a local operator into the full ``2**n`` dense matrix
  (called once per term per embedding), and
* a cyclic Jacobi eigensolver for real symmetric matrices, used as the
  independently coded cross-check against the LAPACK path.

Each kernel has two implementations: explicit loops compiled with
``numba.njit``, and a vectorized pure-NumPy fallback. The active path is
chosen at import from the ``GAPFORGE_BACKEND`` environment variable
(``numba``, ``numpy``, or ``auto``; default ``auto`` prefers numba when
importable). ``benchmarks/bench_kernels.py`` times one against the other.

Both implementations of a kernel produce identical results up to
floating-point roundoff; tests assert agreement.
"""

import os
import warnings

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False


def _resolve_backend() -> str:
    choice = os.environ.get("GAPFORGE_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if choice == "numba":
        if not NUMBA_AVAILABLE:
            warnings.warn("GAPFORGE_BACKEND=numba but numba is not importable; using numpy")
            return "numpy"
        return "numba"
    if choice == "numpy":
        return "numpy"
    raise ValueError(f"GAPFORGE_BACKEND must be 'numba', 'numpy', or 'auto', got {choice!r}")


BACKEND = _resolve_backend()


def active_backend() -> str:
    """Name of the kernel path in use, ``numba`` or ``numpy``."""
    return BACKEND


def scatter_table(positions) -> np.ndarray:
    """Map every k-bit integer to the full index with its bits moved to ``positions``.

    ``positions[j]`` receives bit ``j`` of the input. Returns an int64 array
    of length ``2**k``.
    """
    positions = np.asarray(positions, dtype=np.int64)
    k = positions.shape[0]
    vals = np.arange(1 << k, dtype=np.int64)
    out = np.zeros(1 << k, dtype=np.int64)
    for j in range(k):
        out |= ((vals >> j) & 1) << int(positions[j])
    return out


# ---------------------------------------------------------------------------
# Term embedding
# ---------------------------------------------------------------------------


def _embed_add_loops(out, mat, sub_idx, env_idx):
    d = sub_idx.shape[0]
    for e in range(env_idx.shape[0]):
        base = env_idx[e]
        for rp in range(d):
            row = base + sub_idx[rp]
            for rc in range(d):
                out[row, base + sub_idx[rc]] += mat[rp, rc]


def _embed_add_numpy(out, mat, sub_idx, env_idx):
    for base in env_idx:
        idx = base + sub_idx
        out[np.ix_(idx, idx)] += mat


def embed_add(out: np.ndarray, matrix: np.ndarray, support, n: int) -> None:
    """Add ``matrix`` acting on the qubits in ``support`` into ``out`` in place.

    ``out`` is the dense ``2**n`` matrix under the convention that qubit ``i``
    is bit ``i`` of the basis index (qubit 0 least significant). ``support``
    must be strictly increasing; bit ``j`` of the local index of ``matrix``
    corresponds to ``support[j]``.
    """
    support = np.asarray(support, dtype=np.int64)
    rest = np.array([q for q in range(n) if q not in set(support.tolist())], dtype=np.int64)
    sub_idx = scatter_table(support)
    env_idx = scatter_table(rest)
    mat = np.ascontiguousarray(matrix, dtype=np.complex128)
    if BACKEND == "numba":
        _embed_add_loops_jit(out, mat, sub_idx, env_idx)
    else:
        _embed_add_numpy(out, mat, sub_idx, env_idx)


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigensolver (real symmetric)
# ---------------------------------------------------------------------------


def _offdiag_norm(a: np.ndarray) -> float:
    lower = np.tril(a, -1)
    return float(np.sqrt(2.0 * np.sum(lower * lower)))


def _jacobi_cycle_loops(a, tol, max_sweeps):
    # One call runs full sweeps until the off-diagonal Frobenius norm drops
    # below tol; returns the number of sweeps used (== max_sweeps on failure).
    d = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(d - 1):
            for j in range(i + 1, d):
                off += a[i, j] * a[i, j]
        if np.sqrt(2.0 * off) <= tol:
            return sweep
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(d):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = c * aip - s * aiq
                        a[p, i] = a[i, p]
                        a[i, q] = c * aiq + s * aip
                        a[q, i] = a[i, q]
    return max_sweeps


def _jacobi_cycle_numpy(a, tol, max_sweeps):
    d = a.shape[0]
    for sweep in range(max_sweeps):
        if _offdiag_norm(a) <= tol:
            return sweep
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = 0.0
                a[q, p] = 0.0
    return max_sweeps


if NUMBA_AVAILABLE:
    _embed_add_loops_jit = njit(cache=True)(_embed_add_loops)
    _jacobi_cycle_jit = njit(cache=True)(_jacobi_cycle_loops)
else:  # pragma: no cover
    _embed_add_loops_jit = _embed_add_loops
    _jacobi_cycle_jit = _jacobi_cycle_loops


def jacobi_eigvalsh(matrix: np.ndarray, rel_tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.

    Independent of the LAPACK route: a complex Hermitian input ``A + iB`` is
    lifted to the real symmetric ``[[A, -B], [B, A]]``, whose spectrum is that
    of the input with every eigenvalue doubled, and the real matrix is
    diagonalized by plane rotations.

    Parameters
    ----------
    matrix : ndarray
        Hermitian, real or complex.
    rel_tol : float
        Convergence threshold on the off-diagonal Frobenius norm, relative
        to the Frobenius norm of the input.
    max_sweeps : int
        Sweep cap; cyclic Jacobi converges quadratically, so hitting the cap
        signals a non-Hermitian or pathological input.

    Returns
    -------
    ndarray of float64, sorted non-decreasing.
    """
    mat = np.asarray(matrix)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if np.iscomplexobj(mat) and np.any(mat.imag):
        re = np.ascontiguousarray(mat.real, dtype=np.float64)
        im = np.ascontiguousarray(mat.imag, dtype=np.float64)
        work = np.block([[re, -im], [im, re]])
        doubled = True
    else:
        work = np.ascontiguousarray(mat.real, dtype=np.float64).copy()
        doubled = False

    tol = rel_tol * max(1.0, float(np.linalg.norm(work)))
    if BACKEND == "numba":
        _jacobi_cycle_jit(work, tol, max_sweeps)
    else:
        _jacobi_cycle_numpy(work, tol, max_sweeps)
    if _offdiag_norm(work) > tol:
        raise RuntimeError(f"Jacobi sweeps did not converge within {max_sweeps} sweeps")

    values = np.sort(np.diag(work))
    if doubled:
        values = values[::2].copy()
    return values
