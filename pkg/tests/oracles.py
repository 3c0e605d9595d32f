"""Independent reference implementations used only to cross-check the package.

These deliberately share no code with the library paths they verify: the
embedding works entry by entry from bit arithmetic, and expected spectra come
from numpy.linalg only where the library route under test is the Jacobi one
(and vice versa).
"""

import numpy as np


def brute_embed(matrix, support, n):
    """Entrywise dense embedding of a local operator.

    ``support`` in any order; bit j of the operator's local index belongs to
    qubit ``support[j]``. Qubit i is bit i of the global index.
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    dim = 1 << n
    rest = [q for q in range(n) if q not in support]
    out = np.zeros((dim, dim), dtype=np.complex128)
    for row in range(dim):
        for col in range(dim):
            if any(((row >> q) & 1) != ((col >> q) & 1) for q in rest):
                continue
            r = sum((((row >> s) & 1) << j) for j, s in enumerate(support))
            c = sum((((col >> s) & 1) << j) for j, s in enumerate(support))
            out[row, col] = matrix[r, c]
    return out


def brute_dense(h):
    """Sum of brute_embed over all terms of a Hamiltonian."""
    dim = 1 << h.n
    out = np.zeros((dim, dim), dtype=np.complex128)
    for t in h.terms:
        out += brute_embed(t.matrix, list(t.support), h.n)
    return out


def random_hermitian(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (g + g.conj().T)
