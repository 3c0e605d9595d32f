"""k-local Hamiltonians on qubits: construction, validation, dense embedding.

Bit-ordering convention, used everywhere in this package: qubit ``i`` is bit
``i`` of the computational-basis index, with qubit 0 least significant. A term
on support ``[q0 < q1 < ...]`` stores its matrix with local bit ``j``
corresponding to qubit ``qj``.

All values are immutable after construction; operations are pure functions
and safe to call concurrently.
"""

from dataclasses import dataclass, field
from functools import cached_property
import hashlib

import numpy as np

from . import config
from ._kernels import embed_add, scatter_table
from .errors import (
    DimensionMismatchError,
    DuplicateIndexError,
    IndexOutOfRangeError,
    InvalidInputError,
    NonHermitianError,
    TooLargeError,
)


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.complex128).copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class LocalTerm:
    """One Hermitian summand acting on a strictly increasing qubit support."""

    support: tuple
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << len(self.support)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def scaled(self, factor: float) -> "LocalTerm":
        return LocalTerm(self.support, _readonly(self.matrix * factor))

    def canonical_bytes(self) -> bytes:
        sup = ",".join(str(q) for q in self.support).encode()
        return sup + b"|" + np.ascontiguousarray(self.matrix).tobytes()


def _bit_permutation(matrix: np.ndarray, order: np.ndarray) -> np.ndarray:
    # Reorder tensor factors so local bit j tracks the j-th smallest qubit.
    dest = scatter_table(order)
    permuted = np.empty_like(matrix)
    permuted[np.ix_(dest, dest)] = matrix
    return permuted


def make_local_term(support, matrix) -> LocalTerm:
    """Validate and build a LocalTerm; Hermiticity enforced at 1e-12 entrywise.

    ``support`` may be given in any order; the matrix is permuted to the
    sorted-support convention. Raises DuplicateIndexError,
    DimensionMismatchError, or NonHermitianError.
    """
    support = [int(q) for q in support]
    if len(set(support)) != len(support):
        raise DuplicateIndexError(f"support {support} repeats a qubit index")
    if any(q < 0 for q in support):
        raise IndexOutOfRangeError(f"support {support} contains a negative index")
    mat = np.asarray(matrix, dtype=np.complex128)
    dim = 1 << len(support)
    if mat.shape != (dim, dim):
        raise DimensionMismatchError(
            f"matrix shape {mat.shape} does not match 2**{len(support)} for support {support}"
        )
    asym = np.max(np.abs(mat - mat.conj().T)) if dim else 0.0
    if asym > config.STRUCT_TOL:
        raise NonHermitianError(f"matrix deviates from Hermitian by {asym:.3e}")
    if support != sorted(support):
        order = np.argsort(np.argsort(support))
        mat = _bit_permutation(mat, order)
        support = sorted(support)
    mat = 0.5 * (mat + mat.conj().T)
    return LocalTerm(tuple(support), _readonly(mat))


@dataclass(frozen=True)
class Hamiltonian:
    """Sum of local Hermitian terms on ``n`` qubits."""

    n: int
    terms: tuple

    @property
    def k(self) -> int:
        """Locality: largest support size among the terms (0 when empty)."""
        return max((len(t.support) for t in self.terms), default=0)

    @property
    def dim(self) -> int:
        return 1 << self.n

    @cached_property
    def fingerprint(self) -> str:
        """Content hash, stable under term reordering."""
        h = hashlib.sha256()
        h.update(f"n={self.n}".encode())
        for blob in sorted(t.canonical_bytes() for t in self.terms):
            h.update(b"#")
            h.update(blob)
        return h.hexdigest()

    def scaled(self, factor: float) -> "Hamiltonian":
        return Hamiltonian(self.n, tuple(t.scaled(factor) for t in self.terms))


def assemble(n: int, terms) -> Hamiltonian:
    """Build a Hamiltonian on ``n`` qubits; an empty term list is the zero operator."""
    n = int(n)
    if n < 0:
        raise IndexOutOfRangeError(f"qubit count must be non-negative, got {n}")
    terms = tuple(terms)
    for t in terms:
        if t.support and t.support[-1] >= n:
            raise IndexOutOfRangeError(
                f"term support {t.support} outside [0, {n})"
            )
    return Hamiltonian(n, terms)


def to_dense(h: Hamiltonian) -> np.ndarray:
    """Dense ``2**n`` matrix of ``h``: each term tensored with identity elsewhere.

    Raises TooLargeError when ``n`` exceeds the configured cap.
    """
    if h.n > config.n_max():
        raise TooLargeError(f"n={h.n} exceeds n_max={config.n_max()}")
    out = np.zeros((h.dim, h.dim), dtype=np.complex128)
    for t in h.terms:
        embed_add(out, t.matrix, np.asarray(t.support, dtype=np.int64), h.n)
    return out


def shifted_dense(h: Hamiltonian, shift: float) -> np.ndarray:
    """Dense form of ``h`` plus a global multiple of the identity."""
    out = to_dense(h)
    out[np.diag_indices_from(out)] += shift
    return out


@dataclass(frozen=True)
class KlhInstance:
    """Ground-energy promise instance: decide lambda_1 <= a or lambda_1 >= b."""

    hamiltonian: Hamiltonian
    a: float
    b: float
    c: float = 2.0

    def __post_init__(self):
        _check_thresholds(self)


@dataclass(frozen=True)
class SpectralGapInstance:
    """Spectral-gap promise instance: decide gap <= a (YES) or gap >= b (NO)."""

    hamiltonian: Hamiltonian
    a: float
    b: float
    c: float = 2.0

    def __post_init__(self):
        _check_thresholds(self)


def _check_thresholds(inst) -> None:
    object.__setattr__(inst, "a", float(inst.a))
    object.__setattr__(inst, "b", float(inst.b))
    object.__setattr__(inst, "c", float(inst.c))
    if not inst.b > inst.a:
        raise InvalidInputError(f"thresholds need b > a, got a={inst.a}, b={inst.b}")
    if inst.c <= 0:
        raise InvalidInputError(f"promise-gap exponent must be positive, got {inst.c}")


@dataclass(frozen=True)
class TermCheck:
    index: int
    min_eigenvalue: float
    max_eigenvalue: float
    psd_ok: bool
    norm_ok: bool


@dataclass(frozen=True)
class KlhValidationReport:
    """Outcome of the per-term PSD/norm checks and the promise-gap width check."""

    term_checks: tuple
    gap_ok: bool
    failures: tuple = field(default=())

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_klh(inst: KlhInstance) -> KlhValidationReport:
    """Check every term is PSD with operator norm at most 1, and that
    ``b - a >= n**(-c)``. Failures are reported, not raised."""
    checks = []
    failures = []
    for i, term in enumerate(inst.hamiltonian.terms):
        w = term.eigenvalues()
        lo, hi = float(w[0]), float(w[-1])
        psd_ok = lo >= -config.PSD_TOL
        norm_ok = max(abs(lo), abs(hi)) <= 1.0 + config.PSD_TOL
        checks.append(TermCheck(i, lo, hi, psd_ok, norm_ok))
        if not psd_ok:
            failures.append(f"NegativeTerm[{i}]")
        if not norm_ok:
            failures.append(f"NormExceeded[{i}]")
    n = inst.hamiltonian.n
    # The inverse-polynomial width bound constrains scaling, so it only
    # bites from n = 2 up; at n <= 1 it would demand b - a >= 1 outright.
    gap_ok = n < 2 or (inst.b - inst.a) >= n ** (-inst.c)
    if not gap_ok:
        failures.append("PromiseGapTooNarrow")
    return KlhValidationReport(tuple(checks), gap_ok, tuple(failures))


def random_instance(n: int, k: int, m: int, seed: int) -> Hamiltonian:
    """Deterministic random Hamiltonian: ``m`` terms, each on ``k`` distinct
    qubits, each a random Hermitian matrix rescaled so its spectrum spans
    exactly [0, 1]."""
    if k > n:
        raise IndexOutOfRangeError(f"locality k={k} exceeds qubit count n={n}")
    if n > config.n_max():
        raise TooLargeError(f"n={n} exceeds n_max={config.n_max()}")
    if k < 1 or m < 0:
        raise InvalidInputError(f"need k >= 1 and m >= 0, got k={k}, m={m}")
    rng = np.random.default_rng(seed)
    dim = 1 << k
    terms = []
    for _ in range(m):
        support = np.sort(rng.choice(n, size=k, replace=False))
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        herm = 0.5 * (g + g.conj().T)
        w = np.linalg.eigvalsh(herm)
        span = float(w[-1] - w[0])
        if span < 1e-12:
            mat = np.zeros((dim, dim), dtype=np.complex128)
        else:
            mat = (herm - w[0] * np.eye(dim)) / span
        terms.append(make_local_term(support.tolist(), mat))
    return assemble(n, terms)
