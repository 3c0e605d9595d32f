"""Exact spectral oracle: eigenvalues, spectral gap, ground-truth deciders.

The main eigensolver is LAPACK's dense Hermitian routine via
``numpy.linalg.eigh``; ``crosscheck_eigenvalues`` recomputes the spectrum
with the independently coded Jacobi kernel for cross-validation.

Spectra are memoized per Hamiltonian content hash behind a lock, so repeated
oracle queries against the same operator diagonalize it once.
"""

from collections import OrderedDict
from dataclasses import dataclass
from enum import Enum
import threading

import numpy as np

from . import config
from ._kernels import jacobi_eigvalsh
from .errors import DimensionError, IndexOutOfRangeError, TooLargeError
from .hamiltonian import Hamiltonian, KlhInstance, SpectralGapInstance, to_dense


class PromiseVerdict(Enum):
    YES = "yes"
    NO = "no"
    INVALID = "invalid"

    @property
    def is_yes(self) -> bool:
        return self is PromiseVerdict.YES


@dataclass(frozen=True)
class Spectrum:
    """Full sorted spectrum of a Hamiltonian, length ``2**n``."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        vals = np.array(self.eigenvalues, dtype=np.float64, copy=True)
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def lambda_c(self, c: int) -> float:
        """The c-th smallest eigenvalue, 1-based, counted with multiplicity."""
        if not 1 <= c <= len(self.eigenvalues):
            raise IndexOutOfRangeError(f"c={c} outside [1, {len(self.eigenvalues)}]")
        return float(self.eigenvalues[c - 1])

    @property
    def gap(self) -> float:
        if len(self.eigenvalues) < 2:
            raise DimensionError("spectral gap needs dimension >= 2")
        return float(self.eigenvalues[1] - self.eigenvalues[0])


class _SpectrumCache:
    def __init__(self, capacity: int = 512):
        self._capacity = capacity
        self._lock = threading.Lock()
        self._store: OrderedDict[str, np.ndarray] = OrderedDict()

    def get(self, key: str):
        with self._lock:
            vals = self._store.get(key)
            if vals is not None:
                self._store.move_to_end(key)
            return vals

    def put(self, key: str, vals: np.ndarray) -> None:
        with self._lock:
            self._store[key] = vals
            self._store.move_to_end(key)
            while len(self._store) > self._capacity:
                self._store.popitem(last=False)

    def clear(self) -> None:
        with self._lock:
            self._store.clear()


_cache = _SpectrumCache()


def clear_cache() -> None:
    _cache.clear()


def eigenvalues(h: Hamiltonian, verify: bool = False) -> Spectrum:
    """Full sorted spectrum of ``h``.

    With ``verify=True``, eigenvectors are computed as well and each residual
    ``|H v - w v|`` is checked against ``1e-9 * max(1, |H|)``.
    """
    if h.n > config.n_max():
        raise TooLargeError(f"n={h.n} exceeds n_max={config.n_max()}")
    cached = _cache.get(h.fingerprint)
    if cached is not None and not verify:
        return Spectrum(cached)
    dense = to_dense(h)
    if verify:
        vals, vecs = np.linalg.eigh(dense)
        scale = max(1.0, float(np.linalg.norm(dense, 2)) if dense.size else 1.0)
        residual = np.linalg.norm(dense @ vecs - vecs * vals, axis=0)
        worst = float(residual.max()) if residual.size else 0.0
        if worst > config.RESIDUAL_TOL * scale:
            raise ArithmeticError(f"eigenpair residual {worst:.3e} above tolerance")
    else:
        vals = np.linalg.eigvalsh(dense)
    _cache.put(h.fingerprint, vals)
    return Spectrum(vals)


def crosscheck_eigenvalues(h: Hamiltonian) -> np.ndarray:
    """Spectrum via the independent Jacobi route; never touches the cache."""
    if h.n > config.n_max():
        raise TooLargeError(f"n={h.n} exceeds n_max={config.n_max()}")
    return jacobi_eigvalsh(to_dense(h))


def spectral_gap(h: Hamiltonian) -> float:
    """Difference between the two smallest eigenvalues, multiplicity counted.

    A degenerate ground space yields exactly 0.
    """
    if h.n < 1:
        raise DimensionError("spectral gap needs at least one qubit")
    return eigenvalues(h).gap


def lambda_c(h: Hamiltonian, c: int) -> float:
    """The c-th smallest eigenvalue of ``h`` (1-based, with multiplicity)."""
    return eigenvalues(h).lambda_c(c)


def decide_gap_truth(inst: SpectralGapInstance) -> PromiseVerdict:
    """Ground truth for the spectral-gap promise problem.

    YES when gap <= a, NO when gap >= b, INVALID strictly between. The
    comparison is exact on the computed gap; at supported sizes the promise
    width dominates eigensolver error, so no tolerance band is needed.
    """
    gap = spectral_gap(inst.hamiltonian)
    if gap <= inst.a:
        return PromiseVerdict.YES
    if gap >= inst.b:
        return PromiseVerdict.NO
    return PromiseVerdict.INVALID


def decide_klh_truth(inst: KlhInstance) -> PromiseVerdict:
    """Ground truth for the ground-energy promise problem (lambda_1 vs a, b)."""
    lam1 = lambda_c(inst.hamiltonian, 1)
    if lam1 <= inst.a:
        return PromiseVerdict.YES
    if lam1 >= inst.b:
        return PromiseVerdict.NO
    return PromiseVerdict.INVALID
