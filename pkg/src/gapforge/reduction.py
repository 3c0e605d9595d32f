"""Many-one reduction from the ground-energy problem to the spectral-gap problem.

Given a positive semidefinite input ``H`` on ``n`` qubits, build ``H'`` on
``n + 1`` qubits (ancilla on top, most significant) whose spectrum splits by
ancilla value:

* ancilla 0 block: a single zero-energy state at basis index 0, every other
  state at energy >= 1;
* ancilla 1 block: a copy of the spectrum of ``H``.

Hence ``lambda_1(H') = 0`` and the gap of ``H'`` equals ``min(lambda_1(H), 1)``,
so the YES/NO answer of the ground-energy instance carries over to the
spectral-gap instance with the same thresholds (for a, b <= 1).

Two interchangeable realizations of the ancilla-0 block are provided:

* ``GLOBAL_PROJECTOR`` stores the literal projector complement
  ``|0><0| (x) (I - |0..0><0..0|)`` as one term spanning all n+1 qubits;
* ``HAMMING_PENALTY`` charges one unit per excited qubit,
  ``sum_i |0><0|_anc (x) |1><1|_i``, keeping every term at most
  ``max(k + 1, 2)``-local.

Both give the 0-block a unique nullstate with all other 0-block energies
at least 1, so their output gaps agree.
"""

from dataclasses import dataclass
from enum import Enum
import warnings

import numpy as np

from . import config
from .errors import DimensionMismatchError, InvalidInputError, TooLargeError
from .hamiltonian import (
    Hamiltonian,
    KlhInstance,
    LocalTerm,
    SpectralGapInstance,
    assemble,
    make_local_term,
    to_dense,
    validate_klh,
)
from .spectrum import lambda_c

_P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
_P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)


class ReductionVariant(Enum):
    GLOBAL_PROJECTOR = "global"
    HAMMING_PENALTY = "hamming"


@dataclass(frozen=True)
class ReductionOutput:
    """Reduced instance plus bookkeeping for the ancilla register."""

    instance: SpectralGapInstance
    ancilla_index: int
    null_state_index: int


def _attach_ancilla(term: LocalTerm, ancilla: int) -> LocalTerm:
    # |1><1| on the ancilla (new most significant local bit) tensor the term.
    return make_local_term(term.support + (ancilla,), np.kron(_P1, term.matrix))


def reduce_klh_to_gap(inst: KlhInstance, variant: ReductionVariant) -> ReductionOutput:
    """Map a ground-energy instance to a spectral-gap instance on one more qubit.

    Thresholds a, b are copied through. The input must pass the PSD part of
    ``validate_klh``; the 1-block spectrum must not dip below the 0-block
    nullstate, and positive semidefiniteness is exactly what guarantees that.

    Raises InvalidInputError on PSD failure. Norm violations and thresholds
    above 1 do not break the construction itself and only warn (the output
    gap never exceeds 1, so b > 1 voids answer preservation).
    """
    n = inst.hamiltonian.n
    if n < 1:
        raise InvalidInputError("reduction needs at least one input qubit")
    report = validate_klh(inst)
    if any(not check.psd_ok for check in report.term_checks):
        raise InvalidInputError(
            f"input failed PSD validation: {', '.join(report.failures)}"
        )
    if any(not check.norm_ok for check in report.term_checks):
        warnings.warn("input has terms with norm > 1; gap still equals min(lambda_1, 1)")
    if inst.b > 1.0:
        warnings.warn("threshold b > 1 cannot be met by the reduced gap, which is capped at 1")

    ancilla = n
    terms = []
    if variant is ReductionVariant.GLOBAL_PROJECTOR:
        if n + 1 > config.n_max():
            raise TooLargeError(
                f"global-projector term spans {n + 1} qubits, above n_max={config.n_max()}"
            )
        dim = 1 << n
        complement = np.eye(dim, dtype=np.complex128)
        complement[0, 0] = 0.0
        terms.append(make_local_term(tuple(range(n + 1)), np.kron(_P0, complement)))
    elif variant is ReductionVariant.HAMMING_PENALTY:
        penalty = np.kron(_P0, _P1)
        for i in range(n):
            terms.append(make_local_term((i, ancilla), penalty))
    else:
        raise InvalidInputError(f"unknown reduction variant: {variant!r}")
    for term in inst.hamiltonian.terms:
        terms.append(_attach_ancilla(term, ancilla))

    reduced = assemble(n + 1, terms)
    instance = SpectralGapInstance(reduced, inst.a, inst.b, inst.c)
    return ReductionOutput(instance=instance, ancilla_index=ancilla, null_state_index=0)


def predicted_gap(inst: KlhInstance) -> float:
    """Analytic prediction for the reduced instance's gap: ``min(lambda_1, 1)``."""
    lam1 = lambda_c(inst.hamiltonian, 1)
    if lam1 > 1.0:
        warnings.warn(f"lambda_1 = {lam1:.6g} > 1; predicted gap capped at 1")
    return min(lam1, 1.0)


def block_spectrum(out: ReductionOutput, input_h: Hamiltonian):
    """Spectra of the two ancilla blocks of the reduced operator.

    Returns ``(zero_block, one_block)`` as sorted arrays. The one-block must
    reproduce the input spectrum; the zero-block carries the lone nullstate
    with everything else at energy >= 1.
    """
    reduced = out.instance.hamiltonian
    if reduced.n != input_h.n + 1 or out.ancilla_index != input_h.n:
        raise DimensionMismatchError(
            f"reduced operator on {reduced.n} qubits does not extend input on {input_h.n}"
        )
    dense = to_dense(reduced)
    nb = 1 << input_h.n
    coupling = float(np.max(np.abs(dense[:nb, nb:]))) if nb else 0.0
    if coupling > config.STRUCT_TOL:
        raise DimensionMismatchError(
            f"ancilla blocks are coupled (max |off-block| = {coupling:.3e})"
        )
    zero_block = np.linalg.eigvalsh(dense[:nb, :nb])
    one_block = np.linalg.eigvalsh(dense[nb:, nb:])
    return zero_block, one_block
