import numpy as np
import pytest

from gapforge import (
    InvalidInputError,
    KlhInstance,
    PromiseVerdict,
    ReductionVariant,
    assemble,
    block_spectrum,
    decide_gap_truth,
    decide_klh_truth,
    eigenvalues,
    lambda_c,
    make_local_term,
    predicted_gap,
    random_instance,
    reduce_klh_to_gap,
    spectral_gap,
    to_dense,
)
from gapforge.errors import DimensionMismatchError

P1 = np.array([[0, 0], [0, 1]], dtype=complex)
VARIANTS = list(ReductionVariant)


def seeded_instance(n=4, seed=7, scale=1.0):
    h = random_instance(n, 2, 2 * n, seed=seed)
    return KlhInstance(h.scaled(scale) if scale != 1.0 else h, 1 / 3, 2 / 3)


class TestConstruction:
    def test_zero_input_single_qubit_spectrum(self):
        inst = KlhInstance(assemble(1, []), 1 / 3, 2 / 3)
        out = reduce_klh_to_gap(inst, ReductionVariant.GLOBAL_PROJECTOR)
        spec = eigenvalues(out.instance.hamiltonian).eigenvalues
        assert np.allclose(spec, [0, 0, 0, 1])
        assert decide_gap_truth(out.instance) is PromiseVerdict.YES

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_identity_input_gives_gap_one(self, variant):
        h = assemble(1, [make_local_term([0], np.eye(2))])
        inst = KlhInstance(h, 1 / 3, 2 / 3)
        out = reduce_klh_to_gap(inst, variant)
        assert spectral_gap(out.instance.hamiltonian) == pytest.approx(1.0, abs=1e-9)
        assert decide_gap_truth(out.instance) is PromiseVerdict.NO

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_output_shape(self, variant):
        inst = seeded_instance()
        out = reduce_klh_to_gap(inst, variant)
        assert out.instance.hamiltonian.n == inst.hamiltonian.n + 1
        assert out.ancilla_index == inst.hamiltonian.n
        assert out.null_state_index == 0
        assert out.instance.a == inst.a
        assert out.instance.b == inst.b

    def test_locality(self):
        inst = seeded_instance(n=4)
        hamming = reduce_klh_to_gap(inst, ReductionVariant.HAMMING_PENALTY)
        assert hamming.instance.hamiltonian.k == 3
        literal = reduce_klh_to_gap(inst, ReductionVariant.GLOBAL_PROJECTOR)
        assert literal.instance.hamiltonian.k == 5

    def test_nullstate_has_zero_energy(self):
        inst = seeded_instance()
        for variant in VARIANTS:
            out = reduce_klh_to_gap(inst, variant)
            dense = to_dense(out.instance.hamiltonian)
            assert abs(dense[out.null_state_index, out.null_state_index]) <= 1e-10

    def test_non_psd_input_rejected(self):
        h = assemble(1, [make_local_term([0], -P1)])
        with pytest.raises(InvalidInputError):
            reduce_klh_to_gap(KlhInstance(h, 1 / 3, 2 / 3), ReductionVariant.HAMMING_PENALTY)

    def test_threshold_above_one_warns(self):
        inst = KlhInstance(assemble(1, [make_local_term([0], P1)]), 0.9, 1.2)
        with pytest.warns(UserWarning):
            reduce_klh_to_gap(inst, ReductionVariant.HAMMING_PENALTY)


class TestSpectralIdentities:
    @pytest.mark.parametrize("variant", VARIANTS)
    @pytest.mark.parametrize("seed", [7, 8, 9])
    def test_gap_equals_min_lambda1_one(self, variant, seed):
        inst = seeded_instance(seed=seed)
        lam1 = lambda_c(inst.hamiltonian, 1)
        out = reduce_klh_to_gap(inst, variant)
        assert spectral_gap(out.instance.hamiltonian) == pytest.approx(
            min(lam1, 1.0), abs=1e-8
        )

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_reduced_ground_energy_is_zero(self, variant):
        inst = seeded_instance(seed=11)
        out = reduce_klh_to_gap(inst, variant)
        assert abs(lambda_c(out.instance.hamiltonian, 1)) <= 1e-9

    def test_variants_agree(self):
        inst = seeded_instance(seed=12)
        gaps = [
            spectral_gap(reduce_klh_to_gap(inst, v).instance.hamiltonian)
            for v in VARIANTS
        ]
        assert gaps[0] == pytest.approx(gaps[1], abs=1e-8)

    def test_predicted_gap_on_capped_instance(self):
        inst = seeded_instance(seed=13)  # lambda1 > 1 for 8 unscaled terms
        assert lambda_c(inst.hamiltonian, 1) > 1
        with pytest.warns(UserWarning):
            assert predicted_gap(inst) == 1.0

    def test_predicted_gap_matches_reduction(self):
        inst = seeded_instance(seed=14, scale=0.1)
        out = reduce_klh_to_gap(inst, ReductionVariant.HAMMING_PENALTY)
        assert predicted_gap(inst) == pytest.approx(
            spectral_gap(out.instance.hamiltonian), abs=1e-8
        )

    def test_predicted_gap_zero_input(self):
        assert predicted_gap(KlhInstance(assemble(2, []), 1 / 3, 2 / 3)) == 0.0


class TestBlockSpectrum:
    def test_single_qubit_zero_input_global(self):
        inst = KlhInstance(assemble(1, []), 1 / 3, 2 / 3)
        out = reduce_klh_to_gap(inst, ReductionVariant.GLOBAL_PROJECTOR)
        zero_block, one_block = block_spectrum(out, inst.hamiltonian)
        assert np.allclose(zero_block, [0, 1])
        assert np.allclose(one_block, [0, 0])

    def test_two_qubit_zero_input_hamming_counts_ones(self):
        inst = KlhInstance(assemble(2, []), 1 / 3, 2 / 3)
        out = reduce_klh_to_gap(inst, ReductionVariant.HAMMING_PENALTY)
        zero_block, _ = block_spectrum(out, inst.hamiltonian)
        assert np.allclose(np.sort(zero_block), [0, 1, 1, 2])

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_blocks_partition_the_spectrum(self, variant):
        inst = seeded_instance(seed=15)
        out = reduce_klh_to_gap(inst, variant)
        zero_block, one_block = block_spectrum(out, inst.hamiltonian)
        merged = np.sort(np.concatenate([zero_block, one_block]))
        full = eigenvalues(out.instance.hamiltonian).eigenvalues
        assert np.max(np.abs(merged - full)) <= 1e-8

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_one_block_reproduces_input_spectrum(self, variant):
        inst = seeded_instance(seed=16)
        out = reduce_klh_to_gap(inst, variant)
        _, one_block = block_spectrum(out, inst.hamiltonian)
        assert np.max(np.abs(one_block - eigenvalues(inst.hamiltonian).eigenvalues)) <= 1e-8

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_zero_block_structure(self, variant):
        inst = seeded_instance(seed=17)
        out = reduce_klh_to_gap(inst, variant)
        zero_block, _ = block_spectrum(out, inst.hamiltonian)
        zero_sorted = np.sort(zero_block)
        assert zero_sorted[0] <= 1e-10
        assert np.all(zero_sorted[1:] >= 1 - 1e-10)

    def test_dimension_mismatch_rejected(self):
        inst = seeded_instance(seed=18)
        out = reduce_klh_to_gap(inst, ReductionVariant.HAMMING_PENALTY)
        with pytest.raises(DimensionMismatchError):
            block_spectrum(out, assemble(2, []))


class TestVerdictPreservation:
    @pytest.mark.parametrize("variant", VARIANTS)
    @pytest.mark.parametrize("scale,expected", [(0.05, PromiseVerdict.YES), (1.0, PromiseVerdict.NO)])
    def test_matches_source_verdict(self, variant, scale, expected):
        inst = seeded_instance(seed=19, scale=scale)
        source = decide_klh_truth(inst)
        assert source is expected
        out = reduce_klh_to_gap(inst, variant)
        assert decide_gap_truth(out.instance) is source

    def test_multiset_identity(self):
        inst = seeded_instance(seed=20, scale=0.4)
        out = reduce_klh_to_gap(inst, ReductionVariant.GLOBAL_PROJECTOR)
        zero_block, _ = block_spectrum(out, inst.hamiltonian)
        rebuilt = np.sort(
            np.concatenate(
                [[0.0], np.sort(zero_block)[1:], eigenvalues(inst.hamiltonian).eigenvalues]
            )
        )
        full = eigenvalues(out.instance.hamiltonian).eigenvalues
        assert np.max(np.abs(rebuilt - full)) <= 1e-8
