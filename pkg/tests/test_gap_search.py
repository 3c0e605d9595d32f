import numpy as np
import pytest

from gapforge import (
    AllNo,
    AllYes,
    ConfigTooCoarseError,
    KlhInstance,
    PromiseVerdict,
    SearchConfig,
    SeededPolicy,
    SpectralGapInstance,
    assemble,
    decide_gap_truth,
    decide_gap_via_oracle,
    decide_klh_truth,
    default_search_config,
    explore_search_outcomes,
    lambda_c,
    make_local_term,
    make_search_config,
    query_budget,
    random_instance,
    reduce_klh_to_gap,
    robust_search_lambda,
    rounds_config,
)
from gapforge.reduction import ReductionVariant

P1 = np.array([[0, 0], [0, 1]], dtype=complex)
POLICIES = [AllYes(), AllNo(), SeededPolicy(1), SeededPolicy(2)]


def planted(value, n=2):
    """Diagonal instance with smallest eigenvalue exactly ``value``."""
    diag = np.diag(np.concatenate([[value], np.ones((1 << n) - 1)]))
    return assemble(n, [make_local_term(list(range(n)), diag)])


class TestSearchConfig:
    def test_gamma_must_leave_room(self):
        with pytest.raises(ValueError):
            SearchConfig(0, 1, eps=0.1, gamma=0.03)

    def test_default_gamma_is_eighth(self):
        cfg = make_search_config(0, 1, 0.08)
        assert cfg.gamma == pytest.approx(0.01)

    def test_bounds_must_be_ordered(self):
        with pytest.raises(ValueError):
            make_search_config(1, 1, 0.1)

    def test_universal_bounds_from_term_count(self):
        inst = SpectralGapInstance(random_instance(3, 2, 5, seed=0), 1 / 3, 2 / 3)
        cfg = default_search_config(inst, 0.05)
        assert cfg.lo == 0.0
        assert cfg.hi == 5.0

    def test_zero_term_instance_gets_unit_range(self):
        inst = SpectralGapInstance(assemble(2, []), 1 / 3, 2 / 3)
        assert default_search_config(inst, 0.05).hi == 1.0


class TestRobustSearch:
    def test_zero_hamiltonian_interval_contains_zero(self):
        res = robust_search_lambda(assemble(2, []), 1, make_search_config(0, 1, 0.1, 0.01), AllYes())
        lower, upper = res.interval
        assert lower <= 0 <= upper
        assert upper - lower <= 0.1

    @pytest.mark.parametrize("policy", POLICIES)
    def test_interval_always_contains_planted_value(self, policy):
        h = planted(0.5)
        cfg = make_search_config(0, 1, 0.05, 0.005)
        res = robust_search_lambda(h, 1, cfg, policy)
        assert res.interval[0] <= 0.5 <= res.interval[1]
        assert res.queries_used <= query_budget(cfg)

    def test_exhaustive_adversaries_on_planted_half(self):
        h = planted(0.5)
        cfg = make_search_config(0, 1, 0.05, 0.005)
        outcomes = explore_search_outcomes(h, 1, cfg)
        assert len(outcomes) >= 2  # the probe at 0.5 is invalid, so branches exist
        for outcome in outcomes:
            assert outcome.interval[0] <= 0.5 <= outcome.interval[1]
            assert outcome.queries_used <= query_budget(cfg)
            # replaying under the recorded policy reproduces the leaf
            replay = robust_search_lambda(h, 1, cfg, outcome.policy)
            assert replay.interval == outcome.interval

    def test_second_eigenvalue_search(self):
        h = random_instance(4, 2, 6, seed=7).scaled(0.3)
        lam2 = lambda_c(h, 2)
        cfg = make_search_config(0, 6 * 0.3 + 1, 0.02)
        for policy in (AllYes(), AllNo()):
            res = robust_search_lambda(h, 2, cfg, policy)
            assert res.interval[0] - 1e-12 <= lam2 <= res.interval[1] + 1e-12

    def test_transcript_determinism(self):
        h = planted(0.37)
        cfg = make_search_config(0, 1, 0.02)
        first = robust_search_lambda(h, 1, cfg, SeededPolicy(5))
        second = robust_search_lambda(h, 1, cfg, SeededPolicy(5))
        assert first.interval == second.interval
        assert first.transcript.to_jsonl() == second.transcript.to_jsonl()

    def test_width_reaches_target(self):
        h = planted(0.7, n=3)
        cfg = make_search_config(0, 1, 0.02)
        res = robust_search_lambda(h, 1, cfg, AllNo())
        assert res.interval[1] - res.interval[0] <= cfg.eps


class TestRoundsConfig:
    @pytest.mark.parametrize("rounds", [1, 2, 3, 4, 6])
    def test_probe_count_matches_requested_rounds(self, rounds):
        cfg = rounds_config(0.0, 1.0, rounds)
        res = robust_search_lambda(planted(0.31), 1, cfg, AllYes())
        assert res.queries_used == rounds


class TestDecideGapViaOracle:
    def test_eps_too_coarse_rejected(self):
        inst = SpectralGapInstance(assemble(2, []), 1 / 3, 2 / 3)
        with pytest.raises(ConfigTooCoarseError):
            decide_gap_via_oracle(inst, make_search_config(0, 1, 0.2), AllYes())

    @pytest.mark.parametrize("policy", POLICIES)
    def test_degenerate_instance_is_yes(self, policy):
        inst = SpectralGapInstance(assemble(2, []), 1 / 3, 2 / 3)
        cfg = default_search_config(inst, 1 / 12)
        assert decide_gap_via_oracle(inst, cfg, policy).verdict is PromiseVerdict.YES

    @pytest.mark.parametrize("policy", POLICIES)
    def test_two_projector_instance_is_no(self, policy):
        h = assemble(2, [make_local_term([0], P1), make_local_term([1], P1)])
        inst = SpectralGapInstance(h, 1 / 3, 2 / 3)
        cfg = default_search_config(inst, 1 / 12)
        decision = decide_gap_via_oracle(inst, cfg, policy)
        assert decision.verdict is PromiseVerdict.NO
        assert decision.queries_used <= 2 * query_budget(cfg)

    @pytest.mark.parametrize("seed", [3, 4, 5])
    @pytest.mark.parametrize("scale", [0.15, 1.0])
    def test_reduced_instance_matches_source_truth(self, seed, scale):
        source = KlhInstance(random_instance(3, 2, 6, seed=seed).scaled(scale), 1 / 3, 2 / 3)
        truth = decide_klh_truth(source)
        if truth is PromiseVerdict.INVALID:
            pytest.skip("off-promise draw")
        out = reduce_klh_to_gap(source, ReductionVariant.GLOBAL_PROJECTOR)
        cfg = default_search_config(out.instance, 1 / 12)
        for policy in POLICIES:
            decision = decide_gap_via_oracle(out.instance, cfg, policy)
            assert decision.verdict is truth
            assert decision.verdict is decide_gap_truth(out.instance)

    def test_intervals_bound_true_eigenvalues(self):
        h = random_instance(3, 2, 6, seed=6).scaled(0.5)
        inst = SpectralGapInstance(h, 1 / 3, 2 / 3)
        cfg = default_search_config(inst, 1 / 12)
        lam1, lam2 = lambda_c(h, 1), lambda_c(h, 2)
        for policy in POLICIES:
            decision = decide_gap_via_oracle(inst, cfg, policy)
            assert decision.lambda1[0] - 1e-12 <= lam1 <= decision.lambda1[1] + 1e-12
            assert decision.lambda2[0] - 1e-12 <= lam2 <= decision.lambda2[1] + 1e-12
            assert decision.gap_upper_estimate >= lam2 - lam1 - 1e-12
