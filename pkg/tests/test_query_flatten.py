import numpy as np
import pytest

from gapforge import (
    AdaptiveMachine,
    AllNo,
    AllYes,
    Halt,
    NextQuery,
    OracleQuery,
    PathTooDeepError,
    PromiseVerdict,
    QueryKind,
    SeededPolicy,
    adaptive_gap_decider,
    assemble,
    check_robustness,
    check_robustness_sampled,
    decide_gap_via_oracle,
    default_search_config,
    echo_machine,
    enumerate_adversaries,
    enumerate_paths,
    flatten,
    make_local_term,
    random_instance,
    reduce_klh_to_gap,
    replay_machine,
    rounds_config,
    run_adaptive,
    run_nonadaptive,
    single_search_machine,
    tree_stats,
)
from gapforge.hamiltonian import KlhInstance, SpectralGapInstance
from gapforge.reduction import ReductionVariant

YES, NO = PromiseVerdict.YES, PromiseVerdict.NO


def query_with_lambda1(value, n=2, a=1 / 3, b=2 / 3):
    diag = np.diag(np.concatenate([[value], np.ones((1 << n) - 1)]))
    h = assemble(n, [make_local_term(list(range(n)), diag)])
    return OracleQuery(QueryKind.GROUND_ENERGY, h, a, b)


def constant_machine(output):
    return AdaptiveMachine(step=lambda prefix: Halt(output), q_max=0)


def two_query_machine(qa, qb):
    """Asks qa then qb on every path; output is the AND of YES answers."""

    def step(prefix):
        if len(prefix) == 0:
            return NextQuery(qa)
        if len(prefix) == 1:
            return NextQuery(qb)
        return Halt(YES if all(p is YES for p in prefix) else NO)

    return AdaptiveMachine(step=step, q_max=2)


def same_query_twice_machine(q):
    def step(prefix):
        if len(prefix) < 2:
            return NextQuery(q)
        return Halt(prefix[1])

    return AdaptiveMachine(step=step, q_max=2)


class TestEnumeratePaths:
    def test_immediate_halt_single_leaf(self):
        root = enumerate_paths(constant_machine(YES))
        internal, leaves, depth = tree_stats(root)
        assert (internal, leaves, depth) == (0, 1, 0)

    def test_two_query_machine_full_tree(self):
        m = two_query_machine(query_with_lambda1(0.1), query_with_lambda1(0.9))
        internal, leaves, depth = tree_stats(enumerate_paths(m))
        assert (internal, leaves, depth) == (3, 4, 2)

    def test_four_round_search_machine_has_fifteen_nodes(self):
        h = random_instance(3, 2, 5, seed=2)
        machine = single_search_machine(h, 1, rounds_config(0.0, 5.0, 4), 2 / 3)
        internal, leaves, _ = tree_stats(enumerate_paths(machine))
        assert internal == 15
        assert leaves == 16

    def test_overdeep_machine_rejected(self):
        q = query_with_lambda1(0.5)
        never_halts = AdaptiveMachine(step=lambda prefix: NextQuery(q), q_max=3)
        with pytest.raises(PathTooDeepError):
            enumerate_paths(never_halts)

    def test_qmax_guard(self):
        with pytest.raises(PathTooDeepError):
            enumerate_paths(AdaptiveMachine(step=lambda p: Halt(YES), q_max=21))


class TestFlatten:
    def test_constant_machine_empty_queries(self):
        program = flatten(constant_machine(NO))
        assert program.queries == ()
        assert program.table == {(): NO}

    def test_same_query_deduplicates_to_one(self):
        q = query_with_lambda1(0.5)
        program = flatten(same_query_twice_machine(q))
        assert len(program.queries) == 1
        # one relevant coordinate, two reachable paths
        assert len(program.table) == 2

    def test_dedup_bound(self):
        h = random_instance(3, 2, 5, seed=3)
        for rounds in (1, 2, 3, 4):
            machine = single_search_machine(h, 1, rounds_config(0.0, 5.0, rounds), 2 / 3)
            program = flatten(machine)
            assert len(program.queries) <= 2**rounds - 1

    def test_replay_agreement_under_truthful_oracle(self):
        h = random_instance(3, 2, 5, seed=4)
        machine = single_search_machine(h, 1, rounds_config(0.0, 5.0, 4), 2 / 3)
        program = flatten(machine)
        for policy in (AllYes(), AllNo(), SeededPolicy(7)):
            assert run_nonadaptive(program, policy) is run_adaptive(machine, policy)

    def test_flattening_is_idempotent_on_query_set(self):
        q = query_with_lambda1(0.5)
        machine = two_query_machine(q, query_with_lambda1(0.45))
        program = flatten(machine)
        again = flatten(replay_machine(program))
        assert [x.fingerprint for x in again.queries] == [x.fingerprint for x in program.queries]


class TestRunNonAdaptive:
    def test_constant_output_for_any_policy(self):
        program = flatten(constant_machine(YES))
        for policy in (AllYes(), AllNo(), SeededPolicy(0)):
            assert run_nonadaptive(program, policy) is YES

    def test_batch_answers_all_queries(self):
        from gapforge import OracleLog

        qa, qb = query_with_lambda1(0.1), query_with_lambda1(0.9)
        program = flatten(two_query_machine(qa, qb))
        log = OracleLog()
        run_nonadaptive(program, AllYes(), log)
        assert len(log) == len(program.queries) == 2

    @pytest.mark.parametrize("seed", [5, 6])
    def test_exhaustive_policy_agreement_with_adaptive(self, seed):
        qa = query_with_lambda1(0.5)
        qb = query_with_lambda1(0.55)

        def step(prefix):
            if not prefix:
                return NextQuery(qa)
            if prefix[0] is YES:
                return Halt(YES)
            if len(prefix) == 1:
                return NextQuery(qb)
            return Halt(prefix[1])

        machine = AdaptiveMachine(step=step, q_max=2)
        program = flatten(machine)
        for policy in enumerate_adversaries(program.queries):
            assert run_nonadaptive(program, policy) is run_adaptive(machine, policy)


class TestCheckRobustness:
    def test_all_valid_machine_trivially_robust(self):
        m = two_query_machine(query_with_lambda1(0.1), query_with_lambda1(0.9))
        report = check_robustness(m)
        assert report.invariant_holds
        assert report.policies_checked == 1

    def test_echo_of_invalid_query_flagged_with_witness(self):
        q = query_with_lambda1(0.5)
        report = check_robustness(echo_machine(q))
        assert not report.invariant_holds
        assert report.witness is not None
        pol_a, pol_b = report.witness
        out_a = run_adaptive(echo_machine(q), pol_a)
        out_b = run_adaptive(echo_machine(q), pol_b)
        assert out_a is not out_b

    def test_gap_decider_is_robust_on_promise_instance(self):
        source = KlhInstance(random_instance(3, 2, 6, seed=8).scaled(0.2), 1 / 3, 2 / 3)
        out = reduce_klh_to_gap(source, ReductionVariant.HAMMING_PENALTY)
        cfg = default_search_config(out.instance, 1 / 12)
        machine = adaptive_gap_decider(out.instance, cfg)
        report = check_robustness(machine)
        assert report.invariant_holds
        truth = decide_gap_via_oracle(out.instance, cfg, AllYes()).verdict
        assert run_adaptive(machine, AllNo()) is truth

    def test_sampled_variant_matches_exhaustive_on_echo(self):
        q = query_with_lambda1(0.5)
        report = check_robustness_sampled(echo_machine(q), count=8, seed=1)
        assert not report.invariant_holds
        assert not report.exhaustive

    def test_adaptive_machine_agrees_with_direct_decision(self):
        source = KlhInstance(random_instance(3, 2, 6, seed=9).scaled(0.9), 1 / 3, 2 / 3)
        out = reduce_klh_to_gap(source, ReductionVariant.GLOBAL_PROJECTOR)
        cfg = default_search_config(out.instance, 1 / 12)
        machine = adaptive_gap_decider(out.instance, cfg)
        for policy in (AllYes(), AllNo(), SeededPolicy(11)):
            direct = decide_gap_via_oracle(out.instance, cfg, policy).verdict
            assert run_adaptive(machine, policy) is direct
