"""Adaptive-to-parallel query conversion for bounded-query machines.

An adaptive machine is a deterministic decision procedure that, given the
answers received so far, either asks one more oracle query or halts with an
output. With at most ``q_max`` queries there are at most ``2**q_max`` answer
sequences, so the whole machine unrolls into a finite binary tree. Flattening
collects every query appearing in that tree, deduplicates by fingerprint
(one oracle would answer repeats identically), and produces a program that
can ask all of them in a single parallel batch: the batch answers select the
path the adaptive run would have taken, and the leaf output is returned.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Union

from . import config
from .errors import PathTooDeepError, TooManyInvalidError
from .promise_oracle import (
    AllNo,
    AllYes,
    AnswerPolicy,
    ExplicitPolicy,
    OracleLog,
    OracleQuery,
    SeededPolicy,
    answer,
)
from .spectrum import PromiseVerdict


@dataclass(frozen=True)
class NextQuery:
    query: OracleQuery


@dataclass(frozen=True)
class Halt:
    output: PromiseVerdict


StepOutcome = Union[NextQuery, Halt]


@dataclass(frozen=True)
class AdaptiveMachine:
    """Deterministic bounded-query procedure, described by its step function.

    ``step`` maps the tuple of answers received so far to either the next
    query or a halting output, and must halt on every answer sequence within
    ``q_max`` queries.
    """

    step: Callable[[tuple], StepOutcome]
    q_max: int


@dataclass(frozen=True)
class PathLeaf:
    output: PromiseVerdict


@dataclass(frozen=True)
class PathNode:
    query: OracleQuery
    yes: "PathNode | PathLeaf"
    no: "PathNode | PathLeaf"


def enumerate_paths(m: AdaptiveMachine):
    """Unroll the machine into its full answer tree.

    Internal nodes hold queries, leaves hold outputs. Raises
    PathTooDeepError if some prefix wants a query past ``q_max`` or if
    ``q_max`` exceeds the global depth guard.
    """
    if m.q_max > config.Q_MAX_LIMIT:
        raise PathTooDeepError(
            f"q_max={m.q_max} exceeds the tree guard {config.Q_MAX_LIMIT}"
        )

    def build(prefix):
        outcome = m.step(tuple(prefix))
        if isinstance(outcome, Halt):
            return PathLeaf(outcome.output)
        if not isinstance(outcome, NextQuery):
            raise TypeError(f"step must return NextQuery or Halt, got {outcome!r}")
        if len(prefix) >= m.q_max:
            raise PathTooDeepError(
                f"machine asks query #{len(prefix) + 1} but q_max={m.q_max}"
            )
        yes = build(prefix + [PromiseVerdict.YES])
        no = build(prefix + [PromiseVerdict.NO])
        return PathNode(outcome.query, yes, no)

    return build([])


def tree_stats(root) -> tuple:
    """(internal node count, leaf count, depth) of a path tree."""
    if isinstance(root, PathLeaf):
        return 0, 1, 0
    n_yes, l_yes, d_yes = tree_stats(root.yes)
    n_no, l_no, d_no = tree_stats(root.no)
    return n_yes + n_no + 1, l_yes + l_no, max(d_yes, d_no) + 1


@dataclass(frozen=True)
class NonAdaptiveProgram:
    """Parallel-query form: deduplicated queries plus the answer table.

    Table keys are the relevant coordinates of a path in first-asked order,
    as ``((query_index, answer), ...)`` pairs; values are outputs. Every
    reachable path appears; paths that would need one query answered two
    different ways are unreachable and excluded.
    """

    queries: tuple
    table: dict
    root: "PathNode | PathLeaf"
    depth: int


def flatten(m: AdaptiveMachine) -> NonAdaptiveProgram:
    """Collect and deduplicate the machine's possible queries, with the
    output table over their answers."""
    root = enumerate_paths(m)
    _, _, depth = tree_stats(root)

    order: dict[str, int] = {}
    queries: list[OracleQuery] = []

    def collect(node):
        if isinstance(node, PathLeaf):
            return
        fp = node.query.fingerprint
        if fp not in order:
            order[fp] = len(queries)
            queries.append(node.query)
        collect(node.yes)
        collect(node.no)

    collect(root)

    table: dict[tuple, PromiseVerdict] = {}

    def tabulate(node, assignment, key):
        if isinstance(node, PathLeaf):
            table[tuple(key)] = node.output
            return
        idx = order[node.query.fingerprint]
        if idx in assignment:
            child = node.yes if assignment[idx] is PromiseVerdict.YES else node.no
            tabulate(child, assignment, key)
            return
        for verdict, child in (
            (PromiseVerdict.YES, node.yes),
            (PromiseVerdict.NO, node.no),
        ):
            tabulate(child, {**assignment, idx: verdict}, key + [(idx, verdict)])

    tabulate(root, {}, [])
    return NonAdaptiveProgram(tuple(queries), table, root, depth)


def run_adaptive(
    m: AdaptiveMachine, policy: AnswerPolicy, log: Optional[OracleLog] = None
) -> PromiseVerdict:
    """Execute the machine against the oracle, answers fed back one at a time."""
    answers: list[PromiseVerdict] = []
    while True:
        outcome = m.step(tuple(answers))
        if isinstance(outcome, Halt):
            return outcome.output
        if len(answers) >= m.q_max:
            raise PathTooDeepError(
                f"machine asks query #{len(answers) + 1} but q_max={m.q_max}"
            )
        answers.append(answer(outcome.query, policy, log))


def run_nonadaptive(
    p: NonAdaptiveProgram, policy: AnswerPolicy, log: Optional[OracleLog] = None
) -> PromiseVerdict:
    """Answer every deduplicated query in one batch, then read off the path.

    No query depends on another's answer; the batch happens before any path
    selection. The result equals the adaptive run under the same policy,
    because a policy is a fixed function of the query fingerprint.
    """
    batch = {
        q.fingerprint: answer(q, policy, log) for q in p.queries
    }
    node = p.root
    while isinstance(node, PathNode):
        ans = batch[node.query.fingerprint]
        node = node.yes if ans is PromiseVerdict.YES else node.no
    return node.output


def replay_machine(p: NonAdaptiveProgram) -> AdaptiveMachine:
    """An adaptive machine that walks the program's tree; flattening it
    reproduces the same deduplicated query set."""

    def step(prefix):
        node = p.root
        for ans in prefix:
            node = node.yes if ans is PromiseVerdict.YES else node.no
        if isinstance(node, PathLeaf):
            return Halt(node.output)
        return NextQuery(node.query)

    return AdaptiveMachine(step=step, q_max=p.depth)


def echo_machine(query: OracleQuery) -> AdaptiveMachine:
    """One query, and its raw answer becomes the output.

    Deliberately violates the same-answer-under-every-adversary contract
    whenever the query is invalid; used to exercise robustness checking.
    """

    def step(prefix):
        if not prefix:
            return NextQuery(query)
        return Halt(prefix[0])

    return AdaptiveMachine(step=step, q_max=1)


@dataclass(frozen=True)
class RobustnessReport:
    """Whether the machine's output is adversary-independent.

    When it is not, ``witness`` carries two policies whose adaptive runs
    disagree, replayable with ``run_adaptive``.
    """

    invariant_holds: bool
    witness: Optional[tuple] = None
    policies_checked: int = 0
    exhaustive: bool = True


def check_robustness(m: AdaptiveMachine, cap: int = config.ADVERSARY_CAP) -> RobustnessReport:
    """Compare the machine's output across every adversary assignment.

    Valid queries have forced answers, so only invalid queries branch: the
    walk covers each consistent run exactly once, which is equivalent to
    enumerating all ``2**k`` policies over the ``k`` invalid queries the
    machine can encounter (policies differing only on never-asked queries
    cannot change the run). Raises TooManyInvalidError when ``k`` exceeds
    the cap; use ``check_robustness_sampled`` then.
    """
    outcomes: list[tuple[dict, PromiseVerdict]] = []
    invalid_seen: set[str] = set()

    def advance(assignment):
        # Adaptive replay under a partial assignment; stops at the first
        # invalid query the assignment does not cover yet.
        answers: list[PromiseVerdict] = []
        while True:
            outcome = m.step(tuple(answers))
            if isinstance(outcome, Halt):
                return None, outcome.output
            if len(answers) >= m.q_max:
                raise PathTooDeepError(
                    f"machine asks query #{len(answers) + 1} but q_max={m.q_max}"
                )
            q = outcome.query
            truth = q.truth()
            if truth is not PromiseVerdict.INVALID:
                answers.append(truth)
            elif q.fingerprint in assignment:
                answers.append(assignment[q.fingerprint])
            else:
                return q.fingerprint, None

    def walk(assignment):
        fp, output = advance(assignment)
        if fp is None:
            outcomes.append((assignment, output))
            return
        invalid_seen.add(fp)
        if len(invalid_seen) > cap:
            raise TooManyInvalidError(
                f"more than {cap} distinct invalid queries; sample instead"
            )
        for verdict in (PromiseVerdict.YES, PromiseVerdict.NO):
            walk({**assignment, fp: verdict})

    walk({})
    base_assignment, base_output = outcomes[0]
    for assignment, output in outcomes[1:]:
        if output is not base_output:
            return RobustnessReport(
                invariant_holds=False,
                witness=(ExplicitPolicy(base_assignment), ExplicitPolicy(assignment)),
                policies_checked=len(outcomes),
                exhaustive=True,
            )
    return RobustnessReport(
        invariant_holds=True, policies_checked=len(outcomes), exhaustive=True
    )


def check_robustness_sampled(
    m: AdaptiveMachine, count: int = config.ADVERSARY_SAMPLES, seed: int = 0
) -> RobustnessReport:
    """Sampled fallback past the exhaustive cap: replay under ``count``
    seeded policies (plus the two constant ones) and compare outputs."""
    policies: list[AnswerPolicy] = [AllYes(), AllNo()]
    policies += [SeededPolicy(seed * 1_000_003 + i) for i in range(count)]
    base_policy = policies[0]
    base_output = run_adaptive(m, base_policy)
    for policy in policies[1:]:
        output = run_adaptive(m, policy)
        if output is not base_output:
            return RobustnessReport(
                invariant_holds=False,
                witness=(base_policy, policy),
                policies_checked=len(policies),
                exhaustive=False,
            )
    return RobustnessReport(
        invariant_holds=True, policies_checked=len(policies), exhaustive=False
    )
