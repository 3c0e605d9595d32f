"""Promise-robust binary search over oracle answers.

Each probe of the search asks the oracle about a deliberately slackened
interval around the midpoint: thresholds ``(mid - gamma, mid + gamma)``.
That slack is what makes adversarial answers harmless. A YES answer is
either truthful (value <= mid - gamma) or a lie on an invalid query (value
strictly inside the slack window); both imply value <= mid + gamma. A NO
answer symmetrically implies value >= mid - gamma. So whichever way an
invalid query is answered, the halved-and-widened interval still contains
the target, and the window shrinks geometrically as long as
``gamma < eps / 4``.

Deciding a spectral-gap instance combines two such searches (smallest and
second-smallest eigenvalue) and compares the conservative gap estimate,
``upper(lambda_2) - lower(lambda_1)``, against the NO threshold. With
``eps <= (b - a) / 4`` this classifies every promise-satisfying instance
correctly under every adversary.
"""

from dataclasses import dataclass
import math

from . import config
from .errors import ConfigTooCoarseError, NonConvergenceError, TooManyInvalidError
from .hamiltonian import Hamiltonian, SpectralGapInstance
from .promise_oracle import (
    AnswerPolicy,
    ExplicitPolicy,
    OracleLog,
    OracleQuery,
    QueryKind,
    answer,
)
from .spectrum import PromiseVerdict


@dataclass(frozen=True)
class SearchConfig:
    """Search window [lo, hi], target width eps, and probe slack gamma."""

    lo: float
    hi: float
    eps: float
    gamma: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"need hi > lo, got [{self.lo}, {self.hi}]")
        if not self.eps > 0:
            raise ValueError(f"need eps > 0, got {self.eps}")
        if not 0 < self.gamma < self.eps / 4:
            raise ValueError(
                f"need 0 < gamma < eps/4 for guaranteed shrinkage, got gamma={self.gamma}, eps={self.eps}"
            )


def make_search_config(lo: float, hi: float, eps: float, gamma: float | None = None) -> SearchConfig:
    """SearchConfig with the default slack ``gamma = eps / 8``."""
    return SearchConfig(lo, hi, eps, eps / 8 if gamma is None else gamma)


def default_search_config(inst: SpectralGapInstance, eps: float) -> SearchConfig:
    """Universal bounds for norm-convention instances: eigenvalues lie in
    [0, m] for m terms of norm at most 1."""
    m = len(inst.hamiltonian.terms)
    return make_search_config(0.0, float(max(1, m)), eps)


def query_budget(cfg: SearchConfig) -> int:
    """Worst-case probes for one search: ceil(log2(range / (eps - 2 gamma))) + 1."""
    ratio = (cfg.hi - cfg.lo) / (cfg.eps - 2.0 * cfg.gamma)
    return max(0, math.ceil(math.log2(ratio))) + 1


@dataclass
class SearchResult:
    """Final interval (contains the target under every adversary), probe count,
    and the oracle transcript."""

    interval: tuple
    queries_used: int
    transcript: OracleLog


@dataclass
class GapDecision:
    """Outcome of the two-search gap decision."""

    verdict: PromiseVerdict
    lambda1: tuple
    lambda2: tuple
    gap_upper_estimate: float
    queries_used: int
    transcript: OracleLog


def _run_search(h: Hamiltonian, c: int, cfg: SearchConfig, answer_fn):
    """Drive one slackened binary search; ``answer_fn`` maps a query to YES/NO."""
    lower, upper = cfg.lo, cfg.hi
    budget = query_budget(cfg)
    used = 0
    kind = QueryKind.GROUND_ENERGY if c == 1 else QueryKind.EXCITED_ENERGY
    while upper - lower > cfg.eps:
        if used >= budget:
            raise NonConvergenceError(
                f"interval [{lower}, {upper}] still wider than {cfg.eps} after {used} probes"
            )
        mid = 0.5 * (lower + upper)
        q = OracleQuery(kind, h, mid - cfg.gamma, mid + cfg.gamma, c=c)
        ans = answer_fn(q)
        used += 1
        if ans is PromiseVerdict.YES:
            upper = mid + cfg.gamma
        else:
            lower = mid - cfg.gamma
    return (lower, upper), used


def robust_search_lambda(
    h: Hamiltonian, c: int, cfg: SearchConfig, policy: AnswerPolicy
) -> SearchResult:
    """Locate the c-th smallest eigenvalue to width ``eps``.

    The caller guarantees the eigenvalue lies in [lo, hi]; for instances
    under the norm convention, lo=0 and hi=term count always work. The
    returned interval contains the eigenvalue no matter how the policy
    answers invalid queries.
    """
    log = OracleLog()
    interval, used = _run_search(h, c, cfg, lambda q: answer(q, policy, log))
    return SearchResult(interval, used, log)


def decide_gap_via_oracle(
    inst: SpectralGapInstance, cfg: SearchConfig, policy: AnswerPolicy
) -> GapDecision:
    """Decide a spectral-gap instance with two eigenvalue searches.

    Requires ``eps <= (b - a) / 4``; on promise-satisfying instances the
    verdict then equals the ground truth for every adversary policy, using
    at most ``2 * query_budget(cfg)`` oracle probes.
    """
    if cfg.eps > (inst.b - inst.a) / 4.0:
        raise ConfigTooCoarseError(
            f"eps={cfg.eps} exceeds (b - a)/4 = {(inst.b - inst.a) / 4.0}"
        )
    log = OracleLog()
    answer_fn = lambda q: answer(q, policy, log)
    (l1, u1), used1 = _run_search(inst.hamiltonian, 1, cfg, answer_fn)
    (l2, u2), used2 = _run_search(inst.hamiltonian, 2, cfg, answer_fn)
    estimate = u2 - l1
    verdict = PromiseVerdict.YES if estimate < inst.b else PromiseVerdict.NO
    return GapDecision(
        verdict=verdict,
        lambda1=(l1, u1),
        lambda2=(l2, u2),
        gap_upper_estimate=estimate,
        queries_used=used1 + used2,
        transcript=log,
    )


@dataclass
class SearchOutcome:
    """One adversary-consistent way a search can end."""

    interval: tuple
    queries_used: int
    policy: ExplicitPolicy


def explore_search_outcomes(
    h: Hamiltonian, c: int, cfg: SearchConfig, leaf_cap: int = 1 << config.ADVERSARY_CAP
) -> list:
    """Every outcome of ``robust_search_lambda`` over all adversary policies.

    Walks the search's decision tree, branching only where the probe is
    invalid (valid probes have forced answers). Each leaf records the final
    interval and the explicit policy that reaches it; replaying the search
    under that policy reproduces the leaf. Raises TooManyInvalidError if the
    tree has more than ``leaf_cap`` leaves.
    """
    outcomes = []

    def replay(answers):
        # Re-run the deterministic search, feeding recorded answers; returns
        # either the next unanswered query or the finished result.
        pending = {"query": None}
        idx = {"i": 0}

        def supply(q):
            i = idx["i"]
            if i >= len(answers):
                pending["query"] = q
                raise _NeedAnswer()
            idx["i"] += 1
            return answers[i]

        try:
            interval, used = _run_search(h, c, cfg, supply)
        except _NeedAnswer:
            return pending["query"], None
        return None, (interval, used)

    def walk(answers, assignment):
        query, done = replay(answers)
        if done is not None:
            interval, used = done
            outcomes.append(SearchOutcome(interval, used, ExplicitPolicy(assignment)))
            return
        truth = query.truth()
        if truth is not PromiseVerdict.INVALID:
            walk(answers + [truth], assignment)
            return
        fp = query.fingerprint
        if fp in assignment:
            walk(answers + [assignment[fp]], assignment)
            return
        for choice in (PromiseVerdict.YES, PromiseVerdict.NO):
            if len(outcomes) >= leaf_cap:
                raise TooManyInvalidError(
                    f"adversary tree exceeds {leaf_cap} outcomes"
                )
            walk(answers + [choice], {**assignment, fp: choice})

    walk([], {})
    return outcomes


class _NeedAnswer(Exception):
    pass


def rounds_config(lo: float, hi: float, rounds: int) -> SearchConfig:
    """A SearchConfig whose search takes exactly ``rounds`` probes.

    The probe count of a slackened search is answer-independent (the window
    always shrinks to ``width/2 + gamma``), so picking eps from the round
    count yields a full binary answer tree of that depth.
    """
    if rounds < 1:
        raise ValueError(f"need at least one round, got {rounds}")
    eps = (hi - lo) / (0.75 * 2.0**rounds)
    return make_search_config(lo, hi, eps)


def single_search_machine(h: Hamiltonian, c: int, cfg: SearchConfig, threshold: float):
    """One eigenvalue search as an adaptive machine.

    Halts YES when the final interval's upper end is below ``threshold``.
    Every path asks the same number of queries, so the answer tree is a full
    binary tree.
    """
    from .query_flatten import AdaptiveMachine, Halt, NextQuery

    def step(prefix):
        idx = {"i": 0}

        def supply(q):
            i = idx["i"]
            if i >= len(prefix):
                raise _NeedAnswer(q)
            idx["i"] += 1
            return prefix[i]

        try:
            (_, upper), _ = _run_search(h, c, cfg, supply)
        except _NeedAnswer as need:
            return NextQuery(need.args[0])
        return Halt(PromiseVerdict.YES if upper < threshold else PromiseVerdict.NO)

    return AdaptiveMachine(step=step, q_max=query_budget(cfg))


def adaptive_gap_decider(inst: SpectralGapInstance, cfg: SearchConfig):
    """The two-search gap decision as an adaptive machine.

    The step function re-simulates the deterministic decision procedure on
    the given answer prefix: when the prefix runs out it reports the next
    query, and once both searches finish it halts with the verdict.
    """
    from .query_flatten import AdaptiveMachine, Halt, NextQuery

    if cfg.eps > (inst.b - inst.a) / 4.0:
        raise ConfigTooCoarseError(
            f"eps={cfg.eps} exceeds (b - a)/4 = {(inst.b - inst.a) / 4.0}"
        )

    def step(prefix):
        idx = {"i": 0}

        def supply(q):
            i = idx["i"]
            if i >= len(prefix):
                raise _NeedAnswer(q)
            idx["i"] += 1
            return prefix[i]

        try:
            (l1, _), _ = _run_search(inst.hamiltonian, 1, cfg, supply)
            (_, u2), _ = _run_search(inst.hamiltonian, 2, cfg, supply)
        except _NeedAnswer as need:
            return NextQuery(need.args[0])
        estimate = u2 - l1
        verdict = PromiseVerdict.YES if estimate < inst.b else PromiseVerdict.NO
        return Halt(verdict)

    return AdaptiveMachine(step=step, q_max=2 * query_budget(cfg))
