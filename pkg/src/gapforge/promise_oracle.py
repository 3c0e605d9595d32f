"""Simulated promise-problem oracle with adversarial invalid-query semantics.

A query carries a Hamiltonian, thresholds ``a < b``, and a kind: ground
energy (lambda_1 vs thresholds), excited energy (lambda_c), or spectral gap.
The truth verdict is computed by exact diagonalization. Valid queries are
always answered truthfully; queries violating the promise (truth INVALID)
are answered by an adversary policy keyed on the query's content
fingerprint, so a policy behaves as one fixed oracle function: the same
invalid query always draws the same answer, regardless of when or how often
it is asked.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
import hashlib
import itertools
import json

import numpy as np

from . import config
from .errors import InvalidInputError, TooManyInvalidError
from .hamiltonian import Hamiltonian
from .spectrum import PromiseVerdict, eigenvalues


class QueryKind(Enum):
    GROUND_ENERGY = "ground-energy"
    EXCITED_ENERGY = "excited-energy"
    GAP = "gap"


@dataclass(frozen=True)
class OracleQuery:
    """One oracle question: a Hamiltonian, thresholds, and what to compare."""

    kind: QueryKind
    hamiltonian: Hamiltonian
    a: float
    b: float
    c: int = 1

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "c", int(self.c))
        if not self.b > self.a:
            raise InvalidInputError(f"query needs b > a, got a={self.a}, b={self.b}")
        if self.c < 1:
            raise InvalidInputError(f"eigenvalue order must be >= 1, got {self.c}")
        if self.kind is not QueryKind.EXCITED_ENERGY and self.c != 1:
            raise InvalidInputError(f"{self.kind.value} query does not take c={self.c}")

    @cached_property
    def fingerprint(self) -> str:
        # Ground-energy and excited-energy with c=1 are the same question,
        # so they share a fingerprint and adversaries answer them alike.
        if self.kind is QueryKind.GAP:
            tag = "gap"
        else:
            tag = f"lambda:{self.c}"
        payload = "|".join(
            (tag, self.hamiltonian.fingerprint, self.a.hex(), self.b.hex())
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def truth(self) -> PromiseVerdict:
        spec = eigenvalues(self.hamiltonian)
        if self.kind is QueryKind.GAP:
            value = spec.gap
        else:
            value = spec.lambda_c(self.c)
        if value <= self.a:
            return PromiseVerdict.YES
        if value >= self.b:
            return PromiseVerdict.NO
        return PromiseVerdict.INVALID


class AnswerPolicy:
    """How invalid queries are answered; valid queries never consult this."""

    def answer_invalid(self, fingerprint: str) -> PromiseVerdict:
        raise NotImplementedError

    def label(self) -> str:
        raise NotImplementedError


class AllYes(AnswerPolicy):
    def answer_invalid(self, fingerprint: str) -> PromiseVerdict:
        return PromiseVerdict.YES

    def label(self) -> str:
        return "all-yes"


class AllNo(AnswerPolicy):
    def answer_invalid(self, fingerprint: str) -> PromiseVerdict:
        return PromiseVerdict.NO

    def label(self) -> str:
        return "all-no"


class SeededPolicy(AnswerPolicy):
    """Pseudo-random but fixed: the answer is a hash of (seed, fingerprint)."""

    def __init__(self, seed: int):
        self.seed = int(seed)

    def answer_invalid(self, fingerprint: str) -> PromiseVerdict:
        digest = hashlib.sha256(f"{self.seed}|{fingerprint}".encode()).digest()
        return PromiseVerdict.YES if digest[0] & 1 else PromiseVerdict.NO

    def label(self) -> str:
        return f"seed:{self.seed}"


class ExplicitPolicy(AnswerPolicy):
    """Fixed assignment from query fingerprints to answers."""

    def __init__(self, assignment):
        self.assignment = dict(assignment)

    def answer_invalid(self, fingerprint: str) -> PromiseVerdict:
        try:
            return self.assignment[fingerprint]
        except KeyError:
            raise LookupError(
                f"explicit policy has no answer for invalid query {fingerprint[:12]}..."
            ) from None

    def label(self) -> str:
        bits = ",".join(
            f"{fp[:8]}={'Y' if v is PromiseVerdict.YES else 'N'}"
            for fp, v in sorted(self.assignment.items())
        )
        return f"explicit({bits})"


@dataclass(frozen=True)
class LogEntry:
    query: OracleQuery
    truth: PromiseVerdict
    emitted: PromiseVerdict


@dataclass
class OracleLog:
    """Ordered record of (query, truth, emitted answer) triples.

    Not safe to share across concurrent calls; give each search its own log.
    """

    entries: list = field(default_factory=list)

    def append(self, entry: LogEntry) -> None:
        assert entry.truth is PromiseVerdict.INVALID or entry.emitted is entry.truth
        self.entries.append(entry)

    def __len__(self) -> int:
        return len(self.entries)

    def invalid_count(self) -> int:
        return sum(1 for e in self.entries if e.truth is PromiseVerdict.INVALID)

    def to_jsonl(self) -> str:
        lines = []
        for e in self.entries:
            lines.append(
                json.dumps(
                    {
                        "kind": e.query.kind.value,
                        "c": e.query.c,
                        "a": e.query.a,
                        "b": e.query.b,
                        "hamiltonian": e.query.hamiltonian.fingerprint[:16],
                        "truth": e.truth.value,
                        "emitted": e.emitted.value,
                    },
                    sort_keys=True,
                )
            )
        return "\n".join(lines)


def answer(query: OracleQuery, policy: AnswerPolicy, log: OracleLog | None = None) -> PromiseVerdict:
    """Oracle response: the truth verdict when valid, else the policy's pick.

    Deterministic in (query, policy). Returns only YES or NO.
    """
    truth = query.truth()
    if truth is PromiseVerdict.INVALID:
        emitted = policy.answer_invalid(query.fingerprint)
    else:
        emitted = truth
    if log is not None:
        log.append(LogEntry(query, truth, emitted))
    return emitted


def _unique_invalid_fingerprints(queries) -> list:
    seen = set()
    invalid = []
    for q in queries:
        fp = q.fingerprint
        if fp in seen:
            continue
        seen.add(fp)
        if q.truth() is PromiseVerdict.INVALID:
            invalid.append(fp)
    return invalid


def enumerate_adversaries(queries, cap: int = config.ADVERSARY_CAP) -> list:
    """All explicit policies over the invalid queries in ``queries``.

    Queries are deduplicated by fingerprint first; the result has exactly
    ``2**k`` policies for ``k`` distinct invalid queries. Raises
    TooManyInvalidError past the cap; sample with ``sample_adversaries``
    instead.
    """
    invalid = _unique_invalid_fingerprints(queries)
    if len(invalid) > cap:
        raise TooManyInvalidError(
            f"{len(invalid)} invalid queries exceed the exhaustive cap of {cap}"
        )
    policies = []
    for combo in itertools.product((PromiseVerdict.NO, PromiseVerdict.YES), repeat=len(invalid)):
        policies.append(ExplicitPolicy(dict(zip(invalid, combo))))
    return policies


def sample_adversaries(queries, count: int = config.ADVERSARY_SAMPLES, seed: int = 0) -> list:
    """Seeded random sample of explicit policies, for use past the cap."""
    invalid = _unique_invalid_fingerprints(queries)
    rng = np.random.default_rng(seed)
    policies = []
    for _ in range(count):
        bits = rng.integers(0, 2, size=len(invalid))
        policies.append(
            ExplicitPolicy(
                {
                    fp: PromiseVerdict.YES if bit else PromiseVerdict.NO
                    for fp, bit in zip(invalid, bits)
                }
            )
        )
    return policies
