"""Top-level deciders: union-splitting, splitting, consistency, axiomatization problem.

``is_union_splitting`` dovetails two searches over finite objects:

* POS enumerates finite sets ``S`` of rooted cycle-free frames ordered by
  (total points, number of frames, canonical keys).  ``S`` is accepted once
  every frame in it refutes ``f`` and ``f`` is proved in ``K + S``; then
  ``K + f = K + S``.
* NEG enumerates frames ``c`` and accepts one that refutes ``f`` while every
  rooted cycle-free generated subframe of ``c`` validates ``f``; such a frame
  shows ``K + f`` is not a union-splitting.

Exactly one side can succeed, so with enough budget the answer is total.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

from .algebra import validates
from .formula import Formula
from .frame import (
    IRREFLEXIVE_POINT, REFLEXIVE_POINT, Frame, enumerate_frames,
    rooted_cycle_free_generated_subframes,
)
from .jankov import JankovAxiomSet, jankov_logic_equal
from .kprover import (
    Budget, Outcome, ProofCertificate, Verdict, _membership_steps,
    is_k_theorem, member_of_jankov_logic,
)


class BudgetExhausted(RuntimeError):
    """A search ran out of budget before reaching a verdict."""

    def __init__(self, message: str, verdict: Verdict | None = None):
        super().__init__(message)
        self.verdict = verdict


class UndecidableProblem(RuntimeError):
    """The axiomatization problem asked about is undecidable; no decision function exists."""


@dataclass
class UnionSplittingResult:
    verdict: Verdict
    axiomatization: JankovAxiomSet | None = None
    counterexample: Frame | None = None
    certificate: ProofCertificate | None = None
    cursor: dict | None = None

    @property
    def outcome(self) -> Outcome:
        return self.verdict.outcome


# ---------------------------------------------------------------- POS side

def _universe(max_size: int) -> list[Frame]:
    if max_size < 1:
        return []
    return list(enumerate_frames(max_size, "rootedCycleFree"))


def candidate_sets(max_frame_size: int) -> Iterator[tuple[Frame, ...]]:
    """Finite sets of rooted cycle-free frames in the POS well-order.

    Frames of a given size are only enumerated once the running point total
    reaches that size.
    """
    s = 0
    while True:
        universe = _universe(min(s, max_frame_size))
        sizes = [f.size for f in universe]
        if s > max_frame_size and s > sum(sizes):
            return
        for count in range(0, min(s, len(universe)) + 1):
            for idx in _combinations_with_sum(sizes, count, s, 0):
                yield tuple(universe[i] for i in idx)
        s += 1


def _combinations_with_sum(sizes: Sequence[int], count: int, target: int, start: int) -> Iterator[tuple[int, ...]]:
    if count == 0:
        if target == 0:
            yield ()
        return
    for i in range(start, len(sizes)):
        if sizes[i] * count > target:
            # sizes are non-decreasing, so later picks only grow the sum
            break
        for rest in _combinations_with_sum(sizes, count - 1, target - sizes[i], i + 1):
            yield (i,) + rest


@dataclass
class _Job:
    ordinal: int
    axioms: JankovAxiomSet
    steps: Iterator
    result: Verdict | None = None


class _PosSearch:
    """Fair interleaving of the membership checks of all candidate sets seen so far."""

    def __init__(self, f: Formula, budget: Budget, skip: frozenset[int] = frozenset()):
        self.f = f
        self.budget = budget
        self.skip = skip
        self.sets = enumerate(candidate_sets(budget.max_frame_size))
        self.sets_done = False
        self.active: list[_Job] = []
        self.finished: dict[int, _Job] = {}
        self.rejected: set[int] = set()
        self.next_ordinal = 0
        self.pointer = 0
        self.steps = 0

    @property
    def live(self) -> bool:
        return (bool(self.active) or not self.sets_done) and self.steps < self.budget.max_candidates

    def _spawn(self) -> None:
        try:
            ordinal, frames = next(self.sets)
        except StopIteration:
            self.sets_done = True
            return
        self.next_ordinal = ordinal + 1
        if ordinal in self.skip:
            self.rejected.add(ordinal)
            return
        # each axiom frame must refute f, i.e. its Jankov formula is in K + f
        if any(validates(a, self.f) for a in frames):
            self.rejected.add(ordinal)
            return
        s = JankovAxiomSet.of(frames)
        self.active.append(_Job(ordinal, s, _membership_steps(s, self.f, self.budget)))

    def step(self) -> _Job | None:
        """Advance one candidate; returns the accepted job once one is determined."""
        self.steps += 1
        if self.pointer >= len(self.active):
            self.pointer = 0
            if not self.sets_done:
                self._spawn()
                return self._accepted()
        if not self.active:
            return self._accepted()
        job = self.active[self.pointer]
        item = next(job.steps)
        if item is None:
            self.pointer += 1
            return None
        job.result = item
        self.active.pop(self.pointer)
        if item.outcome is Outcome.NO:
            self.rejected.add(job.ordinal)
        else:
            self.finished[job.ordinal] = job
        return self._accepted()

    def _accepted(self) -> _Job | None:
        # the least proved set wins once every earlier set is settled
        proved = [j for j in self.finished.values() if j.result.outcome is Outcome.YES]
        if not proved:
            return None
        best = min(proved, key=lambda j: j.ordinal)
        if any(j.ordinal < best.ordinal for j in self.active):
            return None
        return best


# ---------------------------------------------------------------- NEG side

def violates_condition_four(c: Frame, f: Formula) -> bool:
    """``c`` refutes ``f`` although all its rooted cycle-free generated subframes validate ``f``."""
    if validates(c, f):
        return False
    return all(validates(g, f) for g in rooted_cycle_free_generated_subframes(c))


def _neg_steps(f: Formula, max_size: int, skip: int) -> Iterator[Frame | None]:
    for k, c in enumerate(enumerate_frames(max_size)):
        if k < skip:
            continue
        yield c if violates_condition_four(c, f) else None


# ---------------------------------------------------------------- union-splitting

def is_union_splitting(f: Formula, budget: Budget = Budget(), cursor: dict | None = None) -> UnionSplittingResult:
    """Decide whether ``K + f`` is a union-splitting of NExt K."""
    if cursor is None:
        return _is_union_splitting_cached(f, budget)
    return _is_union_splitting(f, budget, cursor)


@lru_cache(maxsize=256)
def _is_union_splitting_cached(f: Formula, budget: Budget) -> UnionSplittingResult:
    return _is_union_splitting(f, budget, None)


def _is_union_splitting(f: Formula, budget: Budget, cursor: dict | None) -> UnionSplittingResult:
    pos_skip: frozenset[int] = frozenset()
    neg_skip = 0
    if cursor:
        neg_skip = int(cursor.get("neg_next", 0))
        if cursor.get("max_frame_size") == budget.max_frame_size:
            pos_skip = frozenset(cursor.get("pos_rejected", ()))
    pos = _PosSearch(f, budget, pos_skip)
    neg = _neg_steps(f, budget.max_frame_size, neg_skip)
    neg_live = True
    neg_checked = neg_skip

    def effort() -> dict[str, int]:
        return {"pos_steps": pos.steps, "pos_sets": pos.next_ordinal, "neg_frames": neg_checked}

    while pos.live or neg_live:
        if pos.live:
            job = pos.step()
            if job is not None:
                cert = job.result.witness
                verdict = Verdict(Outcome.YES, job.axioms, effort())
                return UnionSplittingResult(verdict, axiomatization=job.axioms, certificate=cert)
        if neg_live:
            if neg_checked - neg_skip >= budget.max_candidates:
                neg_live = False
                continue
            try:
                c = next(neg)
            except StopIteration:
                neg_live = False
                continue
            neg_checked += 1
            if c is not None:
                return UnionSplittingResult(Verdict(Outcome.NO, c, effort()), counterexample=c)
    resume = {
        "max_frame_size": budget.max_frame_size,
        "pos_next": pos.next_ordinal,
        "pos_rejected": sorted(pos.rejected),
        "neg_next": neg_checked,
    }
    return UnionSplittingResult(Verdict(Outcome.UNKNOWN, None, effort()), cursor=resume)


def verify_union_splitting(f: Formula, result: UnionSplittingResult) -> bool:
    """Re-check a yes or no witness independently of the search that found it."""
    if result.outcome is Outcome.NO:
        c = result.counterexample
        return c is not None and violates_condition_four(c, f)
    if result.outcome is Outcome.YES:
        s = result.axiomatization
        if s is None or any(validates(a, f) for a in s.frames):
            return False
        if result.certificate is not None:
            return result.certificate.replay(f)
        return member_of_jankov_logic(s, f).outcome is Outcome.YES
    return False


# ---------------------------------------------------------------- splitting

def splitting_candidates(axioms: JankovAxiomSet) -> Iterator[Frame]:
    bound = max(a.size for a in axioms.frames)
    return enumerate_frames(bound, "rootedCycleFree")


def is_splitting(f: Formula, budget: Budget = Budget()) -> Verdict:
    """Decide whether ``K + f`` is a splitting; the yes witness is the splitting frame."""
    us = is_union_splitting(f, budget)
    if us.outcome is not Outcome.YES:
        return us.verdict
    s = us.axiomatization
    if len(s) == 0:
        # K + f = K
        return Verdict(Outcome.NO, s, dict(us.verdict.effort))
    b = splitting_witness(s)
    if b is not None:
        return Verdict(Outcome.YES, b, dict(us.verdict.effort))
    return Verdict(Outcome.NO, s, dict(us.verdict.effort))


def splitting_witness(s: JankovAxiomSet) -> Frame | None:
    """First frame ``b`` with ``K + ε(b) = K + s``, or None.

    A single Jankov axiom equivalent to ``s`` has a dual algebra no larger than
    the largest one in ``s``, so ``b`` has no more points than any frame of ``s``.
    """
    if len(s) == 0:
        return None
    for b in splitting_candidates(s):
        if jankov_logic_equal(JankovAxiomSet.of([b]), s):
            return b
    return None


# ---------------------------------------------------------------- consistency

def is_consistent(f: Formula) -> bool:
    """``K + f`` is consistent iff it lies below one of the two co-atoms of NExt K."""
    return validates(REFLEXIVE_POINT, f) or validates(IRREFLEXIVE_POINT, f)


# ---------------------------------------------------------------- axiomatization problem

@dataclass
class AxiomatizationDecision:
    """Decision procedure for ``psi |-> (K + psi = K + f)``, when one exists."""

    formula: Formula
    status: str
    axiomatization: JankovAxiomSet | None = None
    budget: Budget = field(default_factory=Budget)
    counterexample: Frame | None = None

    @property
    def decidable(self) -> bool:
        return self.status in ("inconsistent", "union-splitting")

    def __call__(self, psi: Formula) -> bool:
        if self.status == "inconsistent":
            return not is_consistent(psi)
        if self.status != "union-splitting":
            raise UndecidableProblem(
                f"the axiomatization problem for K + {self.formula} is undecidable: "
                "it is neither a union-splitting nor the inconsistent logic"
            )
        s = self.axiomatization
        if len(s) == 0:
            return is_k_theorem(psi)
        # each Jankov axiom is in K + psi iff its frame refutes psi
        if any(validates(a, psi) for a in s.frames):
            return False
        member = member_of_jankov_logic(s, psi, self.budget)
        if member.outcome is Outcome.UNKNOWN:
            raise BudgetExhausted(f"membership of {psi} undetermined within budget", member)
        return member.outcome is Outcome.YES


def axiomatization_problem_decider(f: Formula, budget: Budget = Budget()) -> AxiomatizationDecision:
    """Return the decision function for the axiomatization problem of ``K + f``.

    When the problem is undecidable the returned object has ``status ==
    "undecidable"`` and raises ``UndecidableProblem`` if called.
    """
    if not is_consistent(f):
        return AxiomatizationDecision(f, "inconsistent", budget=budget)
    us = is_union_splitting(f, budget)
    if us.outcome is Outcome.UNKNOWN:
        raise BudgetExhausted("union-splitting status undetermined within budget", us.verdict)
    if us.outcome is Outcome.YES:
        return AxiomatizationDecision(f, "union-splitting", us.axiomatization, budget)
    return AxiomatizationDecision(f, "undecidable", budget=budget, counterexample=us.counterexample)


def is_decidable_formula(f: Formula, budget: Budget = Budget()) -> Verdict:
    if not is_consistent(f):
        return Verdict(Outcome.YES, {"inconsistent": True})
    us = is_union_splitting(f, budget)
    return Verdict(us.outcome, us.verdict.witness, dict(us.verdict.effort))


@dataclass
class EquivalenceReport:
    formula: Formula
    axiomatization_problem_decidable: Outcome
    decidable_formula: Outcome
    union_splitting_or_inconsistent: Outcome
    consistent: bool
    union_splitting: UnionSplittingResult | None

    @property
    def agree(self) -> bool:
        statuses = {self.axiomatization_problem_decidable, self.decidable_formula,
                    self.union_splitting_or_inconsistent}
        return len(statuses) == 1

    @property
    def outcome(self) -> Outcome:
        if not self.agree:
            raise AssertionError(f"equivalent statuses disagree for {self.formula}")
        return self.decidable_formula


def equivalence_report(f: Formula, budget: Budget = Budget()) -> EquivalenceReport:
    consistent = is_consistent(f)
    try:
        ax = Outcome.YES if axiomatization_problem_decider(f, budget).decidable else Outcome.NO
    except BudgetExhausted:
        ax = Outcome.UNKNOWN
    df = is_decidable_formula(f, budget).outcome
    us = is_union_splitting(f, budget) if consistent else None
    third = Outcome.YES if not consistent else us.outcome
    return EquivalenceReport(f, ax, df, third, consistent, us)
