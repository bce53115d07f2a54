"""Theoremhood in K, and membership in finitely axiomatized extensions of K.

``is_k_theorem`` is a KSAT-style procedure: a SAT solver enumerates
assignments to the propositional skeleton of a world (box subformulas are
opaque atoms), and each assignment is checked by recursing into one
successor per falsified box.  Failed successors yield a blocking clause built
from a shrunk set of boxes.  Recursion strictly lowers modal depth, so the
procedure terminates; it is sound and complete for K.

Membership ``f in K + axioms`` is semi-decided by enumerating substitution
instances of the axioms.  For Jankov-axiomatized logics the proof search is
dovetailed with a search for a finite countermodel, which makes membership
total in principle since those logics have the finite model property.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Iterator, Sequence

from pysat.solvers import Solver

from .algebra import validates
from .formula import (
    BOT, TOP, And, Bot, Box, Dia, Formula, Iff, Imp, Not, Or, Top, Var,
    box_leq, conj, depth, match, parse, substitute, to_text, variables,
)
from .frame import Frame, enumerate_frames
from .jankov import JankovAxiomSet, refutes_jankov

# substitution instances of Jankov formulas nest deeply
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


@dataclass(frozen=True)
class Budget:
    max_candidates: int = 100_000
    max_frame_size: int = 5
    max_subst_depth: int = 2
    max_prefix: int = 3

    def __post_init__(self) -> None:
        if self.max_candidates < 1 or self.max_frame_size < 1:
            raise ValueError("max_candidates and max_frame_size must be positive")
        if self.max_subst_depth < 0 or self.max_prefix < 0:
            raise ValueError("max_subst_depth and max_prefix must be non-negative")


class Outcome(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass
class Verdict:
    outcome: Outcome
    witness: Any = None
    effort: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.outcome is not Outcome.UNKNOWN and self.witness is None:
            raise ValueError("a yes/no verdict needs a witness")


# ---------------------------------------------------------------- simplification

@lru_cache(maxsize=1 << 17)
def simplify(f: Formula) -> Formula:
    """Constant folding, with ``<>x`` rewritten as ``~[]~x`` and double negations dropped."""
    if isinstance(f, (Var, Top, Bot)):
        return f
    if isinstance(f, Not):
        a = simplify(f.arg)
        if isinstance(a, Top):
            return BOT
        if isinstance(a, Bot):
            return TOP
        if isinstance(a, Not):
            return a.arg
        return Not(a)
    if isinstance(f, Dia):
        return simplify(Not(Box(Not(f.arg))))
    if isinstance(f, Box):
        a = simplify(f.arg)
        return TOP if isinstance(a, Top) else Box(a)
    a, b = simplify(f.left), simplify(f.right)
    if isinstance(f, And):
        if isinstance(a, Bot) or isinstance(b, Bot):
            return BOT
        if isinstance(a, Top):
            return b
        if isinstance(b, Top) or a == b:
            return a
        return And(a, b)
    if isinstance(f, Or):
        if isinstance(a, Top) or isinstance(b, Top):
            return TOP
        if isinstance(a, Bot):
            return b
        if isinstance(b, Bot) or a == b:
            return a
        return Or(a, b)
    if isinstance(f, Imp):
        if isinstance(a, Bot) or isinstance(b, Top) or a == b:
            return TOP
        if isinstance(a, Top):
            return b
        if isinstance(b, Bot):
            return simplify(Not(a))
        return Imp(a, b)
    if isinstance(f, Iff):
        if a == b:
            return TOP
        if isinstance(a, Top):
            return b
        if isinstance(b, Top):
            return a
        if isinstance(a, Bot):
            return simplify(Not(b))
        if isinstance(b, Bot):
            return simplify(Not(a))
        return Iff(a, b)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- KSAT

class _World:
    """Tseitin encoding of one world's formulas; boxes are free atoms."""

    def __init__(self, formulas):
        self.solver = Solver(name="m22")
        self.nvars = 0
        self.lits: dict[Formula, int] = {}
        self.box_inner: dict[int, Formula] = {}
        self.top = self._fresh()
        self.solver.add_clause([self.top])
        for f in formulas:
            self.solver.add_clause([self.lit(f)])

    def _fresh(self) -> int:
        self.nvars += 1
        return self.nvars

    def lit(self, f: Formula) -> int:
        hit = self.lits.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Top):
            return self.top
        if isinstance(f, Bot):
            return -self.top
        if isinstance(f, Not):
            return -self.lit(f.arg)
        if isinstance(f, (Var, Box)):
            v = self._new(f)
            if isinstance(f, Box):
                self.box_inner[v] = f.arg
            return v
        a, b = self.lit(f.left), self.lit(f.right)
        v = self._new(f)
        add = self.solver.add_clause
        if isinstance(f, And):
            add([-v, a]); add([-v, b]); add([v, -a, -b])
        elif isinstance(f, Or):
            add([-v, a, b]); add([v, -a]); add([v, -b])
        elif isinstance(f, Imp):
            add([-v, -a, b]); add([v, a]); add([v, -b])
        else:
            add([-v, -a, b]); add([-v, a, -b]); add([v, a, b]); add([v, -a, -b])
        return v

    def _new(self, f: Formula) -> int:
        v = self._fresh()
        self.lits[f] = v
        return v

    def close(self) -> None:
        self.solver.delete()


class KProver:
    """Satisfiability and validity in K, memoised per set of world formulas."""

    def __init__(self, memo_limit: int = 200_000):
        self._memo: dict[frozenset, bool] = {}
        self._memo_limit = memo_limit

    def satisfiable(self, formulas) -> bool:
        return self._sat(frozenset(simplify(f) for f in formulas))

    def is_theorem(self, f: Formula) -> bool:
        return not self.satisfiable([Not(f)])

    def _sat(self, world: frozenset) -> bool:
        hit = self._memo.get(world)
        if hit is not None:
            return hit
        if BOT in world:
            result = False
        else:
            result = self._search(world - {TOP})
        if len(self._memo) >= self._memo_limit:
            self._memo.clear()
        self._memo[world] = result
        return result

    def _search(self, world: frozenset) -> bool:
        enc = _World(world)
        try:
            while enc.solver.solve():
                model = set(enc.solver.get_model())
                true_boxes = [g for v, g in enc.box_inner.items() if v in model]
                false_boxes = [g for v, g in enc.box_inner.items() if v not in model]
                blocked = None
                for chi in false_boxes:
                    need = simplify(Not(chi))
                    if not self._sat(frozenset(true_boxes) | {need}):
                        blocked = (self._shrink(true_boxes, need), chi)
                        break
                if blocked is None:
                    return True
                core, chi = blocked
                enc.solver.add_clause([-enc.lits[Box(g)] for g in core] + [enc.lits[Box(chi)]])
            return False
        finally:
            enc.close()

    def _shrink(self, boxes: list[Formula], need: Formula) -> list[Formula]:
        core = list(boxes)
        for g in list(core):
            trial = [x for x in core if x != g]
            if not self._sat(frozenset(trial) | {need}):
                core = trial
        return core


_PROVER = KProver()


def is_k_theorem(f: Formula) -> bool:
    """Is ``f`` valid on every Kripke frame?"""
    return _PROVER.is_theorem(f)


def is_k_satisfiable(f: Formula) -> bool:
    return _PROVER.satisfiable([f])


# ---------------------------------------------------------------- proof certificates

@dataclass(frozen=True)
class ProofCertificate:
    """``[]^{<=prefix} /\\instances -> f`` is a theorem of K.

    ``sources`` records, per instance, the axiom index and the substitution
    that produced it; it is not part of the JSON form.
    """

    prefix: int
    instances: tuple[Formula, ...]
    sources: tuple[tuple[int, tuple[tuple[int, Formula], ...]], ...] = field(default=(), compare=False)

    def implication(self, f: Formula) -> Formula:
        return Imp(box_leq(self.prefix, conj(self.instances)), f)

    def replay(self, f: Formula) -> bool:
        return is_k_theorem(self.implication(f))

    def instances_of(self, axioms: Sequence[Formula]) -> bool:
        """Is every instance a substitution instance of one of ``axioms``?"""
        return all(any(match(ax, g) is not None for ax in axioms) for g in self.instances)

    def verify(self, axioms: Sequence[Formula], f: Formula) -> bool:
        return self.instances_of(axioms) and self.replay(f)

    def to_json(self) -> dict:
        return {"prefix": self.prefix, "instances": [to_text(g) for g in self.instances]}

    @classmethod
    def from_json(cls, data) -> ProofCertificate:
        if not isinstance(data, dict) or "prefix" not in data or "instances" not in data:
            raise ValueError('certificate JSON needs "prefix" and "instances"')
        return cls(int(data["prefix"]), tuple(parse(t) for t in data["instances"]))


# ---------------------------------------------------------------- substitution instances

def image_levels(atoms: Sequence[int], max_depth: int) -> list[list[Formula]]:
    """Substitution images by exact syntactic depth, built from ``T``, ``F`` and the given variables."""
    levels = [[TOP, BOT] + [Var(v) for v in sorted(atoms)]]
    for d in range(1, max_depth + 1):
        prev = levels[d - 1]
        below = [g for lvl in levels for g in lvl]
        new: list[Formula] = []
        for g in prev:
            new.extend((Not(g), Box(g), Dia(g)))
        # binary images with at least one argument of depth d-1, unordered and distinct
        start = len(below) - len(prev)
        for i in range(start, len(below)):
            for j in range(len(below)):
                if j < start or j < i:
                    x, y = below[min(i, j)], below[max(i, j)]
                    if x != y:
                        new.extend((And(x, y), Or(x, y)))
        levels.append(new)
    return levels


def _substitutions(names: Sequence[int], levels: list[list[Formula]], d: int) -> Iterator[dict[int, Formula]]:
    """All substitutions on ``names`` whose deepest image has depth exactly ``d``."""
    if not names:
        if d == 0:
            yield {}
        return
    lower = [g for lvl in levels[:d] for g in lvl]
    upto = lower + levels[d]
    if d == 0:
        # the identity comes first: the query is often literally an axiom instance
        ident = tuple(Var(v) for v in names)
        if all(g in levels[0] for g in ident):
            yield dict(zip(names, ident))
        for combo in itertools.product(levels[0], repeat=len(names)):
            if combo != ident:
                yield dict(zip(names, combo))
        return
    k = len(names)
    # the first depth-d image sits at position i
    for i in range(k):
        for combo in itertools.product(*([lower] * i + [levels[d]] + [upto] * (k - i - 1))):
            yield dict(zip(names, combo))


def _proof_search(axioms: Sequence[Formula], f: Formula, budget: Budget) -> Iterator[ProofCertificate | None]:
    """One step per candidate; yields a certificate on success, otherwise None.

    Candidates in order: the empty instance set; then, for each new non-trivial
    instance, that instance alone under every prefix; the accumulated instance
    set is retried whenever its size reaches a power of two and at the end of
    each depth stage.  Any finite instance set is eventually covered by an
    accumulated set, which is what makes the search complete in the limit.
    """
    atoms = sorted(variables(f))
    levels = image_levels(atoms, budget.max_subst_depth)
    prefixes = range(budget.max_prefix + 1)

    def attempt(insts, srcs):
        for n in prefixes if insts else (0,):
            cert = ProofCertificate(n, tuple(insts), tuple(srcs))
            yield cert if is_k_theorem(cert.implication(f)) else None

    yield from attempt([], [])
    kept: list[Formula] = []
    sources = []
    seen: set[Formula] = set()
    for d in range(budget.max_subst_depth + 1):
        for ai, ax in enumerate(axioms):
            names = sorted(variables(ax))
            for s in _substitutions(names, levels, d):
                inst = substitute(ax, s)
                key = simplify(inst)
                if isinstance(key, Top) or key in seen:
                    yield None
                    continue
                seen.add(key)
                src = (ai, tuple(sorted(s.items())))
                kept.append(inst)
                sources.append(src)
                yield from attempt([inst], [src])
                if len(kept) > 1 and len(kept) & (len(kept) - 1) == 0:
                    yield from attempt(kept, sources)
        if len(kept) > 1:
            yield from attempt(kept, sources)


def _run(steps: Iterator, limit: int) -> tuple[Any, int, bool]:
    """Advance ``steps`` up to ``limit`` times; returns (result, steps used, exhausted)."""
    used = 0
    for item in steps:
        used += 1
        if item is not None:
            return item, used, False
        if used >= limit:
            return None, used, False
    return None, used, True


def membership_semi(axioms: Sequence[Formula], f: Formula, budget: Budget = Budget()) -> Verdict:
    """Semi-decide ``f in K + axioms``: yes with a certificate, or unknown. Never no."""
    cert, used, _ = _run(_proof_search(axioms, f, budget), budget.max_candidates)
    effort = {"proof_candidates": used}
    if cert is not None:
        return Verdict(Outcome.YES, cert, effort)
    return Verdict(Outcome.UNKNOWN, None, effort)


# ---------------------------------------------------------------- countermodels

def is_jankov_countermodel(b: Frame, s: JankovAxiomSet, f: Formula) -> bool:
    """``b`` validates ``K + s`` (checked structurally) and refutes ``f``."""
    return not any(refutes_jankov(b, ax.frame) for ax in s) and not validates(b, f)


def _countermodel_search(s: JankovAxiomSet, f: Formula, max_size: int) -> Iterator[Frame | None]:
    for b in enumerate_frames(max_size):
        yield b if is_jankov_countermodel(b, s, f) else None


def find_jankov_countermodel(s: JankovAxiomSet, f: Formula, max_size: int) -> Frame | None:
    """First frame of size at most ``max_size`` validating ``K + s`` and refuting ``f``."""
    for b in _countermodel_search(s, f, max_size):
        if b is not None:
            return b
    return None


def _membership_steps(s: JankovAxiomSet, f: Formula, budget: Budget) -> Iterator[Verdict | None]:
    """Strict round-robin of proof search and countermodel search, one candidate each."""
    sides = {
        "proof_candidates": _proof_search(s.formulas, f, budget),
        "countermodel_candidates": _countermodel_search(s, f, budget.max_frame_size),
    }
    effort = {k: 0 for k in sides}
    live = list(sides)
    while live:
        for name in list(live):
            if effort[name] >= budget.max_candidates:
                live.remove(name)
                continue
            try:
                item = next(sides[name])
            except StopIteration:
                live.remove(name)
                continue
            effort[name] += 1
            if item is not None:
                outcome = Outcome.YES if name == "proof_candidates" else Outcome.NO
                yield Verdict(outcome, item, dict(effort))
                return
            yield None
    yield Verdict(Outcome.UNKNOWN, None, dict(effort))


def member_of_jankov_logic(s: JankovAxiomSet, f: Formula, budget: Budget = Budget()) -> Verdict:
    """Decide ``f in K + s``: yes with a proof certificate, no with a countermodel frame."""
    for item in _membership_steps(s, f, budget):
        if item is not None:
            return item
    raise AssertionError("membership search ended without a verdict")
