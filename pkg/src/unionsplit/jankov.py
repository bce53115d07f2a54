"""Jankov formulas of finite rooted cycle-free frames and the structural refutation test.

For a rooted cycle-free frame with dual algebra ``A`` of height ``n``, the
Jankov formula is::

    ([]^(n+1) F & []^{<=n} /\\Gamma) -> \\/ { []^{<=n} p_a : a in A, a != 1 }

where ``Gamma`` is the diagram of ``A``: ``p_(a|b) <-> p_a | p_b`` for all
pairs, ``p_(~a) <-> ~p_a`` and ``p_(<>a) <-> <>p_a`` for all ``a``.  The
variable ``p_a`` is ``Var(a)`` with ``a`` the bitmask of the element.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cache
from pathlib import Path
from typing import Iterable

from .algebra import DualAlgebra, embeds_into_si_image, evaluate, height
from .formula import BOT, Dia, Formula, Iff, Imp, Not, Or, Var, And, box_leq, box_power, conj, disj
from .frame import Frame, canonical_form, frame_from_json, is_cycle_free, is_rooted


class NotAJankovFrame(ValueError):
    """Raised when a frame is not rooted and cycle-free."""


def _require_jankov_frame(a: Frame, role: str = "a") -> None:
    if not is_rooted(a):
        raise NotAJankovFrame(f"frame {role} must be rooted (dual of an s.i. algebra): {a}")
    if not is_cycle_free(a):
        raise NotAJankovFrame(f"frame {role} must be cycle-free (dual of a finite-height algebra): {a}")


@dataclass(frozen=True)
class JankovAxiom:
    frame: Frame
    formula: Formula = field(repr=False, compare=False)
    height: int = field(compare=False)


def diagram(alg: DualAlgebra) -> list[Formula]:
    p = Var
    clauses: list[Formula] = []
    for a in alg.elements():
        for b in alg.elements():
            clauses.append(Iff(p(a | b), Or(p(a), p(b))))
    for a in alg.elements():
        clauses.append(Iff(p(alg.complement(a)), Not(p(a))))
    for a in alg.elements():
        clauses.append(Iff(p(alg.diamond(a)), Dia(p(a))))
    return clauses


@cache
def jankov_formula(a: Frame) -> JankovAxiom:
    """Build the Jankov formula of the dual algebra of a rooted cycle-free frame."""
    _require_jankov_frame(a)
    alg = DualAlgebra(a)
    n = height(alg)
    antecedent = And(box_power(n + 1, BOT), box_leq(n, conj(diagram(alg))))
    consequent = disj(box_leq(n, Var(e)) for e in alg.elements() if e != alg.one)
    formula = Imp(antecedent, consequent)
    # the identity valuation p_a -> a refutes the formula at the root
    if evaluate(alg, formula, {e: e for e in alg.elements()}) == alg.one:
        raise AssertionError(f"Jankov formula of {a} is not refuted by its own algebra")
    return JankovAxiom(a, formula, n)


def refutes_jankov(b: Frame, a: Frame) -> bool:
    """Does the dual of ``b`` refute the Jankov formula of ``a``? Decided structurally."""
    _require_jankov_frame(a)
    return embeds_into_si_image(a, b)


@dataclass(frozen=True)
class JankovAxiomSet:
    """A finite set of Jankov axioms, deduplicated up to isomorphism, in canonical order."""

    axioms: tuple[JankovAxiom, ...] = ()

    @classmethod
    def of(cls, frames: Iterable[Frame]) -> JankovAxiomSet:
        canon = {}
        for f in frames:
            _require_jankov_frame(f)
            c = canonical_form(f)
            canon[c.key] = c
        return cls(tuple(jankov_formula(canon[k]) for k in sorted(canon)))

    @property
    def frames(self) -> tuple[Frame, ...]:
        return tuple(ax.frame for ax in self.axioms)

    @property
    def formulas(self) -> tuple[Formula, ...]:
        return tuple(ax.formula for ax in self.axioms)

    def __len__(self) -> int:
        return len(self.axioms)

    def __iter__(self):
        return iter(self.axioms)

    def to_json(self) -> list[dict]:
        return [f.to_json() for f in self.frames]

    @classmethod
    def from_json(cls, data) -> JankovAxiomSet:
        if not isinstance(data, list):
            raise ValueError("a Jankov axiom set is a JSON list of frames")
        return cls.of(frame_from_json(d) for d in data)

    @classmethod
    def load(cls, path: str | Path) -> JankovAxiomSet:
        return cls.from_json(json.loads(Path(path).read_text()))


EMPTY = JankovAxiomSet()


def jankov_member(b: Frame, s: JankovAxiomSet) -> bool:
    """Is the Jankov formula of ``b`` a theorem of ``K + s``?"""
    _require_jankov_frame(b, "b")
    return any(refutes_jankov(b, ax.frame) for ax in s)


def jankov_logic_equal(s: JankovAxiomSet, t: JankovAxiomSet) -> bool:
    return all(jankov_member(ax.frame, t) for ax in s) and all(jankov_member(ax.frame, s) for ax in t)
