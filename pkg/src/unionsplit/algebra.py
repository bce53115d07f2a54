"""The powerset modal algebra of a finite frame.

Elements are subsets of the frame's points encoded as bitmasks, so the
carrier of the dual of an ``n``-point frame is ``range(2**n)`` with ``0``
the empty set and ``2**n - 1`` the full set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache, lru_cache
from typing import Mapping

import numpy as np
from pysat.solvers import Solver

from .formula import (
    And, Bot, Box, Dia, Formula, Iff, Imp, Not, Or, Top, Var, variables,
)
from .frame import Frame, _bits, exists_surjective_pmorphism, generated_subframe, is_rooted

Valuation = Mapping[int, int]

# valuations checked per numpy batch in validates()
_BATCH = 1 << 18
# above this many valuation bits validates() asks a SAT solver instead of enumerating
_BRUTE_FORCE_BITS = 12


@dataclass(frozen=True)
class DualAlgebra:
    frame: Frame

    @property
    def size(self) -> int:
        """Cardinality of the carrier."""
        return 1 << self.frame.size

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return (1 << self.frame.size) - 1

    def elements(self) -> range:
        return range(self.size)

    def join(self, a: int, b: int) -> int:
        return a | b

    def meet(self, a: int, b: int) -> int:
        return a & b

    def complement(self, a: int) -> int:
        return self.one ^ a

    def diamond(self, a: int) -> int:
        out = 0
        for x, s in enumerate(self.frame.succ):
            if s & a:
                out |= 1 << x
        return out

    def box(self, a: int) -> int:
        return self.complement(self.diamond(self.complement(a)))

    def box_power(self, n: int, a: int) -> int:
        for _ in range(n):
            a = self.box(a)
        return a

    def box_leq(self, n: int, a: int) -> int:
        out = a
        cur = a
        for _ in range(n):
            cur = self.box(cur)
            out &= cur
        return out


def dual(f: Frame) -> DualAlgebra:
    return DualAlgebra(f)


def evaluate(alg: DualAlgebra, f: Formula, v: Valuation) -> int:
    """The carrier element denoted by ``f`` under the valuation ``v``."""
    if isinstance(f, Var):
        try:
            return v[f.index]
        except KeyError:
            raise KeyError(f"valuation does not cover p{f.index}") from None
    if isinstance(f, Top):
        return alg.one
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Not):
        return alg.complement(evaluate(alg, f.arg, v))
    if isinstance(f, Box):
        return alg.box(evaluate(alg, f.arg, v))
    if isinstance(f, Dia):
        return alg.diamond(evaluate(alg, f.arg, v))
    a = evaluate(alg, f.left, v)
    b = evaluate(alg, f.right, v)
    if isinstance(f, And):
        return a & b
    if isinstance(f, Or):
        return a | b
    if isinstance(f, Imp):
        return alg.complement(a) | b
    if isinstance(f, Iff):
        return alg.complement(a ^ b)
    raise TypeError(f"not a formula: {f!r}")


def _evaluate_batch(frame: Frame, f: Formula, env: dict[int, np.ndarray], one: np.int64, memo: dict):
    """Vectorised ``evaluate``: each array slot holds the value under one valuation."""
    hit = memo.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Var):
        out = env[f.index]
    elif isinstance(f, Top):
        out = one
    elif isinstance(f, Bot):
        out = np.int64(0)
    elif isinstance(f, (Not, Box, Dia)):
        a = _evaluate_batch(frame, f.arg, env, one, memo)
        if isinstance(f, Not):
            out = a ^ one
        else:
            if isinstance(f, Box):
                a = a ^ one
            out = np.zeros(np.shape(a), dtype=np.int64)
            for x, s in enumerate(frame.succ):
                if s:
                    out = out | (((a & s) != 0).astype(np.int64) << x)
            if isinstance(f, Box):
                out = out ^ one
    else:
        a = _evaluate_batch(frame, f.left, env, one, memo)
        b = _evaluate_batch(frame, f.right, env, one, memo)
        if isinstance(f, And):
            out = a & b
        elif isinstance(f, Or):
            out = a | b
        elif isinstance(f, Imp):
            out = (a ^ one) | b
        else:
            out = (a ^ b) ^ one
    memo[f] = out
    return out


def validates(alg: DualAlgebra | Frame, f: Formula) -> bool:
    """True iff ``f`` evaluates to the top element under every valuation."""
    frame = alg.frame if isinstance(alg, DualAlgebra) else alg
    if frame.size * len(variables(f)) <= _BRUTE_FORCE_BITS:
        return _validates(frame, f)
    return _validates_sat(frame, f)


def validates_bruteforce(alg: DualAlgebra | Frame, f: Formula) -> bool:
    """``validates`` by enumerating every valuation, whatever the size."""
    frame = alg.frame if isinstance(alg, DualAlgebra) else alg
    return _validates(frame, f)


_VAR, _TOP, _BOT, _NOT, _BOX, _DIA, _AND, _OR, _IMP, _IFF = range(10)
_OPS = {Not: _NOT, Box: _BOX, Dia: _DIA, And: _AND, Or: _OR, Imp: _IMP, Iff: _IFF}


@lru_cache(maxsize=1024)
def _compile(f: Formula) -> tuple[tuple[int, int, int], ...]:
    """The distinct subformulas of ``f`` as ``(op, a, b)`` rows, children before parents.

    For variables ``a`` is the variable index; otherwise ``a`` and ``b`` are row numbers.
    """
    rows: list[tuple[int, int, int]] = []
    index: dict[Formula, int] = {}
    stack = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if g in index:
            continue
        if isinstance(g, Var):
            row = (_VAR, g.index, 0)
        elif isinstance(g, Top):
            row = (_TOP, 0, 0)
        elif isinstance(g, Bot):
            row = (_BOT, 0, 0)
        elif not expanded:
            stack.append((g, True))
            stack.extend((c, False) for c in ((g.arg,) if isinstance(g, (Not, Box, Dia)) else (g.right, g.left)))
            continue
        elif isinstance(g, (Not, Box, Dia)):
            row = (_OPS[type(g)], index[g.arg], 0)
        else:
            row = (_OPS[type(g)], index[g.left], index[g.right])
        index[g] = len(rows)
        rows.append(row)
    return tuple(rows)


@lru_cache(maxsize=1 << 16)
def _validates_sat(frame: Frame, f: Formula) -> bool:
    # one propositional variable per (subformula, point); f is valid iff no point can falsify it.
    # literal 1 is constant true
    rows = _compile(f)
    points = range(frame.size)
    succ = [list(_bits(m)) for m in frame.succ]
    clauses: list[list[int]] = [[1]]
    top = 1
    nvars = 1

    def gate_and(lits: list[int]) -> int:
        nonlocal nvars
        lits = [a for a in lits if a != top]
        if -top in lits:
            return -top
        if not lits:
            return top
        if len(lits) == 1:
            return lits[0]
        nvars += 1
        v = nvars
        for a in lits:
            clauses.append([-v, a])
        clauses.append([v] + [-a for a in lits])
        return v

    var_lits: dict[int, list[int]] = {}
    table: list[list[int]] = []
    for op, a, b in rows:
        if op == _VAR:
            if a not in var_lits:
                var_lits[a] = list(range(nvars + 1, nvars + 1 + frame.size))
                nvars += frame.size
            out = var_lits[a]
        elif op == _TOP:
            out = [top] * frame.size
        elif op == _BOT:
            out = [-top] * frame.size
        elif op == _NOT:
            out = [-v for v in table[a]]
        elif op == _BOX:
            arg = table[a]
            out = [gate_and([arg[y] for y in succ[x]]) for x in points]
        elif op == _DIA:
            arg = table[a]
            out = [-gate_and([-arg[y] for y in succ[x]]) for x in points]
        else:
            left, right = table[a], table[b]
            if op == _AND:
                out = [gate_and([left[x], right[x]]) for x in points]
            elif op == _OR:
                out = [-gate_and([-left[x], -right[x]]) for x in points]
            elif op == _IMP:
                out = [-gate_and([left[x], -right[x]]) for x in points]
            else:
                out = []
                for x in points:
                    p, q = left[x], right[x]
                    if abs(p) == top or abs(q) == top:
                        # p <-> q with a constant side is the other side or its negation
                        c, o = (p, q) if abs(p) == top else (q, p)
                        out.append(o if c == top else -o)
                        continue
                    nvars += 1
                    v = nvars
                    clauses.extend(([-v, -p, q], [-v, p, -q], [v, p, q], [v, -p, -q]))
                    out.append(v)
        table.append(out)
    goal = [-v for v in table[-1]]
    if top in goal:
        return False
    goal = [v for v in goal if v != -top]
    if not goal:
        return True
    clauses.append(goal)
    with Solver(name="m22", bootstrap_with=clauses) as solver:
        return not solver.solve()


@lru_cache(maxsize=1 << 16)
def _validates(frame: Frame, f: Formula) -> bool:
    vs = sorted(variables(f))
    n = frame.size
    one = np.int64((1 << n) - 1)
    total = 1 << (n * len(vs))
    for start in range(0, total, _BATCH):
        idx = np.arange(start, min(total, start + _BATCH), dtype=np.int64)
        env = {v: (idx >> (k * n)) & one for k, v in enumerate(vs)}
        value = _evaluate_batch(frame, f, env, one, {})
        if np.any(np.broadcast_to(value, idx.shape) != one):
            return False
    return True


def refuting_valuation(alg: DualAlgebra, f: Formula) -> dict[int, int] | None:
    """First valuation (in index order) under which ``f`` is not the top element."""
    vs = sorted(variables(f))
    n = alg.frame.size
    one = np.int64(alg.one)
    total = 1 << (n * len(vs))
    for start in range(0, total, _BATCH):
        idx = np.arange(start, min(total, start + _BATCH), dtype=np.int64)
        env = {v: (idx >> (k * n)) & one for k, v in enumerate(vs)}
        value = np.broadcast_to(_evaluate_batch(alg.frame, f, env, one, {}), idx.shape)
        bad = np.nonzero(value != one)[0]
        if bad.size:
            i = int(idx[bad[0]])
            return {v: (i >> (k * n)) & alg.one for k, v in enumerate(vs)}
    return None


# ---------------------------------------------------------------- height and s.i.

def finite_height(alg: DualAlgebra) -> int | None:
    """Least ``n`` with ``[]^n 0 = 1`` among ``n < |A|``, or None.

    The algebra has height ``<= finite_height - 1`` in the usual sense.
    """
    a = 0
    for n in range(alg.size):
        if a == alg.one:
            return n
        nxt = alg.box(a)
        if nxt == a:
            # the sequence is stuck below the top
            return None
        a = nxt
    return None


def height(alg: DualAlgebra) -> int | None:
    """The ``n`` with the algebra validating ``[]^(n+1) F`` minimally, or None."""
    h = finite_height(alg)
    return None if h is None else h - 1


def _box_leq_limit(alg: DualAlgebra, a: int) -> int:
    # the meets []^{<=n} a decrease with n; every []^k a already occurs with k < |A|
    acc = a
    cur = a
    for _ in range(alg.size - 1):
        cur = alg.box(cur)
        acc &= cur
    return acc


def opremum(alg: DualAlgebra) -> int | None:
    """Least opremum candidate ``c != 1`` (by bitmask), or None when there is none."""
    limits = [_box_leq_limit(alg, a) for a in alg.elements() if a != alg.one]
    for c in alg.elements():
        if c == alg.one:
            continue
        if all(lim & ~c == 0 for lim in limits):
            return c
    return None


def is_subdirectly_irreducible(alg: DualAlgebra) -> bool:
    return opremum(alg) is not None


def embeds_into_si_image(a: Frame, b: Frame) -> bool:
    """Is the dual of ``a`` a subalgebra of an s.i. homomorphic image of the dual of ``b``?

    Dually: does some point-generated subframe of ``b`` map onto ``a`` by a
    surjective p-morphism.
    """
    if not is_rooted(a):
        raise ValueError("embeds_into_si_image requires a rooted frame a (an s.i. algebra)")
    return _embeds(a, b)


@cache
def _embeds(a: Frame, b: Frame) -> bool:
    seen = set()
    for x in range(b.size):
        g = generated_subframe(b, x)
        if g in seen:
            continue
        seen.add(g)
        if exists_surjective_pmorphism(g, a):
            return True
    return False


def points(mask: int) -> list[int]:
    return list(_bits(mask))
