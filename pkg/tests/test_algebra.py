from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from unionsplit.algebra import (
    DualAlgebra, embeds_into_si_image, evaluate, finite_height, height, is_subdirectly_irreducible,
    opremum, refuting_valuation, validates, validates_bruteforce,
)
from unionsplit.formula import BOT, TOP, And, Box, Dia, Iff, Imp, Not, Or, Var, parse, variables
from unionsplit.frame import (
    IRREFLEXIVE_POINT, REFLEXIVE_POINT, Frame, chain, enumerate_frames, is_cycle_free, is_rooted,
)

EXAMPLE2 = Frame.from_edges(2, [(0, 0), (0, 1)])
TWO_ISOLATED = Frame(2, (0, 0))


def _random_formula(rnd, depth, nvars=2):
    if depth == 0:
        return rnd.choice([TOP, BOT] + [Var(i) for i in range(nvars)])
    c = rnd.randrange(7)
    if c < 3:
        return (Not, Box, Dia)[c](_random_formula(rnd, depth - 1, nvars))
    return (And, Or, Imp, Iff)[c - 3](_random_formula(rnd, depth - 1, nvars), _random_formula(rnd, depth - 1, nvars))


def _pointwise_valid(frame, f):
    """Independent Kripke-semantics check, point by point, without the algebra."""
    vs = sorted(variables(f))
    n = frame.size

    def holds(g, x, v):
        if isinstance(g, Var):
            return bool(v[g.index] >> x & 1)
        if g == TOP:
            return True
        if g == BOT:
            return False
        if isinstance(g, Not):
            return not holds(g.arg, x, v)
        if isinstance(g, Box):
            return all(holds(g.arg, y, v) for y in range(n) if frame.succ[x] >> y & 1)
        if isinstance(g, Dia):
            return any(holds(g.arg, y, v) for y in range(n) if frame.succ[x] >> y & 1)
        a, b = holds(g.left, x, v), holds(g.right, x, v)
        return {And: a and b, Or: a or b, Imp: (not a) or b, Iff: a == b}[type(g)]

    for combo in itertools.product(range(1 << n), repeat=len(vs)):
        v = dict(zip(vs, combo))
        if not all(holds(f, x, v) for x in range(n)):
            return False
    return True


# ---------------------------------------------------------------- evaluation

def test_evaluate_examples():
    for fr in (IRREFLEXIVE_POINT, EXAMPLE2, chain(3)):
        alg = DualAlgebra(fr)
        assert evaluate(alg, TOP, {}) == alg.one
    assert evaluate(DualAlgebra(IRREFLEXIVE_POINT), Dia(TOP), {}) == 0
    # {r->r, r->d}: box diamond T holds exactly at the dead end d (point 1)
    assert evaluate(DualAlgebra(EXAMPLE2), Box(Dia(TOP)), {}) == 0b10


def test_evaluate_requires_covering_valuation():
    with pytest.raises(KeyError):
        evaluate(DualAlgebra(IRREFLEXIVE_POINT), Var(3), {0: 0})


def test_validates_examples():
    assert validates(IRREFLEXIVE_POINT, Box(BOT))
    assert not validates(EXAMPLE2, Box(Dia(TOP)))
    assert validates(REFLEXIVE_POINT, Dia(TOP))
    assert validates(DualAlgebra(REFLEXIVE_POINT), parse("[]p0 -> p0"))


def test_box_diamond_duality():
    for fr in enumerate_frames(3):
        alg = DualAlgebra(fr)
        for a in alg.elements():
            assert alg.box(a) == alg.complement(alg.diamond(alg.complement(a)))


def test_validates_matches_pointwise_semantics():
    rnd = random.Random(7)
    frames = list(enumerate_frames(3))
    for _ in range(600):
        f = _random_formula(rnd, rnd.randrange(4))
        fr = rnd.choice(frames)
        assert validates(fr, f) == _pointwise_valid(fr, f), (fr, f)


def test_sat_route_matches_brute_force():
    # four variables on four points forces the SAT route in validates()
    rnd = random.Random(3)
    frames = list(enumerate_frames(4))
    for _ in range(150):
        f = _random_formula(rnd, rnd.randrange(1, 4), nvars=4)
        fr = rnd.choice(frames)
        assert validates(fr, f) == validates_bruteforce(fr, f), (fr, f)


def test_refuting_valuation():
    alg = DualAlgebra(IRREFLEXIVE_POINT)
    v = refuting_valuation(alg, parse("[]p0 -> p0"))
    assert v == {0: 0}
    assert evaluate(alg, parse("[]p0 -> p0"), v) != alg.one
    assert refuting_valuation(alg, Box(BOT)) is None


# ---------------------------------------------------------------- height and s.i.

def test_finite_height_examples():
    assert finite_height(DualAlgebra(IRREFLEXIVE_POINT)) == 1
    assert height(DualAlgebra(IRREFLEXIVE_POINT)) == 0
    assert finite_height(DualAlgebra(REFLEXIVE_POINT)) is None
    assert height(DualAlgebra(REFLEXIVE_POINT)) is None
    assert finite_height(DualAlgebra(chain(2))) == 2


def test_si_examples():
    assert is_subdirectly_irreducible(DualAlgebra(IRREFLEXIVE_POINT))
    assert opremum(DualAlgebra(IRREFLEXIVE_POINT)) == 0
    assert not is_subdirectly_irreducible(DualAlgebra(TWO_ISOLATED))
    assert is_subdirectly_irreducible(DualAlgebra(EXAMPLE2))


def test_lemmas_exhaustively_up_to_three_points():
    # the four-point sweep runs in the acceptance suite
    for fr in enumerate_frames(3):
        alg = DualAlgebra(fr)
        assert (finite_height(alg) is not None) == is_cycle_free(fr)
        assert is_subdirectly_irreducible(alg) == is_rooted(fr)


def test_box_zero_sequence_is_monotone_and_stabilises():
    for fr in enumerate_frames(3):
        alg = DualAlgebra(fr)
        seq = [0]
        for _ in range(alg.size):
            seq.append(alg.box(seq[-1]))
        for a, b in zip(seq, seq[1:]):
            assert a & ~b == 0
        assert seq[alg.size - 1] == seq[alg.size]


# ---------------------------------------------------------------- embeddings

def test_embeds_examples():
    assert embeds_into_si_image(IRREFLEXIVE_POINT, EXAMPLE2)
    assert not embeds_into_si_image(IRREFLEXIVE_POINT, REFLEXIVE_POINT)
    for fr in enumerate_frames(3, "rooted"):
        assert embeds_into_si_image(fr, fr)


def test_embeds_requires_rooted():
    with pytest.raises(ValueError):
        embeds_into_si_image(TWO_ISOLATED, IRREFLEXIVE_POINT)


def test_height_reflection():
    # a subalgebra of a homomorphic image of a finite-height algebra has finite height
    for b in enumerate_frames(3, "rooted"):
        for a in enumerate_frames(2, "rooted"):
            if embeds_into_si_image(a, b) and is_cycle_free(b):
                assert is_cycle_free(a)


@given(st.integers(1, 3), st.data())
def test_validates_monotone_under_conjunction(n, data):
    fr = data.draw(st.sampled_from(list(enumerate_frames(n))))
    f, g = parse("[]p0 -> p0"), parse("p0 -> []<>p0")
    assert validates(fr, And(f, g)) == (validates(fr, f) and validates(fr, g))
