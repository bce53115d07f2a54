from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unionsplit.formula import (
    BOT, TOP, And, Box, Dia, FormulaSyntaxError, Iff, Imp, Not, Or, Var,
    box_leq, box_power, conj, disj, match, modal_depth, parse, substitute, to_text, variables,
)

p0, p1, p2 = Var(0), Var(1), Var(2)

atoms = st.one_of(st.just(TOP), st.just(BOT), st.integers(0, 4).map(Var))


def _extend(children):
    unary = st.sampled_from([Not, Box, Dia])
    binary = st.sampled_from([And, Or, Imp, Iff])
    return st.one_of(
        st.tuples(unary, children).map(lambda t: t[0](t[1])),
        st.tuples(binary, children, children).map(lambda t: t[0](t[1], t[2])),
    )


formulas = st.recursive(atoms, _extend, max_leaves=12)
substitutions = st.dictionaries(st.integers(0, 4), formulas, max_size=3)


# ---------------------------------------------------------------- parsing

def test_parse_examples():
    assert parse("<>T") == Dia(TOP)
    assert parse("[]<>T") == Box(Dia(TOP))
    with pytest.raises(FormulaSyntaxError):
        parse("p0 ->")


def test_precedence_and_associativity():
    assert parse("p0 & p1 | p2") == Or(And(p0, p1), p2)
    assert parse("p0 -> p1 -> p2") == Imp(p0, Imp(p1, p2))
    assert parse("p0 <-> p1 <-> p2") == Iff(Iff(p0, p1), p2)
    assert parse("~[]p0 & p1") == And(Not(Box(p0)), p1)
    assert parse("p0 | p1 -> p2 <-> p0") == Iff(Imp(Or(p0, p1), p2), p0)
    assert parse("(p0 -> p1) -> p2") == Imp(Imp(p0, p1), p2)


def test_unicode_aliases():
    assert parse("□◇⊤") == parse("[]<>T")
    assert parse("¬p0 ∧ p1 ∨ ⊥ → p2 ↔ p0") == parse("~p0 & p1 | F -> p2 <-> p0")


@pytest.mark.parametrize("text, pos", [("p0 ->", 5), ("p0 & & p1", 5), ("(p0", 3), ("p0 p1", 3), ("q1", 0)])
def test_syntax_error_position(text, pos):
    with pytest.raises(FormulaSyntaxError) as info:
        parse(text)
    assert info.value.position == pos


@settings(max_examples=400)
@given(formulas)
def test_round_trip(f):
    assert parse(to_text(f)) == f


@given(formulas)
def test_hash_agrees_with_equality(f):
    g = parse(to_text(f))
    assert f == g and hash(f) == hash(g)
    assert {f: 1}[g] == 1


# ---------------------------------------------------------------- builders

def test_box_leq_examples():
    assert box_leq(0, p0) == p0
    assert box_leq(2, p0) == And(p0, And(Box(p0), Box(Box(p0))))
    assert box_leq(1, BOT) == And(BOT, Box(BOT))


@given(st.integers(0, 5), formulas)
def test_box_leq_depth(n, f):
    assert modal_depth(box_leq(n, f)) == modal_depth(f) + n
    assert modal_depth(box_power(n, f)) == modal_depth(f) + n


def test_conj_disj_empty():
    assert conj([]) == TOP
    assert disj([]) == BOT
    assert conj([p0, p1, p2]) == And(p0, And(p1, p2))


def test_modal_depth_examples():
    assert modal_depth(p0) == 0
    assert modal_depth(parse("[]<>T")) == 2
    assert modal_depth(box_leq(3, p0)) == 3


# ---------------------------------------------------------------- substitution

def test_substitute_examples():
    assert substitute(And(p0, p1), {0: TOP}) == And(TOP, p1)
    assert substitute(Box(p0), {0: Dia(p0)}) == Box(Dia(p0))
    assert substitute(p0, {}) == p0


def test_substitute_is_simultaneous():
    assert substitute(And(p0, p1), {0: p1, 1: p0}) == And(p1, p0)


@settings(max_examples=200)
@given(formulas, substitutions, substitutions)
def test_substitute_compositional(f, s, t):
    composed = {v: substitute(g, t) for v, g in s.items()}
    for v, g in t.items():
        composed.setdefault(v, g)
    assert substitute(substitute(f, s), t) == substitute(f, composed)


@settings(max_examples=200)
@given(formulas, substitutions)
def test_match_inverts_substitute(f, s):
    target = substitute(f, s)
    found = match(f, target)
    assert found is not None
    assert substitute(f, found) == target


def test_match_rejects_non_instances():
    assert match(And(p0, p0), And(p1, p2)) is None
    assert match(Box(p0), Dia(p0)) is None
    assert match(TOP, BOT) is None


def test_variables():
    assert variables(parse("p0 & []p3 -> T")) == {0, 3}
