from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from unionsplit.frame import (
    IRREFLEXIVE_POINT, REFLEXIVE_POINT, Frame, canonical_form, chain, enumerate_frames,
    exists_surjective_pmorphism, find_surjective_pmorphism, frame_classes, frame_from_json,
    cycle_free_classes, generated_subframe, is_cycle_free, is_isomorphic, is_pmorphism, is_rooted, relabel,
    rooted_cycle_free_generated_subframes,
)

# the two-point frame with a reflexive root and a dead end
EXAMPLE2 = Frame.from_edges(2, [(0, 0), (0, 1)])
TWO_ISOLATED = Frame(2, (0, 0))


@st.composite
def frames(draw, max_size=4):
    n = draw(st.integers(1, max_size))
    succ = tuple(draw(st.integers(0, (1 << n) - 1)) for _ in range(n))
    return Frame(n, succ)


def _labelled(n):
    for code in range(1 << (n * n)):
        yield Frame(n, tuple((code >> (i * n)) & ((1 << n) - 1) for i in range(n)))


def _orbits(n):
    """Isomorphism classes of labelled frames by union-find over all relabellings."""
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    for f in _labelled(n):
        for perm in itertools.permutations(range(n)):
            a, b = find(f.succ), find(relabel(f, perm).succ)
            if a != b:
                parent[a] = b
    return {find(f.succ) for f in _labelled(n)}


# ---------------------------------------------------------------- structure

def test_generated_subframe_examples():
    assert generated_subframe(EXAMPLE2, 1) == IRREFLEXIVE_POINT
    assert is_isomorphic(generated_subframe(EXAMPLE2, 0), EXAMPLE2)
    assert generated_subframe(chain(3), 1) == chain(2)
    with pytest.raises(ValueError):
        generated_subframe(chain(2), 2)


def test_rooted_examples():
    assert is_rooted(REFLEXIVE_POINT)
    assert not is_rooted(TWO_ISOLATED)
    assert is_rooted(EXAMPLE2)


def test_cycle_free_examples():
    assert is_cycle_free(IRREFLEXIVE_POINT)
    assert not is_cycle_free(REFLEXIVE_POINT)
    assert not is_cycle_free(EXAMPLE2)


def test_rooted_cycle_free_generated_subframes_examples():
    assert rooted_cycle_free_generated_subframes(EXAMPLE2) == (IRREFLEXIVE_POINT,)
    assert rooted_cycle_free_generated_subframes(IRREFLEXIVE_POINT) == (IRREFLEXIVE_POINT,)
    assert rooted_cycle_free_generated_subframes(REFLEXIVE_POINT) == ()


@given(frames())
def test_generated_subframe_idempotent(f):
    for x in range(f.size):
        g = generated_subframe(f, x)
        roots = [y for y in range(g.size) if g.reach[y] == (1 << g.size) - 1]
        assert roots
        assert is_isomorphic(generated_subframe(g, roots[0]), g)


@given(frames())
def test_cycle_freeness_passes_to_generated_subframes(f):
    if is_cycle_free(f):
        assert all(is_cycle_free(generated_subframe(f, x)) for x in range(f.size))


# ---------------------------------------------------------------- p-morphisms

def test_pmorphism_examples():
    assert exists_surjective_pmorphism(EXAMPLE2, EXAMPLE2)
    assert not exists_surjective_pmorphism(chain(2), IRREFLEXIVE_POINT)
    assert not exists_surjective_pmorphism(REFLEXIVE_POINT, IRREFLEXIVE_POINT)


def _brute_force_pmorphism(g, h):
    for m in itertools.product(range(h.size), repeat=g.size):
        if set(m) == set(range(h.size)) and is_pmorphism(g, h, m):
            return True
    return False


def test_pmorphism_search_matches_brute_force():
    small = list(enumerate_frames(3))
    targets = list(enumerate_frames(2))
    for g in small:
        for h in targets:
            assert exists_surjective_pmorphism(g, h) == _brute_force_pmorphism(g, h), (g, h)
            m = find_surjective_pmorphism(g, h)
            if m is not None:
                assert is_pmorphism(g, h, m) and set(m) == set(range(h.size))


@given(frames(3))
def test_pmorphism_reflexive(f):
    assert exists_surjective_pmorphism(f, f)


def test_pmorphism_transitive():
    fs = list(enumerate_frames(2)) + [chain(3), Frame.from_edges(3, [(0, 1), (0, 2)])]
    for f, g, h in itertools.product(fs, repeat=3):
        if exists_surjective_pmorphism(f, g) and exists_surjective_pmorphism(g, h):
            assert exists_surjective_pmorphism(f, h)


# ---------------------------------------------------------------- canonical forms

def test_canonical_form_examples():
    assert canonical_form(REFLEXIVE_POINT) == REFLEXIVE_POINT
    assert canonical_form(Frame.from_edges(2, [(1, 0)])) == chain(2)


@given(frames(), st.randoms())
def test_canonical_form_invariant_under_relabelling(f, rnd):
    perm = list(range(f.size))
    rnd.shuffle(perm)
    assert canonical_form(relabel(f, perm)) == canonical_form(f)


# ---------------------------------------------------------------- enumeration

def test_enumeration_examples():
    assert list(enumerate_frames(1)) == [IRREFLEXIVE_POINT, REFLEXIVE_POINT]
    sizes = [f.size for f in enumerate_frames(2)]
    assert sizes.count(1) == 2 and sizes.count(2) == 10
    assert list(enumerate_frames(2, "rootedCycleFree")) == [IRREFLEXIVE_POINT, chain(2)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_enumeration_matches_brute_force_quotient(n):
    classes = frame_classes(n)
    assert len(classes) == len(_orbits(n))
    # every labelled frame is isomorphic to exactly one representative
    reps = {canonical_form(f) for f in classes}
    assert len(reps) == len(classes)
    for f in _labelled(n):
        assert canonical_form(f) in reps


def test_enumeration_counts_up_to_four():
    assert [len(frame_classes(n)) for n in range(1, 5)] == [2, 10, 104, 3044]
    per_size = [0] * 5
    for f in enumerate_frames(4, "rootedCycleFree"):
        per_size[f.size] += 1
    assert per_size[1:] == [1, 1, 3, 16]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cycle_free_classes_match_full_enumeration(n):
    assert set(cycle_free_classes(n)) == {f for f in frame_classes(n) if is_cycle_free(f)}


def test_enumeration_is_canonical_and_ordered():
    fs = list(enumerate_frames(3))
    assert all(canonical_form(f) == f for f in fs)
    assert [f.key for f in fs] == sorted(f.key for f in fs)


def test_enumeration_filters():
    for f in enumerate_frames(3, "rooted"):
        assert is_rooted(f)
    assert len(list(enumerate_frames(3, "rooted"))) == sum(is_rooted(f) for f in enumerate_frames(3))
    with pytest.raises(ValueError):
        list(enumerate_frames(0))
    with pytest.raises(ValueError):
        list(enumerate_frames(2, "cyclic"))


# ---------------------------------------------------------------- JSON

def test_frame_json_round_trip():
    f = Frame.from_edges(3, [(2, 0), (0, 1)])
    assert frame_from_json(json.loads(json.dumps(f.to_json()))) == f


@pytest.mark.parametrize("data", [
    {"size": 2, "edges": [[0, 1], [0, 1]]},
    {"size": 2, "edges": [[0, 2]]},
    {"size": 0, "edges": []},
    {"edges": []},
    {"size": 2, "edges": [[0]]},
    [],
])
def test_frame_json_rejects(data):
    with pytest.raises(ValueError):
        frame_from_json(data)
