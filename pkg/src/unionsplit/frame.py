"""Finite Kripke frames: generated subframes, p-morphisms, canonical forms, enumeration.

A frame on points ``0..size-1`` stores its relation as one successor bitmask
per point.  Frames are ordered canonically by ``(size, sorted edge list)``;
the canonical representative of an isomorphism class is the relabelling whose
sorted edge list is lexicographically least.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cache, cached_property
from pathlib import Path
from typing import Iterator, Literal

import numpy as np

FrameFilter = Literal["any", "rooted", "rootedCycleFree"]

# labelled frames on 5 points already number 2**25
MAX_ENUMERATION_SIZE = 5


@dataclass(frozen=True)
class Frame:
    size: int
    succ: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("a frame needs at least one point")
        if len(self.succ) != self.size:
            raise ValueError("one successor mask per point required")
        full = (1 << self.size) - 1
        if any(m & ~full for m in self.succ):
            raise ValueError("edge endpoint out of range")

    @classmethod
    def from_edges(cls, size: int, edges) -> Frame:
        succ = [0] * size
        for i, j in edges:
            if not (0 <= i < size and 0 <= j < size):
                raise ValueError(f"edge ({i}, {j}) out of range for size {size}")
            succ[i] |= 1 << j
        return cls(size, tuple(succ))

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i in range(self.size) for j in range(self.size) if self.succ[i] >> j & 1)

    @property
    def key(self) -> tuple:
        """Sort key of the canonical order."""
        return (self.size, self.edges)

    @cached_property
    def reach(self) -> tuple[int, ...]:
        """Reflexive-transitive closure: ``reach[x]`` is the set of points reachable from ``x``."""
        out = []
        for x in range(self.size):
            seen = 1 << x
            frontier = seen
            while frontier:
                nxt = 0
                for y in _bits(frontier):
                    nxt |= self.succ[y]
                frontier = nxt & ~seen
                seen |= nxt
            out.append(seen)
        return tuple(out)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.succ[i] >> j & 1)

    def to_json(self) -> dict:
        return {"size": self.size, "edges": [list(e) for e in self.edges]}

    def __str__(self) -> str:
        body = ", ".join(f"{i}->{j}" for i, j in self.edges)
        return f"Frame({self.size}: {body})"


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def frame_from_json(data) -> Frame:
    if not isinstance(data, dict) or "size" not in data or "edges" not in data:
        raise ValueError('frame JSON must be an object with "size" and "edges"')
    size = data["size"]
    if not isinstance(size, int) or isinstance(size, bool) or size < 1:
        raise ValueError("frame size must be a positive integer")
    edges = []
    for e in data["edges"]:
        if not (isinstance(e, (list, tuple)) and len(e) == 2 and all(isinstance(v, int) for v in e)):
            raise ValueError(f"malformed edge {e!r}")
        edges.append(tuple(e))
    if len(set(edges)) != len(edges):
        raise ValueError("duplicate edges in frame JSON")
    return Frame.from_edges(size, edges)


def load_frame(path: str | Path) -> Frame:
    return frame_from_json(json.loads(Path(path).read_text()))


# common fixtures
IRREFLEXIVE_POINT = Frame(1, (0,))
REFLEXIVE_POINT = Frame(1, (1,))


def chain(n: int) -> Frame:
    """Irreflexive chain ``0 -> 1 -> ... -> n-1``."""
    return Frame.from_edges(n, [(i, i + 1) for i in range(n - 1)])


# ---------------------------------------------------------------- structure

def generated_subframe(f: Frame, root: int) -> Frame:
    """Restriction of ``f`` to the points reachable from ``root``, in canonical form."""
    if not 0 <= root < f.size:
        raise ValueError(f"root {root} out of range for a frame of size {f.size}")
    points = list(_bits(f.reach[root]))
    index = {x: k for k, x in enumerate(points)}
    edges = [(index[x], index[y]) for x in points for y in _bits(f.succ[x])]
    return canonical_form(Frame.from_edges(len(points), edges))


def is_rooted(f: Frame) -> bool:
    full = (1 << f.size) - 1
    return any(r == full for r in f.reach)


def is_cycle_free(f: Frame) -> bool:
    # x lies on a cycle iff x is reachable from one of its successors
    for x in range(f.size):
        for y in _bits(f.succ[x]):
            if f.reach[y] >> x & 1:
                return False
    return True


@cache
def rooted_cycle_free_generated_subframes(f: Frame) -> tuple[Frame, ...]:
    """Duals of the finite-height s.i. homomorphic images of the dual algebra of ``f``."""
    found = {}
    for x in range(f.size):
        g = generated_subframe(f, x)
        if is_cycle_free(g):
            found[g.key] = g
    return tuple(found[k] for k in sorted(found))


def is_pmorphism(g: Frame, h: Frame, mapping) -> bool:
    """Check forth and back conditions of a total map from ``g`` to ``h``."""
    for x in range(g.size):
        image = 0
        for y in _bits(g.succ[x]):
            image |= 1 << mapping[y]
        # forth: image of successors lies within successors of the image; back: covers them
        if image != h.succ[mapping[x]]:
            return False
    return True


def exists_surjective_pmorphism(g: Frame, h: Frame) -> bool:
    if g.size < h.size:
        return False
    return find_surjective_pmorphism(g, h) is not None


def find_surjective_pmorphism(g: Frame, h: Frame) -> tuple[int, ...] | None:
    """Backtracking search for a surjective p-morphism ``g -> h``, or None."""
    if g.size < h.size:
        return None
    # assign points in order; forth is checked as soon as both endpoints are placed,
    # back once all successors of a point are placed
    order = list(range(g.size))
    last_succ = [max(_bits(g.succ[x] | 1 << x)) for x in order]
    ready_at: dict[int, list[int]] = {}
    for x in order:
        ready_at.setdefault(last_succ[x], []).append(x)
    full_h = (1 << h.size) - 1
    mapping = [-1] * g.size

    def consistent(x: int) -> bool:
        fx = mapping[x]
        # forth for edges between x and earlier points
        for y in range(x + 1):
            if g.succ[x] >> y & 1 and not h.succ[fx] >> mapping[y] & 1:
                return False
            if g.succ[y] >> x & 1 and not h.succ[mapping[y]] >> fx & 1:
                return False
        for z in ready_at.get(x, ()):
            image = 0
            for y in _bits(g.succ[z]):
                image |= 1 << mapping[y]
            if image != h.succ[mapping[z]]:
                return False
        return True

    def search(x: int, covered: int) -> bool:
        if x == g.size:
            return covered == full_h
        # surjectivity pruning: the remaining points must cover what is missing
        if bin(full_h & ~covered).count("1") > g.size - x:
            return False
        for v in range(h.size):
            mapping[x] = v
            if consistent(x) and search(x + 1, covered | 1 << v):
                return True
        mapping[x] = -1
        return False

    return tuple(mapping) if search(0, 0) else None


# ---------------------------------------------------------------- canonical form

def relabel(f: Frame, perm) -> Frame:
    """Image of ``f`` under the point bijection ``x -> perm[x]``."""
    return Frame.from_edges(f.size, [(perm[i], perm[j]) for i, j in f.edges])


def canonical_form(f: Frame) -> Frame:
    """Relabelling of ``f`` with the lexicographically least sorted edge list."""
    best = None
    for perm in itertools.permutations(range(f.size)):
        cand = tuple(sorted((perm[i], perm[j]) for i, j in f.edges))
        if best is None or cand < best:
            best = cand
    return Frame.from_edges(f.size, best)


def is_isomorphic(f: Frame, g: Frame) -> bool:
    return f.size == g.size and len(f.edges) == len(g.edges) and canonical_form(f) == canonical_form(g)


# ---------------------------------------------------------------- enumeration

def _code_positions(n: int) -> list[int]:
    # edge (i, j) lives at bit n*n-1-(i*n+j): a larger code means a lexicographically
    # smaller sorted edge list among frames with the same number of edges
    return [n * n - 1 - (i * n + j) for i in range(n) for j in range(n)]


def _byte_tables(n: int, perm) -> list[np.ndarray]:
    """Lookup tables mapping each byte of a code to its bits moved by ``perm``."""
    pos = _code_positions(n)
    move = {}
    for i in range(n):
        for j in range(n):
            move[pos[i * n + j]] = pos[perm[i] * n + perm[j]]
    tables = []
    for chunk in range((n * n + 7) // 8):
        table = np.zeros(256, dtype=np.uint32)
        for byte in range(256):
            out = 0
            for b in range(8):
                src = chunk * 8 + b
                if byte >> b & 1 and src in move:
                    out |= 1 << move[src]
            table[byte] = out
        tables.append(table)
    return tables


@cache
def frame_classes(n: int) -> tuple[Frame, ...]:
    """One canonical representative per isomorphism class of frames with ``n`` points."""
    if not 1 <= n <= MAX_ENUMERATION_SIZE:
        raise ValueError(f"enumeration supports 1..{MAX_ENUMERATION_SIZE} points, got {n}")
    identity = tuple(range(n))
    tables = [_byte_tables(n, p) for p in itertools.permutations(range(n)) if p != identity]
    total = 1 << (n * n)
    chunk = 1 << 21
    kept = []
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.uint32)
        # a labelled frame is canonical iff no relabelling has a larger code
        for perm_tables in tables:
            if codes.size == 0:
                break
            image = np.zeros_like(codes)
            for k, table in enumerate(perm_tables):
                image |= table[(codes >> np.uint32(8 * k)) & np.uint32(0xFF)]
            codes = codes[image <= codes]
        kept.append(codes)
    codes = np.concatenate(kept).astype(np.int64)
    width = n * n
    bits = (codes[:, None] >> (width - 1 - np.arange(width))[None, :]) & 1
    # sorted edge-index lists padded with -1 order frames lexicographically by edge list
    ranks = np.where(bits == 1, np.arange(width)[None, :], width)
    ranks.sort(axis=1)
    ranks[ranks == width] = -1
    order = np.lexsort(ranks.T[::-1])
    succ = np.zeros((codes.size, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            succ[:, i] |= bits[:, i * n + j] << j
    return tuple(Frame(n, tuple(int(v) for v in row)) for row in succ[order])


def _passes(f: Frame, filt: FrameFilter) -> bool:
    if filt == "any":
        return True
    if filt == "rooted":
        return is_rooted(f)
    if filt == "rootedCycleFree":
        return is_rooted(f) and is_cycle_free(f)
    raise ValueError(f"unknown frame filter {filt!r}")


@cache
def cycle_free_classes(n: int) -> tuple[Frame, ...]:
    """Canonical cycle-free frames with ``n`` points, without enumerating all frames.

    Every cycle-free frame has a topological labelling, so its class contains
    a frame whose edges all go from smaller to larger points.
    """
    if not 1 <= n <= MAX_ENUMERATION_SIZE:
        raise ValueError(f"enumeration supports 1..{MAX_ENUMERATION_SIZE} points, got {n}")
    slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    found = {}
    for code in range(1 << len(slots)):
        f = canonical_form(Frame.from_edges(n, [e for k, e in enumerate(slots) if code >> k & 1]))
        found[f.key] = f
    return tuple(found[k] for k in sorted(found))


@cache
def _filtered(n: int, filt: FrameFilter) -> tuple[Frame, ...]:
    if filt == "rootedCycleFree":
        return tuple(f for f in cycle_free_classes(n) if is_rooted(f))
    return tuple(f for f in frame_classes(n) if _passes(f, filt))


def enumerate_frames(max_size: int, filt: FrameFilter = "any") -> Iterator[Frame]:
    """Lazily yield one frame per isomorphism class, sizes ascending, canonical order within a size."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    if filt not in ("any", "rooted", "rootedCycleFree"):
        raise ValueError(f"unknown frame filter {filt!r}")
    for n in range(1, max_size + 1):
        yield from _filtered(n, filt)
