"""Modal formulas: AST, parser, printer, substitution and box-prefix builders.

The ASCII grammar, loosest binding first::

    iff   := imp ('<->' imp)*          left-associative
    imp   := or ('->' imp)?            right-associative
    or    := and ('|' and)*            left-associative
    and   := unary ('&' unary)*        left-associative
    unary := ('~' | '[]' | '<>') unary | atom
    atom  := 'p' DIGITS | 'T' | 'F' | '(' iff ')'

Unicode aliases ``⊤ ⊥ ¬ ∧ ∨ → ↔ □ ◇`` are accepted on input.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

_NODES: weakref.WeakValueDictionary = weakref.WeakValueDictionary()


class Formula:
    """Base class of all formula nodes. Nodes are immutable and hashable."""

    # nodes are hash-consed, so equal formulas are usually the same object and
    # equality and hashing stay cheap on the deep trees used as dict keys everywhere
    __slots__ = ("_h", "__weakref__")

    def __new__(cls, *args, **kwargs):
        if kwargs:
            args += tuple(kwargs[n] for n in cls.__match_args__[len(args):])
        key = (cls, args)
        node = _NODES.get(key)
        if node is None:
            node = object.__new__(cls)
            _NODES[key] = node
        return node

    def __reduce__(self):
        return type(self), self._parts()

    def _parts(self) -> tuple:
        return tuple(getattr(self, n) for n in self.__match_args__)

    def __hash__(self) -> int:
        try:
            return self._h
        except AttributeError:
            h = hash((type(self).__name__,) + self._parts())
            object.__setattr__(self, "_h", h)
            return h

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Formula) else False
        return hash(self) == hash(other) and self._parts() == other._parts()

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __str__(self) -> str:
        return to_text(self)

    # operator sugar for building formulas in code and tests
    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __or__(self, other: Formula) -> Formula:
        return Or(self, other)

    def __invert__(self) -> Formula:
        return Not(self)

    def __rshift__(self, other: Formula) -> Formula:
        return Imp(self, other)


@dataclass(frozen=True, slots=True, repr=False, eq=False)
class Var(Formula):
    index: int

    def __post_init__(self) -> None:
        if not isinstance(self.index, int) or self.index < 0:
            raise ValueError(f"variable index must be a non-negative integer, got {self.index!r}")

    def __repr__(self) -> str:
        return f"Var({self.index})"


@dataclass(frozen=True, slots=True, repr=False, eq=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True, slots=True, repr=False, eq=False)
class Bot(Formula):
    def __repr__(self) -> str:
        return "Bot()"


@dataclass(frozen=True, slots=True, repr=False, eq=False)
class Not(Formula):
    arg: Formula

    def __repr__(self) -> str:
        return f"Not({self.arg!r})"


@dataclass(frozen=True, slots=True, repr=False, eq=False)
class Box(Formula):
    arg: Formula

    def __repr__(self) -> str:
        return f"Box({self.arg!r})"


@dataclass(frozen=True, slots=True, repr=False, eq=False)
class Dia(Formula):
    arg: Formula

    def __repr__(self) -> str:
        return f"Dia({self.arg!r})"


@dataclass(frozen=True, slots=True, repr=False, eq=False)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, slots=True, repr=False, eq=False)
class Or(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Or({self.left!r}, {self.right!r})"


@dataclass(frozen=True, slots=True, repr=False, eq=False)
class Imp(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Imp({self.left!r}, {self.right!r})"


@dataclass(frozen=True, slots=True, repr=False, eq=False)
class Iff(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Iff({self.left!r}, {self.right!r})"


TOP = Top()
BOT = Bot()

UNARY = (Not, Box, Dia)
BINARY = (And, Or, Imp, Iff)

Substitution = Mapping[int, Formula]


# ---------------------------------------------------------------- builders

def conj(parts: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is ``T``."""
    items = list(parts)
    if not items:
        return TOP
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    """Right-nested disjunction; the empty disjunction is ``F``."""
    items = list(parts)
    if not items:
        return BOT
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


def box_power(n: int, f: Formula) -> Formula:
    """``[]`` applied ``n`` times."""
    if n < 0:
        raise ValueError("n must be non-negative")
    for _ in range(n):
        f = Box(f)
    return f


def box_leq(n: int, f: Formula) -> Formula:
    """``f & []f & ... & []^n f`` as a right-nested conjunction, lowest degree first."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return conj(box_power(k, f) for k in range(n + 1))


# ---------------------------------------------------------------- traversal

def substitute(f: Formula, s: Substitution) -> Formula:
    """Simultaneous substitution of ``s[i]`` for every ``p_i`` in the domain of ``s``."""
    if not s:
        return f
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(g)
        if hit is not None:
            return hit
        if isinstance(g, Var):
            out = s.get(g.index, g)
        elif isinstance(g, (Top, Bot)):
            out = g
        elif isinstance(g, UNARY):
            out = type(g)(go(g.arg))
        else:
            out = type(g)(go(g.left), go(g.right))
        memo[g] = out
        return out

    return go(f)


def match(pattern: Formula, target: Formula) -> dict[int, Formula] | None:
    """A substitution ``s`` with ``substitute(pattern, s) == target``, or None."""
    binding: dict[int, Formula] = {}
    seen: set[tuple[Formula, Formula]] = set()
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if (p, t) in seen:
            continue
        seen.add((p, t))
        if isinstance(p, Var):
            bound = binding.setdefault(p.index, t)
            if bound != t:
                return None
        elif type(p) is not type(t):
            return None
        elif isinstance(p, UNARY):
            stack.append((p.arg, t.arg))
        elif isinstance(p, BINARY):
            stack.append((p.left, t.left))
            stack.append((p.right, t.right))
    return binding


def modal_depth(f: Formula) -> int:
    if isinstance(f, (Var, Top, Bot)):
        return 0
    if isinstance(f, Not):
        return modal_depth(f.arg)
    if isinstance(f, (Box, Dia)):
        return 1 + modal_depth(f.arg)
    return max(modal_depth(f.left), modal_depth(f.right))


def depth(f: Formula) -> int:
    """Syntactic nesting depth of connectives (atoms have depth 0)."""
    if isinstance(f, (Var, Top, Bot)):
        return 0
    if isinstance(f, UNARY):
        return 1 + depth(f.arg)
    return 1 + max(depth(f.left), depth(f.right))


@lru_cache(maxsize=1 << 14)
def variables(f: Formula) -> frozenset[int]:
    out: set[int] = set()
    seen: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if isinstance(g, Var):
            out.add(g.index)
        elif isinstance(g, UNARY):
            stack.append(g.arg)
        elif isinstance(g, BINARY):
            stack.append(g.left)
            stack.append(g.right)
    return frozenset(out)


def subformulas(f: Formula) -> set[Formula]:
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, UNARY):
            stack.append(g.arg)
        elif isinstance(g, BINARY):
            stack.append(g.left)
            stack.append(g.right)
    return out


# ---------------------------------------------------------------- printing

_PREC = {Iff: 1, Imp: 2, Or: 3, And: 4}
_SYMBOL = {Iff: "<->", Imp: "->", Or: "|", And: "&"}
_RIGHT_ASSOC = {Imp}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 5)


def to_text(f: Formula) -> str:
    """Print with the fewest parentheses that still parse back to ``f``."""
    if isinstance(f, Var):
        return f"p{f.index}"
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    if isinstance(f, UNARY):
        op = {Not: "~", Box: "[]", Dia: "<>"}[type(f)]
        inner = to_text(f.arg)
        if _prec(f.arg) < 5:
            inner = f"({inner})"
        return op + inner
    kind = type(f)
    p = _PREC[kind]
    left, right = to_text(f.left), to_text(f.right)
    lp, rp = _prec(f.left), _prec(f.right)
    if lp < p or (lp == p and kind in _RIGHT_ASSOC):
        left = f"({left})"
    if rp < p or (rp == p and kind not in _RIGHT_ASSOC):
        right = f"({right})"
    return f"{left} {_SYMBOL[kind]} {right}"


# ---------------------------------------------------------------- parsing

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


_ALIASES = {
    "⊤": "T", "⊥": "F", "¬": "~", "∧": "&", "∨": "|",
    "→": "->", "↔": "<->", "□": "[]", "◇": "<>",
}
_MULTI = ("<->", "->", "[]", "<>")
_SINGLE = set("~&|()TF")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _ALIASES:
            tokens.append((_ALIASES[c], i))
            i += 1
            continue
        for m in _MULTI:
            if text.startswith(m, i):
                tokens.append((m, i))
                i += len(m)
                break
        else:
            if c == "p":
                j = i + 1
                while j < len(text) and text[j].isdigit():
                    j += 1
                if j == i + 1:
                    raise FormulaSyntaxError("variable name needs an index", text, i)
                tokens.append((text[i:j], i))
                i = j
            elif c in _SINGLE:
                tokens.append((c, i))
                i += 1
            else:
                raise FormulaSyntaxError(f"unexpected character {c!r}", text, i)
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def where(self) -> int:
        return self.tokens[self.pos][1] if self.pos < len(self.tokens) else len(self.text)

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", self.text, self.where())
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek() is not None:
            raise FormulaSyntaxError(f"unexpected token {self.peek()!r}", self.text, self.where())
        return f

    def iff(self) -> Formula:
        f = self.imp()
        while self.peek() == "<->":
            self.take()
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.or_()
        if self.peek() == "->":
            self.take()
            return Imp(f, self.imp())
        return f

    def or_(self) -> Formula:
        f = self.and_()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "[]":
            self.take()
            return Box(self.unary())
        if tok == "<>":
            self.take()
            return Dia(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        at = self.where()
        tok = self.take()
        if tok == "T":
            return TOP
        if tok == "F":
            return BOT
        if tok.startswith("p"):
            return Var(int(tok[1:]))
        if tok == "(":
            f = self.iff()
            if self.peek() != ")":
                raise FormulaSyntaxError("expected ')'", self.text, self.where())
            self.take()
            return f
        raise FormulaSyntaxError(f"unexpected token {tok!r}", self.text, at)


def parse(text: str) -> Formula:
    """Parse ASCII (or Unicode) formula text into an AST."""
    return _Parser(text).parse()
