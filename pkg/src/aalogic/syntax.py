"""Formula AST for the language of asynchronous announcements.

Seven primitive constructors: ``Atom``, ``Top``, ``Not``, ``Or``, ``HatK``
(the diamond of knowledge), ``Send`` (announcement ``<mu>phi``) and ``Recv``
(reception ``<a>phi``).  Every derived connective is a plain function that
builds primitives.

Formula nodes are hash-consed: constructing the same structure twice returns
the same object, so ``==`` and ``hash`` are identity-based and O(1).  This
matters because the evaluator memoises on ``(state, word, formula)``.
"""

from __future__ import annotations

import warnings
from functools import lru_cache
from typing import Iterable

__all__ = [
    "Formula", "Atom", "Top", "Not", "Or", "HatK", "Send", "Recv",
    "TOP", "BOT", "neg", "disj", "conj", "implies", "iff", "know",
    "box_ann", "box_recv", "conjunction", "empty_formula",
    "SingleAgentWarning", "size", "deg", "subformulas", "atoms_of",
    "agents_of", "normalize", "print_formula", "pretty_formula",
    "as_implication", "as_conjunction", "as_iff", "as_know", "split_box",
]

_TABLE: dict = {}


class Formula:
    """Base class of all formula nodes.  Instances are interned and immutable."""

    __slots__ = ("size", "deg", "__weakref__")

    def __setattr__(self, key, value):
        raise AttributeError("formulas are immutable")

    def __delattr__(self, key):
        raise AttributeError("formulas are immutable")

    def __reduce__(self):
        return (type(self), tuple(getattr(self, n) for n in self.__match_args__))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __repr__(self) -> str:
        args = ", ".join(repr(getattr(self, n)) for n in self.__match_args__)
        return f"{type(self).__name__}({args})"

    def __str__(self) -> str:
        return print_formula(self)


def _intern(cls, key, fields: dict, size_: int, deg_: int):
    f = _TABLE.get(key)
    if f is None:
        f = object.__new__(cls)
        for name, value in fields.items():
            object.__setattr__(f, name, value)
        object.__setattr__(f, "size", size_)
        object.__setattr__(f, "deg", deg_)
        _TABLE[key] = f
    return f


def _check(x):
    if not isinstance(x, Formula):
        raise TypeError(f"expected a Formula, got {x!r}")
    return x


class Atom(Formula):
    __slots__ = ("name",)
    __match_args__ = ("name",)

    def __new__(cls, name: str):
        if not isinstance(name, str) or not name:
            raise TypeError(f"atom name must be a non-empty string, got {name!r}")
        return _intern(cls, (cls, name), {"name": name}, 2, 0)


class Top(Formula):
    __slots__ = ()
    __match_args__ = ()

    def __new__(cls):
        return _intern(cls, (cls,), {}, 1, 0)


class Not(Formula):
    __slots__ = ("sub",)
    __match_args__ = ("sub",)

    def __new__(cls, sub: Formula):
        _check(sub)
        return _intern(cls, (cls, sub), {"sub": sub}, sub.size + 1, sub.deg)


class Or(Formula):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")

    def __new__(cls, left: Formula, right: Formula):
        _check(left), _check(right)
        return _intern(cls, (cls, left, right), {"left": left, "right": right},
                       left.size + right.size, max(left.deg, right.deg))


class HatK(Formula):
    """``Khat_a phi``: agent ``a`` considers ``phi`` possible."""

    __slots__ = ("agent", "sub")
    __match_args__ = ("agent", "sub")

    def __new__(cls, agent: str, sub: Formula):
        _check(sub)
        return _intern(cls, (cls, agent, sub), {"agent": agent, "sub": sub},
                       sub.size + 1, sub.deg + 1)


class Send(Formula):
    """``<ann>sub``: ``ann`` is broadcast, after which ``sub`` holds."""

    __slots__ = ("ann", "sub")
    __match_args__ = ("ann", "sub")

    def __new__(cls, ann: Formula, sub: Formula):
        _check(ann), _check(sub)
        return _intern(cls, (cls, ann, sub), {"ann": ann, "sub": sub},
                       2 * ann.size + sub.size, ann.deg + sub.deg)


class Recv(Formula):
    """``<a>sub``: agent ``a`` reads its next message, after which ``sub`` holds."""

    __slots__ = ("agent", "sub")
    __match_args__ = ("agent", "sub")

    def __new__(cls, agent: str, sub: Formula):
        _check(sub)
        return _intern(cls, (cls, agent, sub), {"agent": agent, "sub": sub},
                       sub.size + 2, sub.deg)


TOP = Top()
BOT = Not(TOP)


# -- derived connectives ------------------------------------------------------

def neg(f: Formula) -> Formula:
    return Not(f)


def disj(f: Formula, g: Formula) -> Formula:
    return Or(f, g)


def conj(f: Formula, g: Formula) -> Formula:
    return Not(Or(Not(f), Not(g)))


def implies(f: Formula, g: Formula) -> Formula:
    return Or(Not(f), g)


def iff(f: Formula, g: Formula) -> Formula:
    return conj(implies(f, g), implies(g, f))


def know(agent: str, f: Formula) -> Formula:
    return Not(HatK(agent, Not(f)))


def box_ann(ann: Formula, f: Formula) -> Formula:
    return Not(Send(ann, Not(f)))


def box_recv(agent: str, f: Formula) -> Formula:
    return Not(Recv(agent, Not(f)))


def conjunction(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``T``."""
    result = None
    for p in parts:
        result = p if result is None else conj(result, p)
    return TOP if result is None else result


class SingleAgentWarning(UserWarning):
    """``empty`` does not characterise the empty history with one agent."""


def empty_formula(agents: Iterable[str]) -> Formula:
    """``/\\_a [a]F  &  /\\_{a,b} K_a [b]F`` over the sorted agent set."""
    agents = sorted(set(agents))
    if not agents:
        raise ValueError("empty needs at least one agent")
    if len(agents) == 1:
        warnings.warn("with a single agent, `empty` does not characterise the "
                      "empty history", SingleAgentWarning, stacklevel=2)
    return _empty(tuple(agents))


@lru_cache(maxsize=None)
def _empty(agents: tuple) -> Formula:
    parts = [box_recv(a, BOT) for a in agents]
    parts += [know(a, box_recv(b, BOT)) for a in agents for b in agents]
    return conjunction(parts)


# -- measures -----------------------------------------------------------------

def size(f: Formula) -> int:
    """The weight ``||f||`` used by the termination order."""
    return f.size


def deg(f: Formula) -> int:
    """Epistemic modal depth; announcements add the depth of their content."""
    return f.deg


def _children(f: Formula) -> tuple:
    match f:
        case Not(sub) | HatK(_, sub) | Recv(_, sub):
            return (sub,)
        case Or(left, right):
            return (left, right)
        case Send(ann, sub):
            return (ann, sub)
    return ()


@lru_cache(maxsize=None)
def subformulas(f: Formula) -> frozenset:
    out = {f}
    for c in _children(f):
        out |= subformulas(c)
    return frozenset(out)


@lru_cache(maxsize=None)
def atoms_of(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset((f.name,))
    out = frozenset()
    for c in _children(f):
        out |= atoms_of(c)
    return out


@lru_cache(maxsize=None)
def agents_of(f: Formula) -> frozenset:
    out = frozenset((f.agent,)) if isinstance(f, (HatK, Recv)) else frozenset()
    for c in _children(f):
        out |= agents_of(c)
    return out


@lru_cache(maxsize=None)
def normalize(f: Formula) -> Formula:
    """Remove every double negation, bottom-up.

    ``~~phi`` and ``phi`` agree at every state/word pair (both are false when
    the word is not executable), so this is a semantic identity.
    """
    match f:
        case Not(Not(inner)):
            return normalize(inner)
        case Not(sub):
            n = normalize(sub)
            return n.sub if isinstance(n, Not) else Not(n)
        case Or(left, right):
            return Or(normalize(left), normalize(right))
        case HatK(a, sub):
            return HatK(a, normalize(sub))
        case Send(ann, sub):
            return Send(normalize(ann), normalize(sub))
        case Recv(a, sub):
            return Recv(a, normalize(sub))
    return f


# -- shape recognisers (inverse of the derived connectives) ---------------------

def as_implication(f: Formula):
    if isinstance(f, Or) and isinstance(f.left, Not):
        return f.left.sub, f.right
    return None


def as_conjunction(f: Formula):
    match f:
        case Not(Or(Not(x), Not(y))):
            return x, y
    return None


def as_iff(f: Formula):
    parts = as_conjunction(f)
    if parts is None:
        return None
    fwd, bwd = as_implication(parts[0]), as_implication(parts[1])
    if fwd and bwd and fwd[0] is bwd[1] and fwd[1] is bwd[0]:
        return fwd
    return None


def as_know(f: Formula):
    match f:
        case Not(HatK(a, Not(x))):
            return a, x
    return None


def split_box(f: Formula):
    """Split ``~<l1>...<ln>~phi`` (n >= 1) into ``((l1, ..., ln), phi)``.

    Letters are agent names (``Recv``) or formulas (``Send``).  Returns None
    when ``f`` does not have that shape.  The split is unique: the modal chain
    must be maximal because the node right after it has to be a negation.
    """
    if not isinstance(f, Not):
        return None
    letters = []
    g = f.sub
    while True:
        if isinstance(g, Send):
            letters.append(g.ann)
        elif isinstance(g, Recv):
            letters.append(g.agent)
        else:
            break
        g = g.sub
    if not letters or not isinstance(g, Not):
        return None
    return tuple(letters), g.sub


# -- printers -------------------------------------------------------------------

def print_formula(f: Formula) -> str:
    """Canonical primitive-only text; ``parse_formula`` inverts it exactly."""
    match f:
        case Atom(name):
            return name
        case Top():
            return "T"
        case Not(sub):
            return "~" + print_formula(sub)
        case Or(left, right):
            return f"({print_formula(left)} | {print_formula(right)})"
        case HatK(a, sub):
            return f"Khat {a} {print_formula(sub)}"
        case Send(ann, sub):
            return f"<{print_formula(ann)}>{print_formula(sub)}"
        case Recv(a, sub):
            return f"<{a}>{print_formula(sub)}"
    raise TypeError(f"not a formula: {f!r}")


def _letter_text(letter, show) -> str:
    if isinstance(letter, str):
        return letter
    text = show(letter)
    if isinstance(letter, (Atom, Top)) or (text.startswith("(") and _balanced_outer(text)):
        return text
    return f"({text})"


def _balanced_outer(text: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0 and i < len(text) - 1:
            return False
    return True


def pretty_formula(f: Formula, agents: Iterable[str] | None = None) -> str:
    """Readable text using the abbreviations (``->``, ``&``, ``K``, ``[..]``, ``F``).

    Each abbreviation is printed only where the node is exactly its
    desugaring, so the output parses back to the same structure.  With
    ``agents`` given, occurrences of the ``empty`` formula print as ``empty``.
    """
    empty = _empty(tuple(sorted(set(agents)))) if agents else None

    def show(g: Formula) -> str:
        if g is empty:
            return "empty"
        if g is BOT:
            return "F"
        parts = as_iff(g)
        if parts:
            return f"({show(parts[0])} <-> {show(parts[1])})"
        parts = as_conjunction(g)
        if parts:
            return f"({show(parts[0])} & {show(parts[1])})"
        parts = as_know(g)
        if parts:
            return f"K {parts[0]} {show(parts[1])}"
        parts = split_box(g)
        if parts:
            letters, body = parts
            inside = ".".join(_letter_text(x, show) for x in letters)
            return f"[{inside}]{show(body)}"
        parts = as_implication(g)
        if parts:
            return f"({show(parts[0])} -> {show(parts[1])})"
        match g:
            case Atom(name):
                return name
            case Top():
                return "T"
            case Not(sub):
                return "~" + show(sub)
            case Or(left, right):
                return f"({show(left)} | {show(right)})"
            case HatK(a, sub):
                return f"Khat {a} {show(sub)}"
            case Send(ann, sub):
                return f"<{show(ann)}>{show(sub)}"
            case Recv(a, sub):
                return f"<{a}>{show(sub)}"
        raise TypeError(f"not a formula: {g!r}")

    return show(f)
