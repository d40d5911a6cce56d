"""Text syntax for formulas and words.

Grammar (lowest precedence first)::

    formula  := imp ("<->" imp)*                  left-associative
    imp      := disj ("->" imp)?                  right-associative
    disj     := conj ("|" conj)*
    conj     := unary ("&" unary)*
    unary    := "~" unary | "K" AGENT unary | "Khat" AGENT unary
              | "<" word ">" unary | "[" word "]" unary | primary
    primary  := "T" | "F" | "empty" | ATOM | "(" formula ")"
    word     := "eps" | letter ("." letter)*
    letter   := AGENT | "$" NAME | formula

Identifiers are lowercase; whether one is an atom or an agent is decided by
the declared sets.  ``<a>`` with ``a`` an agent is reception, anything else
inside brackets is a word and folds to nested modalities.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

from .errors import AmbiguityError, FormulaSyntaxError, LexError
from .syntax import (BOT, TOP, Atom, Formula, HatK, Not, Recv, Send, conj,
                     disj, empty_formula, iff, implies, know)

RESERVED = frozenset({"T", "F", "K", "Khat", "empty", "eps"})
IDENT = re.compile(r"[a-z][a-z0-9_]*\Z")

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><->|->|[~|&()<>\[\].$])
  | (?P<name>Khat|[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)

_UNICODE = {"⊤": "T", "⊥": "F", "¬": "~", "∨": "|", "∧": "&", "→": "->",
            "↔": "<->", "⟨": "<", "⟩": ">", "ε": "eps", "K̂": "Khat "}


def tokenize(text: str) -> list:
    """List of ``(kind, value, pos)``; kind is ``op``, ``name`` or ``end``."""
    out = []
    pos = 0
    while pos < len(text):
        for u, ascii_ in _UNICODE.items():
            if text.startswith(u, pos):
                out.append(("name" if ascii_[0].isalpha() else "op", ascii_.strip(), pos))
                pos += len(u)
                break
        else:
            m = _TOKEN.match(text, pos)
            if m is None:
                raise LexError(f"unexpected character {text[pos]!r}", pos, text)
            if m.lastgroup != "ws":
                out.append((m.lastgroup, m.group(), pos))
            pos = m.end()
    out.append(("end", "", len(text)))
    return out


def check_vocabulary(agents: Iterable[str], atoms: Iterable[str]) -> None:
    agents, atoms = set(agents), set(atoms)
    for name in agents | atoms:
        if not IDENT.match(name) or name in RESERVED:
            raise ValueError(f"{name!r} is not a usable identifier")
    clash = agents & atoms
    if clash:
        raise ValueError(f"identifiers declared as both agent and atom: {sorted(clash)}")


class _Parser:
    def __init__(self, text: str, agents, atoms, bindings):
        self.text = text
        self.agents = frozenset(agents)
        self.atoms = frozenset(atoms)
        self.bindings = bindings or {}
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers
    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str, k: int = 0) -> bool:
        kind, v, _ = self.peek(k)
        return kind != "end" and v == value

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.peek()
        if kind == "end" or v != value:
            what = "end of input" if kind == "end" else repr(v)
            raise FormulaSyntaxError(f"expected {value!r}, found {what}", pos, self.text)
        return self.take()

    def fail(self, message: str, pos=None):
        if pos is None:
            pos = self.peek()[2]
        raise FormulaSyntaxError(message, pos, self.text)

    def agent(self) -> str:
        kind, v, pos = self.take()
        if kind != "name" or v not in self.agents:
            if kind == "name" and v not in self.atoms and v not in RESERVED:
                raise AmbiguityError(f"{v!r} is not a declared agent", pos, self.text)
            self.fail("expected an agent name", pos)
        return v

    # -- grammar
    def formula(self) -> Formula:
        f = self.imp()
        while self.at("<->"):
            self.take()
            f = iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.disj()
        if self.at("->"):
            self.take()
            return implies(f, self.imp())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("|"):
            self.take()
            f = disj(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.take()
            f = conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, v, pos = self.peek()
        if kind == "op" and v == "~":
            self.take()
            return Not(self.unary())
        if kind == "name" and v == "K":
            self.take()
            a = self.agent()
            return know(a, self.unary())
        if kind == "name" and v == "Khat":
            self.take()
            a = self.agent()
            return HatK(a, self.unary())
        if kind == "op" and v in "<[":
            self.take()
            w = self.word(">" if v == "<" else "]")
            body = self.unary()
            return fold(w, body, box=(v == "["))
        return self.primary()

    def primary(self) -> Formula:
        kind, v, pos = self.take()
        if kind == "op" and v == "(":
            f = self.formula()
            self.expect(")")
            return f
        if kind == "name":
            if v == "T":
                return TOP
            if v == "F":
                return BOT
            if v == "empty":
                return empty_formula(self.agents)
            if v in self.atoms:
                return Atom(v)
            if v in self.agents:
                self.fail(f"agent {v!r} used where a formula is expected", pos)
            if v in RESERVED:
                self.fail(f"unexpected {v!r}", pos)
            raise AmbiguityError(f"{v!r} is neither a declared atom nor a declared agent",
                                 pos, self.text)
        if kind == "end":
            self.fail("unexpected end of input", pos)
        self.fail(f"unexpected {v!r}", pos)

    def word(self, close: str | None) -> tuple:
        if self.peek()[0] == "name" and self.peek()[1] == "eps":
            self.take()
            if close:
                self.expect(close)
            return ()
        letters: list = []
        while True:
            letters.extend(self.letter(close))
            if self.at("."):
                self.take()
                continue
            break
        if close:
            self.expect(close)
        return tuple(letters)

    def letter(self, close) -> tuple:
        kind, v, pos = self.peek()
        if kind == "op" and v == "$":
            self.take()
            kind, name, npos = self.take()
            if kind != "name":
                self.fail("expected a metavariable name after '$'", npos)
            if name not in self.bindings:
                raise FormulaSyntaxError(f"unbound word metavariable ${name}", npos, self.text)
            return tuple(self.bindings[name])
        if kind == "name" and v in self.agents:
            nxt = self.peek(1)
            if nxt[1] == "." or (close and nxt[1] == close) or nxt[0] == "end":
                self.take()
                return (v,)
        return (self.formula(),)


def fold(w, body: Formula, box: bool = False) -> Formula:
    """``<w>body`` as nested modalities, or ``[w]body`` when ``box`` is set.

    ``<eps>body`` and ``[eps]body`` are both ``body`` itself.
    """
    if not w:
        return body
    f = Not(body) if box else body
    for x in reversed(w):
        f = Recv(x, f) if isinstance(x, str) else Send(x, f)
    return Not(f) if box else f


def parse_formula(text: str, agents: Iterable[str], atoms: Iterable[str],
                  bindings: Mapping[str, tuple] | None = None) -> Formula:
    agents, atoms = tuple(agents), tuple(atoms)
    check_vocabulary(agents, atoms)
    p = _Parser(text, agents, atoms, bindings)
    f = p.formula()
    kind, v, pos = p.peek()
    if kind != "end":
        p.fail(f"unexpected {v!r}", pos)
    return f


def parse_word(text: str, agents: Iterable[str], atoms: Iterable[str],
               bindings: Mapping[str, tuple] | None = None) -> tuple:
    agents, atoms = tuple(agents), tuple(atoms)
    check_vocabulary(agents, atoms)
    p = _Parser(text, agents, atoms, bindings)
    w = p.word(None)
    kind, v, pos = p.peek()
    if kind != "end":
        p.fail(f"unexpected {v!r}", pos)
    return w
