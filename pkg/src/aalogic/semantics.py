"""Executability and satisfaction, plus the history-only variant.

Evaluation works on sets of states (Python int bitmasks), one bit per state
in model order.  Two tables drive it:

``E(w)``
    states where ``w`` is executable.  This depends on the exact word.
``G(w, f)``
    states where ``f`` holds at ``w``, read under the hypothesis that ``w``
    is executable there.  Satisfaction implies executability, so
    ``s, w |= f`` iff ``s`` is in ``E(w) & G(w, f)``.

Apart from executability, every clause inspects ``w`` only through its
announcement sequence and per-agent reception counts (``can_receive``,
appending a letter, and the views, which depend on what was read).  ``G`` is
therefore a function of that pair.  Most formulas see much less of it: a
``Khat_a`` formula only what ``a`` has read, a modality-free formula nothing
at all.  ``features`` works out, per formula, which parts of the key matter,
and the ``G`` memo is keyed on those parts only.

``check_measure=True`` checks every recursive call against its caller.
Measures: ``G(w, f)`` is ``(deg(w, f), ||w|| + ||f||, 1)`` and ``E(w)`` is
``(deg(w, T), ||w|| + 1, 0)``.  On G-to-G edges this is exactly the order
``<<``; the last component breaks the tie between ``E(w)`` and the
``G(w', f)`` it needs for ``w = w' f``.

The guard-free relations used for comparison are evaluated state by state,
directly from their defining clauses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import NotAHistory, UnknownAgent, UnknownAtom
from .models import EpistemicModel
from .parsing import fold
from .syntax import (Atom, Formula, HatK, Not, Or, Recv, Send, Top,
                     agents_of, atoms_of)
from .words import can_receive, format_word, is_history, views


@dataclass
class Stats:
    g_evals: int = 0        # memo misses only
    e_evals: int = 0
    edges_checked: int = 0
    violations: int = 0
    max_measure: tuple = ()
    first_violation: tuple | None = field(default=None, repr=False)


@lru_cache(maxsize=None)
def features(f: Formula) -> frozenset:
    """The parts of a word key that ``G(., f)`` depends on.

    With ``anns, counts = key``, a feature is either ``("R", a, j)``, the
    slice ``anns[:counts[a] + j]``, or ``("C", a, j)``, the test
    ``counts[a] + j < len(anns)``.  ``G(k, f)`` is a function of the feature
    values of ``k``; the rules below follow the clauses:

    * ``Khat_a g`` reads the views of ``anns[:counts[a]]``.
    * ``<a>g`` tests ``C(a, 0)`` and then looks at ``k + a``, where every
      ``a``-feature of ``g`` is shifted by one.
    * ``<h>g`` looks at ``k`` for ``h`` and at ``k + h`` for ``g``.  There,
      ``C(b, j)`` becomes ``C(b, j - 1)``, and ``R(b, j)`` grows by ``h``
      exactly when ``C(b, j - 1)`` fails.
    """
    match f:
        case Atom() | Top():
            return frozenset()
        case Not(sub):
            return features(sub)
        case Or(left, right):
            return features(left) | features(right)
        case HatK(a, _):
            return frozenset({("R", a, 0)})
        case Recv(a, sub):
            out = {("C", a, 0)}
            for kind, b, j in features(sub):
                out.add((kind, b, j + 1) if b == a else (kind, b, j))
            return frozenset(out)
        case Send(ann, sub):
            out = set(features(ann))
            for kind, b, j in features(sub):
                if kind == "R":
                    out.add(("R", b, j))
                    if j > 0:
                        out.add(("C", b, j - 1))
                else:
                    out.add(("C", b, j - 1))
            return frozenset(out)
    raise TypeError(f"not a formula: {f!r}")


@lru_cache(maxsize=None)
def boolean_form(f: Formula) -> tuple:
    """``(leaves, fn)``: the maximal non-Boolean subformulas of ``f`` and a
    function ``fn(A, G, k, leaves)`` returning the mask of ``f`` at key ``k``,
    where ``A`` is the full mask and ``G`` evaluates a leaf.

    Derived connectives expand into deep ``~``/``|`` skeletons; compiling the
    skeleton to straight-line bit operations costs one call per modal leaf
    instead of one per node.  ``|`` still skips its right side once the left
    side is already ``A`` (and a negated ``|`` once it is empty).
    """
    leaves: list = []
    index: dict = {}
    lines: list = []
    fresh = iter(range(1 << 30))

    def emit(g, neg: bool, ind: str) -> str:
        v = f"v{next(fresh)}"
        if isinstance(g, Not):
            return emit(g.sub, not neg, ind)
        if isinstance(g, Or):
            x = emit(g.left, neg, ind)
            lines.append(f"{ind}if {x}:" if neg else f"{ind}if {x} != A:")
            y = emit(g.right, neg, ind + "    ")
            lines.append(f"{ind}    {x} {'&' if neg else '|'}= {y}")
            return x
        if isinstance(g, Top):
            lines.append(f"{ind}{v} = {'0' if neg else 'A'}")
            return v
        if g not in index:
            index[g] = len(leaves)
            leaves.append(g)
        call = f"G(k, L[{index[g]}])"
        lines.append(f"{ind}{v} = A & ~{call}" if neg else f"{ind}{v} = {call}")
        return v

    out = emit(f, False, "    ")
    src = "def fn(A, G, k, L):\n" + "\n".join(lines) + f"\n    return {out}\n"
    scope: dict = {}
    exec(src, scope)  # source built above from the formula tree only
    return tuple(leaves), scope["fn"]


class EvalContext:
    """A model plus memo tables.  One context per model; safe to reuse."""

    def __init__(self, model: EpistemicModel, check_measure: bool = False):
        self.model = model
        self.agents = tuple(sorted(model.agents))
        self._aidx = {a: i for i, a in enumerate(self.agents)}
        self.bit = {s: 1 << i for i, s in enumerate(model.states)}
        self.all = (1 << len(model.states)) - 1
        self._val = {p: self._mask(model.valuation.get(p, ())) for p in model.atoms}
        self._classes = {a: [self._mask(b) for b in model.partitions[a]] for a in self.agents}
        self.memo_sat: dict = {}        # (formula, feature values) -> G mask
        self.memo_exec: dict = {}       # word -> E mask
        self.memo_sat_minus: dict = {}  # (state, word, formula) -> bool
        self.memo_exec_minus: dict = {}  # (state, word) -> bool
        self._spec: dict = {}
        self.stats = Stats()
        self.check_measure = check_measure
        self._stack: list = []
        if check_measure:
            self._g, self._e = self._g_checked, self._e_checked
            self._sat_m, self._exec_m = self._sat_minus_checked, self._exec_minus_checked
        else:
            self._g, self._e = self._g_plain, self._e_plain
            self._sat_m, self._exec_m = self._sat_minus_plain, self._exec_minus_plain

    def _mask(self, states) -> int:
        m = 0
        for s in states:
            m |= self.bit[s]
        return m

    def states_of(self, mask: int) -> list:
        return [s for s in self.model.states if mask & self.bit[s]]

    # -- input checks
    def _check_word(self, w) -> tuple:
        w = tuple(w)
        for x in w:
            if isinstance(x, str):
                if x not in self._aidx:
                    raise UnknownAgent(f"unknown agent {x!r}")
            else:
                self._check_formula(x)
        return w

    def _check_formula(self, f: Formula) -> None:
        bad = agents_of(f) - set(self.agents)
        if bad:
            raise UnknownAgent(f"unknown agent {sorted(bad)[0]!r}")
        bad = atoms_of(f) - set(self.model.atoms)
        if bad:
            raise UnknownAtom(f"unknown atom {sorted(bad)[0]!r}")

    def key(self, w) -> tuple:
        """``(announcements, reception counts)``: all of ``w`` that G can see."""
        counts = [0] * len(self.agents)
        anns = []
        for x in w:
            if isinstance(x, str):
                counts[self._aidx[x]] += 1
            else:
                anns.append(x)
        return (tuple(anns), tuple(counts))

    # -- public API
    def exec_mask(self, w) -> int:
        """States where ``w`` is executable."""
        return self._e(self._check_word(w))

    def sat_mask(self, w, f: Formula) -> int:
        """States ``s`` with ``s, w |= f``."""
        w = self._check_word(w)
        self._check_formula(f)
        if not is_history(w):
            return 0
        e = self._e(w)
        return e & self._g(self.key(w), f) if e else 0

    def executable(self, s, w) -> bool:
        self.model.check_state(s)
        return bool(self.exec_mask(w) & self.bit[s])

    def evaluate(self, s, w, f: Formula) -> bool:
        self.model.check_state(s)
        return bool(self.sat_mask(w, f) & self.bit[s])

    def executable_minus(self, s, w) -> bool:
        self.model.check_state(s)
        w = self._check_word(w)
        if not is_history(w):
            raise NotAHistory(f"{format_word(w)} is not a history")
        return self._exec_m(s, w)

    def evaluate_minus(self, s, w, f: Formula) -> bool:
        self.model.check_state(s)
        w = self._check_word(w)
        self._check_formula(f)
        if not is_history(w):
            raise NotAHistory(f"{format_word(w)} is not a history")
        return self._sat_m(s, w, f)

    # -- instrumentation
    def _enter(self, m: tuple) -> None:
        st = self.stats
        if self._stack:
            st.edges_checked += 1
            if not m < self._stack[-1]:
                st.violations += 1
                if st.first_violation is None:
                    st.first_violation = (self._stack[-1], m)
        elif m > st.max_measure:
            st.max_measure = m
        self._stack.append(m)

    @staticmethod
    def _key_measure(k, f) -> tuple:
        anns, counts = k
        return (sum(x.deg for x in anns) + f.deg,
                sum(x.size for x in anns) + sum(counts) + f.size, 1)

    @staticmethod
    def _word_measure(w, f=None) -> tuple:
        d = sz = 0
        for x in w:
            if isinstance(x, str):
                sz += 1
            else:
                d += x.deg
                sz += x.size
        if f is None:
            return (d, sz + 1, 0)
        return (d + f.deg, sz + f.size, 1)

    def _g_checked(self, k, f):
        self._enter(self._key_measure(k, f))
        try:
            return self._g_plain(k, f)
        finally:
            self._stack.pop()

    def _e_checked(self, w):
        self._enter(self._word_measure(w))
        try:
            return self._e_plain(w)
        finally:
            self._stack.pop()

    def _sat_minus_checked(self, s, w, f):
        self._enter(self._word_measure(w, f))
        try:
            return self._sat_minus_plain(s, w, f)
        finally:
            self._stack.pop()

    def _exec_minus_checked(self, s, w):
        self._enter(self._word_measure(w))
        try:
            return self._exec_minus_plain(s, w)
        finally:
            self._stack.pop()

    # -- the relations
    def _khat(self, read: tuple, a: str, sub: Formula) -> int:
        """States ``t`` with ``t, beta |= sub`` for some view ``beta`` of ``read``.

        The views are walked as a tree of prefixes, so executability is built
        up one letter at a time.  A prefix is described by how many
        announcements it sent, the reception counts and its executability
        mask; everything below it depends on nothing else, so repeated
        descriptions and masks already inside ``hit`` are cut off.
        """
        g = self._g
        n = len(read)
        m = len(self.agents)
        ai = self._aidx[a]
        cnt = [0] * m
        seen = set()
        hit = 0

        def walk(sent: int, e: int) -> None:
            nonlocal hit
            node = (sent, tuple(cnt), e)
            if node in seen:
                return
            seen.add(node)
            if sent == n and cnt[ai] == n:
                hit |= e & g((read, node[1]), sub)
            if sent < n:
                e2 = e & g((read[:sent], node[1]), read[sent])
                if e2 & ~hit:
                    walk(sent + 1, e2)
            for b in range(m):
                if cnt[b] < sent and e & ~hit:
                    cnt[b] += 1
                    walk(sent, e)
                    cnt[b] -= 1

        walk(0, self.all)
        return hit

    def _e_plain(self, w) -> int:
        r = self.memo_exec.get(w)
        if r is not None:
            return r
        self.stats.e_evals += 1
        if not w:
            r = self.all
        else:
            head, last = w[:-1], w[-1]
            if isinstance(last, str):
                r = self._e(head) if can_receive(head, last) else 0
            else:
                r = self._e(head)
                if r:
                    r &= self._g(self.key(head), last)
        self.memo_exec[w] = r
        return r

    def _feature_spec(self, f) -> tuple:
        spec = tuple(sorted((kind == "R", self._aidx[a], j) for kind, a, j in features(f)))
        self._spec[f] = spec
        return spec

    def memo_key(self, k, f) -> tuple:
        """The ``G`` memo key: ``f`` with the values of its features at ``k``."""
        spec = self._spec.get(f)
        if spec is None:
            spec = self._feature_spec(f)
        anns, counts = k
        n = len(anns)
        return (f, tuple([anns[:counts[i] + j] if rd else counts[i] + j < n for rd, i, j in spec]))

    def _g_plain(self, k, f) -> int:
        spec = self._spec.get(f)
        if spec is None:
            spec = self._feature_spec(f)
        if spec:
            anns, counts = k
            n = len(anns)
            mk = (f, tuple([anns[:counts[i] + j] if rd else counts[i] + j < n for rd, i, j in spec]))
        else:
            mk = f
        r = self.memo_sat.get(mk)
        if r is not None:
            return r
        self.stats.g_evals += 1
        match f:
            case Atom(p):
                r = self._val[p]
            case Top():
                r = self.all
            case Not() | Or():
                leaves, fn = boolean_form(f)
                r = fn(self.all, self._g, k, leaves)
            case HatK(a, sub):
                hit = self._khat(k[0][:k[1][self._aidx[a]]], a, sub)
                r = 0
                for c in self._classes[a]:
                    if c & hit:
                        r |= c
            case Recv(a, sub):
                anns, counts = k
                i = self._aidx[a]
                if counts[i] < len(anns):
                    r = self._g((anns, counts[:i] + (counts[i] + 1,) + counts[i + 1:]), sub)
                else:
                    r = 0
            case Send(ann, sub):
                r = self._g(k, ann)
                if r:
                    r &= self._g((k[0] + (ann,), k[1]), sub)
            case _:
                raise TypeError(f"not a formula: {f!r}")
        self.memo_sat[mk] = r
        return r

    # Guard-free relations, clause by clause, one state at a time.
    def _exec_minus_plain(self, s, w) -> bool:
        key = (s, w)
        r = self.memo_exec_minus.get(key)
        if r is not None:
            return r
        if not w:
            r = True
        else:
            head, last = w[:-1], w[-1]
            if isinstance(last, str):
                r = can_receive(head, last) and self._exec_m(s, head)
            else:
                r = self._exec_m(s, head) and self._sat_m(s, head, last)
        self.memo_exec_minus[key] = r
        return r

    def _sat_minus_plain(self, s, w, f) -> bool:
        key = (s, w, f)
        r = self.memo_sat_minus.get(key)
        if r is not None:
            return r
        match f:
            case Atom(p):
                r = self.model.holds(p, s)
            case Top():
                r = True
            case Not(sub):
                r = not self._sat_m(s, w, sub)
            case Or(left, right):
                r = self._sat_m(s, w, left) or self._sat_m(s, w, right)
            case HatK(a, sub):
                r = any(self._exec_m(t, b) and self._sat_m(t, b, sub)
                        for t in self.model.accessible(a, s)
                        for b in views(w, a, self.agents))
            case Recv(a, sub):
                r = can_receive(w, a) and self._sat_m(s, w + (a,), sub)
            case Send(ann, sub):
                r = self._sat_m(s, w, ann) and self._sat_m(s, w + (ann,), sub)
            case _:
                raise TypeError(f"not a formula: {f!r}")
        self.memo_sat_minus[key] = r
        return r


def executable(ctx: EvalContext, s, w) -> bool:
    """``s |><| w``."""
    return ctx.executable(s, w)


def evaluate(ctx: EvalContext, s, w, f: Formula) -> bool:
    """``s, w |= f``."""
    return ctx.evaluate(s, w, f)


def executable_minus(ctx: EvalContext, s, w) -> bool:
    return ctx.executable_minus(s, w)


def evaluate_minus(ctx: EvalContext, s, w, f: Formula) -> bool:
    """The guard-free satisfaction relation, defined on histories only."""
    return ctx.evaluate_minus(s, w, f)


def fold_word(w, f: Formula, mode: str = "diamond") -> Formula:
    """``<w>f`` (mode ``diamond``) or ``[w]f`` (mode ``box``) as nested modalities."""
    if mode not in ("diamond", "box"):
        raise ValueError("mode must be 'diamond' or 'box'")
    return fold(w, f, box=(mode == "box"))
