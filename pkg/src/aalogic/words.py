"""Words, histories, the view relation and the termination order.

A word is a plain tuple of letters.  A letter is either an agent name (a
``str``, meaning "that agent reads its next message") or a ``Formula``
(meaning "that formula is broadcast").  Tuples keep words hashable and cheap
to slice, which the evaluator relies on.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

from .errors import NotAHistory
from .syntax import Formula, print_formula, _letter_text

Letter = Union[str, Formula]
Word = tuple

EPS: Word = ()


def is_agent(letter: Letter) -> bool:
    return isinstance(letter, str)


@dataclass(frozen=True)
class Counts:
    recv: dict          # agent -> |w|_a
    ann: int            # |w|_!

    def read(self, agent: str) -> int:
        """``|w|_{!a}``: how many announcements ``agent`` has actually read."""
        return min(self.recv.get(agent, 0), self.ann)


def counts(w: Word, agents: Iterable[str] = ()) -> Counts:
    recv = Counter({a: 0 for a in agents})
    ann = 0
    for x in w:
        if isinstance(x, str):
            recv[x] += 1
        else:
            ann += 1
    return Counts(dict(recv), ann)


def count_recv(w: Word, agent: str) -> int:
    return sum(1 for x in w if x == agent)


def count_ann(w: Word) -> int:
    return sum(1 for x in w if not isinstance(x, str))


def can_receive(w: Word, agent: str) -> bool:
    """``|w|_a < |w|_!``."""
    n = 0
    for x in w:
        if isinstance(x, str):
            n -= x == agent
        else:
            n += 1
    return n > 0


@lru_cache(maxsize=1 << 16)
def is_history(w: Word) -> bool:
    sent = 0
    got: dict = {}
    for x in w:
        if isinstance(x, str):
            k = got.get(x, 0) + 1
            if k > sent:
                return False
            got[x] = k
        else:
            sent += 1
    return True


def as_history(w: Word) -> Word:
    if not is_history(w):
        raise NotAHistory(f"{format_word(w)} is not a history")
    return w


def proj_ann(w: Word) -> tuple:
    """``w`` restricted to its formula letters."""
    return tuple(x for x in w if not isinstance(x, str))


def proj_read(w: Word, agent: str) -> tuple:
    """The announcements ``agent`` has read: the first ``|w|_{!a}`` of them."""
    anns = proj_ann(w)
    return anns[:min(count_recv(w, agent), len(anns))]


def prefixes(w: Word) -> Iterator[Word]:
    for i in range(len(w) + 1):
        yield w[:i]


def view_rel(alpha: Word, beta: Word, agent: str) -> bool:
    """``alpha |>_a beta``."""
    if not is_history(beta):
        return False
    b = proj_ann(beta)
    return b == proj_read(beta, agent) == proj_read(alpha, agent)


def letter_key(letter: Letter) -> str:
    return letter if isinstance(letter, str) else print_formula(letter)


def word_key(w: Word) -> tuple:
    """Canonical order: by length, then letter by letter on printed text."""
    return (len(w), tuple(letter_key(x) for x in w))


def views(alpha: Word, agent: str, agents: Sequence[str]) -> tuple:
    """All histories ``agent`` considers possible at ``alpha``, canonically sorted."""
    return views_of_read(proj_read(alpha, agent), agent, agents)


def views_of_read(read: tuple, agent: str, agents: Sequence[str]) -> tuple:
    """The views of any word at which ``agent`` has read exactly ``read``."""
    return _views(tuple(read), agent, tuple(sorted(set(agents) | {agent})))


@lru_cache(maxsize=1 << 14)
def _views(fs: tuple, agent: str, agents: tuple) -> tuple:
    # Every view sends exactly fs, in order, and agent reads all of it; the
    # other agents read any prefix-respecting amount.  DFS over letters emits
    # each sequence once, so no deduplication is needed.
    n = len(fs)
    out = []
    word: list = []
    got = {b: 0 for b in agents}

    def walk(sent: int):
        if sent == n and got[agent] == n:
            out.append(tuple(word))
        if sent < n:
            word.append(fs[sent])
            walk(sent + 1)
            word.pop()
        for b in agents:
            if got[b] < sent:
                got[b] += 1
                word.append(b)
                walk(sent)
                word.pop()
                got[b] -= 1

    walk(0)
    out.sort(key=word_key)
    return tuple(out)


def word_size(w: Word) -> int:
    """``||w||``: one per reception plus the size of every broadcast (with multiplicity)."""
    return sum(1 if isinstance(x, str) else x.size for x in w)


def word_deg(w: Word) -> int:
    return sum(0 if isinstance(x, str) else x.deg for x in w)


def pair_deg(w: Word, f: Formula) -> int:
    """``deg(w, f)``, which equals ``deg(<w>f)``."""
    return word_deg(w) + f.deg


def measure(w: Word, f: Formula) -> tuple:
    return (pair_deg(w, f), word_size(w) + f.size)


def ll_less(p1: tuple, p2: tuple) -> bool:
    """The strict order ``<<`` on (word, formula) pairs."""
    return measure(*p1) < measure(*p2)


def format_word(w: Word) -> str:
    if not w:
        return "eps"
    return ".".join(_letter_text(x, print_formula) for x in w)


def concat(*ws: Word) -> Word:
    out: tuple = ()
    for w in ws:
        out += tuple(w)
    return out
