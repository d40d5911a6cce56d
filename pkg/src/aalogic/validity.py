"""Bounded validity search.

Refutations are definitive.  ``ValidUpToBound`` only says that nothing was
found among the given models, vocabulary and word-length bound.
"""

from __future__ import annotations

import random
import shlex
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .models import EpistemicModel, random_model
from .semantics import EvalContext
from .syntax import TOP, Formula, atoms_of, print_formula, subformulas
from .words import can_receive, format_word, letter_key

VALID = "ValidUpToBound"
COUNTEREXAMPLE = "Counterexample"


@dataclass(frozen=True)
class ModelFamily:
    """``count`` random models of 1..``max_states`` states, all derived from ``seed``."""

    count: int
    max_states: int
    seed: int
    agents: tuple
    atoms: tuple

    def specs(self) -> list:
        rng = random.Random(self.seed)
        return [(rng.randint(1, self.max_states), rng.getrandbits(32)) for _ in range(self.count)]

    def models(self) -> list:
        return [random_model(n, self.agents, self.atoms, s) for n, s in self.specs()]


@dataclass
class ValidityQuery:
    formula: Formula
    models: Sequence[EpistemicModel] | ModelFamily
    vocabulary: tuple | None = None
    max_len: int = 3
    mode: str = "star"

    def __post_init__(self):
        if self.max_len < 0:
            raise ValueError("max_len must be non-negative")
        if self.mode not in ("epsilon", "star"):
            raise ValueError("mode must be 'epsilon' or 'star'")
        if self.vocabulary is not None and not self.vocabulary and self.mode == "star":
            raise ValueError("star mode needs a non-empty vocabulary")

    def model_list(self) -> list:
        if isinstance(self.models, ModelFamily):
            return self.models.models()
        return list(self.models)

    def vocab(self) -> tuple:
        if self.vocabulary is not None:
            return canonical_vocab(self.vocabulary)
        return default_vocab(self.formula)


@dataclass
class Witness:
    model_index: int
    model: EpistemicModel
    state: str
    word: tuple

    def to_dict(self) -> dict:
        return {"model_index": self.model_index, "model": self.model.name or None,
                "state": self.state, "word": format_word(self.word)}


@dataclass
class ValidityReport:
    verdict: str
    formula: Formula
    mode: str
    checked_models: int = 0
    checked_histories: int = 0
    bound_used: int = 0
    vocabulary: tuple = ()
    witness: Witness | None = None
    contexts: list = field(default_factory=list, repr=False)

    @property
    def valid(self) -> bool:
        return self.verdict == VALID

    def replay_command(self, model_path: str | None = None) -> str | None:
        """A CLI line that re-evaluates the witness (and should print false)."""
        w = self.witness
        if w is None:
            return None
        m = w.model
        if model_path:
            src = ["--model", model_path]
        elif m.name.startswith("random:"):
            _, n, seed = m.name.split(":")
            src = ["--random-model", f"{n}:{seed}", "--agents", ",".join(m.agents),
                   "--atoms", ",".join(m.atoms)]
        else:
            return None
        args = ["aalogic", "eval", *src, "--state", w.state,
                "--word", format_word(w.word), print_formula(self.formula)]
        return " ".join(shlex.quote(x) for x in args)

    def to_dict(self, model_path: str | None = None) -> dict:
        return {
            "verdict": self.verdict,
            "mode": self.mode,
            "formula": print_formula(self.formula),
            "checked_models": self.checked_models,
            "checked_histories": self.checked_histories,
            "bound": self.bound_used,
            "vocabulary": [print_formula(f) for f in self.vocabulary],
            "witness": self.witness.to_dict() if self.witness else None,
            "replay": self.replay_command(model_path),
        }


def canonical_vocab(fs: Iterable[Formula]) -> tuple:
    return tuple(sorted(set(fs), key=print_formula))


def default_vocab(f: Formula) -> tuple:
    """Subformulas of ``f``, plus ``T``, plus the atoms of ``f``."""
    from .syntax import Atom
    return canonical_vocab(set(subformulas(f)) | {TOP} | {Atom(p) for p in atoms_of(f)})


def _letters(vocab: Iterable[Formula], agents: Iterable[str]) -> list:
    return sorted(list(vocab) + list(agents), key=letter_key)


def enumerate_histories(vocab: Iterable[Formula], agents: Iterable[str], max_len: int) -> Iterator[tuple]:
    """Every history up to ``max_len`` over ``vocab`` and ``agents``, by length then lexicographically."""
    letters = _letters(set(vocab), set(agents))
    level = [()]
    for n in range(max_len + 1):
        yield from level
        if n == max_len:
            break
        level = [w + (x,) for w in level for x in letters
                 if not isinstance(x, str) or can_receive(w, x)]


def check_epsilon(q: ValidityQuery, check_measure: bool = False) -> ValidityReport:
    report = ValidityReport(VALID, q.formula, "epsilon", bound_used=0)
    for i, m in enumerate(q.model_list()):
        ctx = EvalContext(m, check_measure)
        report.contexts.append(ctx)
        report.checked_models += 1
        report.checked_histories += len(m.states)
        bad = ctx.all & ~ctx.sat_mask((), q.formula)
        if bad:
            report.verdict = COUNTEREXAMPLE
            report.witness = Witness(i, m, ctx.states_of(bad)[0], ())
            return report
    return report


def _first_failure(ctx: EvalContext, phi: Formula, letters: list, max_len: int, report) -> tuple | None:
    """Smallest failing ``(state index, word)`` in state, length, lexicographic order.

    Words are carried with their key and executability mask and extended one
    letter at a time: ``E(w a) = E(w)`` when ``a`` can receive, and
    ``E(w f) = E(w) & G(w, f)``.

    Two exact shortcuts.  Entries with the same key and mask have identical
    futures, so only the first (lexicographically smallest) is kept.  On the
    last level, when no feature of ``phi`` reaches past the current
    announcements, ``G(w f, phi)`` is the same for every formula letter ``f``;
    if that mask already covers ``E(w)``, no ``w f`` can fail and the
    formula letters are skipped as a group.
    """
    agent_index = {a: i for i, a in enumerate(ctx.agents)}
    g = ctx._g
    spec = ctx._spec.get(phi) or ctx._feature_spec(phi)
    reach = [(i, j) for rd, i, j in spec if rd and j > 0]
    formulas = [x for x in letters if not isinstance(x, str)]
    first: dict = {}                 # state index -> first failing word

    def extend(w, k, e, x):
        anns, counts = k
        if isinstance(x, str):
            i = agent_index[x]
            if counts[i] < len(anns):
                return w + (x,), (anns, counts[:i] + (counts[i] + 1,) + counts[i + 1:]), e
            return None
        e2 = e & g(k, x)
        if e2:
            return w + (x,), (anns + (x,), counts), e2
        return None

    def check(w, k, e) -> bool:
        report.checked_histories += bin(e).count("1")
        bad = e & ~g(k, phi)
        while bad:
            low = bad & -bad
            first.setdefault(low.bit_length() - 1, w)
            bad ^= low
        return 0 in first

    level = [((), ctx.key(()), ctx.all)]
    for n in range(max_len + 1):
        if n == max_len or n + 1 < max_len or not formulas:
            for entry in level:
                if check(*entry):
                    return 0, first[0]
            if n == max_len:
                break
            seen = set()
            nxt = []
            for w, k, e in level:
                for x in letters:
                    ext = extend(w, k, e, x)
                    if ext is not None and (ext[1], ext[2]) not in seen:
                        seen.add((ext[1], ext[2]))
                        nxt.append(ext)
            level = nxt
            continue
        # n + 1 == max_len: the next level is checked without being stored
        for entry in level:
            if check(*entry):
                return 0, first[0]
        for w, k, e in level:
            anns, counts = k
            bulk = all(counts[i] + j <= len(anns) for i, j in reach)
            skip = bulk and not e & ~g((anns + (formulas[0],), counts), phi)
            for x in letters:
                if skip and not isinstance(x, str):
                    continue
                ext = extend(w, k, e, x)
                if ext is not None and check(*ext):
                    return 0, first[0]
        break
    if first:
        i = min(first)
        return i, first[i]
    return None


def check_star(q: ValidityQuery, check_measure: bool = False,
               contexts: Sequence[EvalContext] | None = None) -> ValidityReport:
    """Search executable histories for a point where the formula fails.

    Non-executable words satisfy every box vacuously, and their extensions are
    non-executable too, so the search only extends words executable at some
    state.  The first counterexample in (model, state, length, lexicographic)
    order wins.  ``contexts`` may pass pre-built contexts (one per model) to
    share memo tables between queries.
    """
    vocab = q.vocab()
    report = ValidityReport(VALID, q.formula, "star", bound_used=q.max_len, vocabulary=vocab)
    models = [c.model for c in contexts] if contexts is not None else q.model_list()
    for i, m in enumerate(models):
        ctx = contexts[i] if contexts is not None else EvalContext(m, check_measure)
        report.contexts.append(ctx)
        report.checked_models += 1
        for f in (q.formula, *vocab):
            ctx._check_formula(f)
        found = _first_failure(ctx, q.formula, _letters(vocab, m.agents), q.max_len, report)
        if found:
            report.verdict = COUNTEREXAMPLE
            report.witness = Witness(i, m, m.states[found[0]], found[1])
            return report
    return report
