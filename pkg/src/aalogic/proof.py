"""Checking Hilbert-style AA* derivations.

Proof file format (one item per line, ``#`` starts a comment)::

    agents: a, b
    atoms: p, q
    param: alpha                      optional; makes the file a template
    1. <formula> ; <justification>

Justifications::

    taut                              propositional tautology
    axiom ID                          instance of an axiom schema
    mp I J                            from line I (phi) and line J (phi -> psi)
    neck I AGENT                      from line I (phi), infer K AGENT phi
    nec! I WORD                       from line I (phi), infer [WORD]phi
    rstar TEMPLATE vocab=F,.. bound=L bounded R*: see below
    hyp LABEL                         an unproved premise

Line numbers must increase; gaps are allowed.  Formulas are compared after
removing double negations, and nothing else (no reordering of ``|``).

A template declares a word parameter (``param: alpha``) and uses it as
``$alpha`` inside formulas and words.  ``rstar`` accepts ``phi`` when the
template, instantiated at every history over the vocabulary (plus the
agents) up to length ``L``, checks clean and concludes ``empty -> [alpha]phi``.
The rule itself quantifies over all words, so this is finite evidence only
and gets its own verdict, ``AcceptedBounded``.  ``TEMPLATE`` is a path
(relative to the proof file) or ``builtin:NAME``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .axioms import AXIOM_IDS, _candidates, instantiate_axiom, match_axiom
from .errors import ParseError, ProofFormatError, SideConditionViolated, TooManyLetters
from .parsing import fold, parse_formula, parse_word
from .semantics import boolean_form
from .syntax import (BOT, Formula, _empty, as_know, conj, conjunction, disj,
                     iff, implies, know, normalize, pretty_formula, split_box)
from .words import format_word, views

ACCEPTED = "Accepted"
ACCEPTED_BOUNDED = "AcceptedBounded"
ACCEPTED_HYPOTHESES = "AcceptedWithHypotheses"
REJECTED = "Rejected"

MAX_LETTERS = 20


# -- justifications ---------------------------------------------------------------

@dataclass(frozen=True)
class Tautology:
    def __str__(self):
        return "taut"


@dataclass(frozen=True)
class Axiom:
    schema: str

    def __str__(self):
        return f"axiom {self.schema}"


@dataclass(frozen=True)
class MP:
    minor: int      # phi
    major: int      # phi -> psi

    def __str__(self):
        return f"mp {self.minor} {self.major}"


@dataclass(frozen=True)
class NecK:
    premise: int
    agent: str

    def __str__(self):
        return f"neck {self.premise} {self.agent}"


@dataclass(frozen=True)
class NecBang:
    premise: int
    word: tuple

    def __str__(self):
        return f"nec! {self.premise} {format_word(self.word)}"


@dataclass(frozen=True)
class RStarBounded:
    template: str
    vocab: tuple
    bound: int

    def __str__(self):
        vs = ",".join(pretty_formula(f) for f in self.vocab)
        return f"rstar {self.template} vocab={vs} bound={self.bound}"


@dataclass(frozen=True)
class Hypothesis:
    label: str

    def __str__(self):
        return f"hyp {self.label}"


@dataclass
class ProofLine:
    index: int
    formula: Formula
    justification: object
    source_line: int | None = None


@dataclass
class Proof:
    agents: tuple
    atoms: tuple
    lines: list
    params: tuple = ()
    source: Path | None = None

    @property
    def conclusion(self) -> Formula | None:
        return self.lines[-1].formula if self.lines else None


@dataclass
class LineResult:
    index: int
    rule: str
    ok: bool
    message: str = ""
    bindings: dict | None = None


@dataclass
class ProofReport:
    verdict: str
    results: list
    conclusion: Formula | None = None
    instances_checked: int = 0      # template instances re-checked for rstar lines

    @property
    def ok(self) -> bool:
        return self.verdict != REJECTED

    @property
    def failures(self) -> list:
        return [r for r in self.results if not r.ok]

    @property
    def first_failure(self) -> LineResult | None:
        bad = self.failures
        return bad[0] if bad else None

    def to_dict(self, agents=None) -> dict:
        return {
            "verdict": self.verdict,
            "conclusion": pretty_formula(self.conclusion, agents) if self.conclusion else None,
            "instances_checked": self.instances_checked,
            "lines": [{"index": r.index, "rule": r.rule, "ok": r.ok, "message": r.message}
                      for r in self.results],
        }


# -- tautologies ------------------------------------------------------------------

def check_tautology(f: Formula) -> bool:
    """Is ``f`` true under every assignment to its maximal non-Boolean subformulas?

    Each opaque letter gets a column of a truth table packed into one int;
    the whole table is evaluated with bit operations.
    """
    leaves, fn = boolean_form(f)
    n = len(leaves)
    if n > MAX_LETTERS:
        raise TooManyLetters(f"{n} opaque letters (limit {MAX_LETTERS})")
    rows = 1 << n
    full = (1 << rows) - 1
    cols = {}
    for i, leaf in enumerate(leaves):
        # row r gives leaf i the value of bit i of r
        block = (1 << (1 << i)) - 1
        pattern = 0
        for start in range(1 << i, rows, 2 << i):
            pattern |= block << start
        cols[leaf] = pattern
    return fn(full, lambda _k, leaf: cols[leaf], None, leaves) == full


# -- parsing ----------------------------------------------------------------------

_LINE = re.compile(r"\s*(\d+)\s*\.\s*(.*)")
_HEADER = re.compile(r"\s*(agents|atoms|param)\s*:\s*(.*)")


def _names(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def parse_proof(text: str, bindings: dict | None = None, source: Path | None = None) -> Proof:
    """Read a proof.  A template needs ``bindings`` for each declared parameter."""
    agents: tuple | None = None
    atoms: tuple | None = None
    params: tuple = ()
    lines: list = []
    bindings = dict(bindings or {})
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        h = _HEADER.fullmatch(body)
        if h:
            if lines:
                raise ProofFormatError(f"{h.group(1)}: header after the first proof line", no)
            if h.group(1) == "agents":
                agents = _names(h.group(2))
            elif h.group(1) == "atoms":
                atoms = _names(h.group(2))
            else:
                params += _names(h.group(2))
            continue
        m = _LINE.fullmatch(body)
        if not m or ";" not in m.group(2):
            raise ProofFormatError("expected 'N. formula ; justification'", no)
        if agents is None or atoms is None:
            raise ProofFormatError("'agents:' and 'atoms:' must come before the proof lines", no)
        missing = [p for p in params if p not in bindings]
        if missing:
            raise ProofFormatError(f"template parameter ${missing[0]} is not bound", no)
        idx = int(m.group(1))
        if lines and idx <= lines[-1].index:
            raise ProofFormatError(f"line number {idx} does not increase", no)
        ftext, jtext = m.group(2).rsplit(";", 1)
        try:
            f = parse_formula(ftext.strip(), agents, atoms, bindings)
        except ParseError as e:
            raise ProofFormatError(f"formula: {e}", no) from e
        lines.append(ProofLine(idx, f, _parse_justification(jtext.strip(), agents, atoms, bindings, no), no))
    if agents is None or atoms is None:
        raise ProofFormatError("missing 'agents:' or 'atoms:' header")
    return Proof(agents, atoms, lines, params, source)


def _parse_justification(text: str, agents, atoms, bindings, no: int):
    parts = text.split()
    if not parts:
        raise ProofFormatError("missing justification", no)
    rule, args = parts[0].lower(), parts[1:]

    def index(s: str) -> int:
        if not s.isdigit():
            raise ProofFormatError(f"{rule}: expected a line number, got {s!r}", no)
        return int(s)

    def arity(n: int):
        if len(args) != n:
            raise ProofFormatError(f"{rule} takes {n} argument(s)", no)

    try:
        match rule:
            case "taut":
                arity(0)
                return Tautology()
            case "axiom":
                arity(1)
                if args[0] not in AXIOM_IDS:
                    raise ProofFormatError(f"unknown axiom {args[0]!r}", no)
                return Axiom(args[0])
            case "mp":
                arity(2)
                return MP(index(args[0]), index(args[1]))
            case "neck":
                arity(2)
                if args[1] not in agents:
                    raise ProofFormatError(f"unknown agent {args[1]!r}", no)
                return NecK(index(args[0]), args[1])
            case "nec!":
                if len(args) < 2:
                    raise ProofFormatError("nec! takes a line number and a word", no)
                return NecBang(index(args[0]), parse_word(" ".join(args[1:]), agents, atoms, bindings))
            case "rstar":
                opts = dict(a.split("=", 1) for a in args[1:] if "=" in a)
                if not args or set(opts) != {"vocab", "bound"} or len(args) != 3:
                    raise ProofFormatError("rstar takes TEMPLATE vocab=F,.. bound=L", no)
                vocab = tuple(parse_formula(v, agents, atoms) for v in _names(opts["vocab"]))
                return RStarBounded(args[0], vocab, index(opts["bound"]))
            case "hyp":
                arity(1)
                return Hypothesis(args[0])
    except ParseError as e:
        raise ProofFormatError(f"{rule}: {e}", no) from e
    raise ProofFormatError(f"unknown rule {rule!r}", no)


def load_proof(path, bindings: dict | None = None) -> Proof:
    path = Path(path)
    return parse_proof(path.read_text(), bindings, path)


def format_proof(p: Proof, header: str = "") -> str:
    out = [f"# {x}" for x in header.splitlines()]
    out.append(f"agents: {', '.join(p.agents)}")
    out.append(f"atoms: {', '.join(p.atoms)}")
    if p.params:
        out.append(f"param: {', '.join(p.params)}")
    for ln in p.lines:
        out.append(f"{ln.index}. {pretty_formula(ln.formula, p.agents)} ; {ln.justification}")
    return "\n".join(out) + "\n"


# -- checking ---------------------------------------------------------------------

def _same(f: Formula, g: Formula) -> bool:
    return normalize(f) is normalize(g)


def _axiom_bindings(f: Formula, schema: str, agents) -> dict | None:
    b = match_axiom(f, schema, agents)
    if b is not None:
        return b
    # the instance may differ from f by double negations only
    nf = normalize(f)
    for b in _candidates(f, schema):
        if "a" in b and b["a"] not in agents:
            continue
        try:
            if normalize(instantiate_axiom(schema, b, agents)) is nf:
                return b
        except SideConditionViolated:
            continue
    return None


def _check_line(p: Proof, ln: ProofLine, by_index: dict, resolve, report: ProofReport) -> LineResult:
    j = ln.justification
    rule = str(j).split()[0]

    def cited(i: int) -> Formula | None:
        if i >= ln.index or i not in by_index:
            return None
        return by_index[i].formula

    def fail(msg: str) -> LineResult:
        return LineResult(ln.index, rule, False, msg)

    match j:
        case Tautology():
            try:
                if check_tautology(normalize(ln.formula)):
                    return LineResult(ln.index, rule, True)
            except TooManyLetters as e:
                return fail(str(e))
            return fail("not a propositional tautology")
        case Axiom(schema):
            b = _axiom_bindings(ln.formula, schema, p.agents)
            if b is None:
                return fail(f"not an instance of {schema}")
            return LineResult(ln.index, rule, True, bindings=b)
        case MP(i, k):
            fi, fk = cited(i), cited(k)
            if fi is None or fk is None:
                return fail(f"mp cites line {i if fi is None else k}, which is not an earlier line")
            if not _same(fk, implies(fi, ln.formula)):
                return fail(f"line {k} is not 'line {i} -> this line'")
            return LineResult(ln.index, rule, True)
        case NecK(i, a):
            fi = cited(i)
            if fi is None:
                return fail(f"neck cites line {i}, which is not an earlier line")
            if not _same(ln.formula, know(a, fi)):
                return fail(f"this line is not K {a} applied to line {i}")
            return LineResult(ln.index, rule, True)
        case NecBang(i, w):
            fi = cited(i)
            if fi is None:
                return fail(f"nec! cites line {i}, which is not an earlier line")
            if not _same(ln.formula, fold(w, fi, box=True)):
                return fail(f"this line is not [{format_word(w)}] applied to line {i}")
            return LineResult(ln.index, rule, True)
        case RStarBounded():
            return _check_rstar(p, ln, resolve, report)
        case Hypothesis(label):
            return LineResult(ln.index, rule, True, f"hypothesis {label}")
    return fail(f"unsupported justification {j!r}")


def _check_rstar(p: Proof, ln: ProofLine, resolve, report: ProofReport) -> LineResult:
    from .validity import enumerate_histories

    j = ln.justification
    try:
        make = resolve(j.template, p)
    except (OSError, KeyError, ProofFormatError) as e:
        return LineResult(ln.index, "rstar", False, f"template {j.template}: {e}")
    empty = _empty(tuple(sorted(p.agents)))
    for alpha in enumerate_histories(j.vocab, p.agents, j.bound):
        try:
            inst = make(alpha, ln.formula)
        except (ProofFormatError, ValueError) as e:
            return LineResult(ln.index, "rstar", False,
                              f"template at {format_word(alpha)}: {e}")
        sub = check_proof(inst, resolve)
        report.instances_checked += 1
        if sub.verdict != ACCEPTED:
            where = sub.first_failure
            why = f"line {where.index}: {where.message}" if where else sub.verdict
            return LineResult(ln.index, "rstar", False,
                              f"template at {format_word(alpha)} is {sub.verdict} ({why})")
        if not _same(inst.conclusion, implies(empty, fold(alpha, ln.formula, box=True))):
            return LineResult(ln.index, "rstar", False,
                              f"template at {format_word(alpha)} does not conclude empty -> [alpha]phi")
    return LineResult(ln.index, "rstar", True,
                      f"bounded: histories up to length {j.bound} only")


def default_resolver(ref: str, p: Proof) -> Callable:
    """Turn a template reference into ``alpha, phi -> Proof``."""
    if ref.startswith("builtin:"):
        gen = BUILTIN_TEMPLATES[ref.removeprefix("builtin:")]
        return lambda alpha, phi: gen(alpha, p.agents, p.atoms, phi)
    path = Path(ref)
    if not path.is_absolute() and p.source is not None:
        path = Path(p.source).parent / path
    text = path.read_text()
    params: tuple = ()
    for raw in text.splitlines():
        h = _HEADER.fullmatch(raw.split("#", 1)[0].strip())
        if h and h.group(1) == "param":
            params += _names(h.group(2))
    if len(params) != 1:
        raise ProofFormatError(f"{ref} must declare exactly one word parameter")
    return lambda alpha, phi: parse_proof(text, {params[0]: alpha}, path)


def check_proof(p: Proof, resolve: Callable | None = None) -> ProofReport:
    """Check every line on its own; the verdict summarizes all of them."""
    resolve = resolve or default_resolver
    report = ProofReport(REJECTED, [], p.conclusion)
    by_index = {ln.index: ln for ln in p.lines}
    for ln in p.lines:
        report.results.append(_check_line(p, ln, by_index, resolve, report))
    rules = {type(ln.justification) for ln in p.lines}
    if not p.lines or report.failures:
        report.verdict = REJECTED
    elif Hypothesis in rules:
        report.verdict = ACCEPTED_HYPOTHESES
    elif RStarBounded in rules:
        report.verdict = ACCEPTED_BOUNDED
    else:
        report.verdict = ACCEPTED
    return report


# -- the K_a[a]F derivation ---------------------------------------------------------

def ka_recv_bot_proof(alpha: tuple, agents: Iterable[str], atoms: Iterable[str],
                      target: Formula | None = None, agent: str | None = None) -> Proof:
    """A derivation of ``empty -> [alpha]K_a[a]F``, every step spelled out.

    Lines follow the textbook argument: Exec!3 for each view ``beta`` of
    ``alpha``, NecK and Dist, emptyK, then the views are conjoined one at a
    time, and empty! closes the argument.  ``target`` (``K_a[a]F``) or
    ``agent`` picks the agent.
    """
    agents = tuple(sorted(set(agents)))
    if target is not None:
        k = as_know(target)
        inner = split_box(k[1]) if k else None
        if not k or inner is None or inner[0] != (k[0],) or inner[1] is not BOT:
            raise ValueError("the ka_recv_bot template proves K a [a]F only")
        agent = k[0]
    if agent not in agents:
        raise ValueError(f"unknown agent {agent!r}")
    a = agent
    alpha = tuple(alpha)
    empty = _empty(agents)
    recv_bot = fold((a,), BOT, box=True)
    lines: list = []

    def add(f, j) -> int:
        lines.append(ProofLine(len(lines) + 1, f, j))
        return len(lines)

    vs = views(alpha, a, agents)
    reached = []            # (line of "empty -> K a [beta][a]F", that K formula)
    ek = None
    for beta in vs:
        kb = know(a, fold(beta, recv_bot, box=True))
        l1 = add(implies(empty, fold(beta, recv_bot, box=True)), Axiom("Exec!3"))
        l2 = add(know(a, lines[l1 - 1].formula), NecK(l1, a))
        dist = implies(know(a, empty), kb)
        l3 = add(implies(lines[l2 - 1].formula, dist), Axiom("Dist"))
        l4 = add(dist, MP(l2, l3))
        if ek is None:
            ek = add(implies(empty, know(a, empty)), Axiom("emptyK"))
        goal = implies(empty, kb)
        l5 = add(implies(lines[ek - 1].formula, implies(dist, goal)), Tautology())
        l6 = add(implies(dist, goal), MP(ek, l5))
        reached.append((add(goal, MP(l4, l6)), kb))

    # conjoin the views left to right
    line, acc = reached[0]
    for nxt_line, kb in reached[1:]:
        both = conj(acc, kb)
        step = implies(implies(empty, acc), implies(implies(empty, kb), implies(empty, both)))
        t = add(step, Tautology())
        m = add(implies(implies(empty, kb), implies(empty, both)), MP(line, t))
        line, acc = add(implies(empty, both), MP(nxt_line, m)), both
    assert acc is conjunction(kb for _, kb in reached)

    right = disj(fold(alpha, BOT, box=True), acc)
    t = add(implies(implies(empty, acc), implies(empty, right)), Tautology())
    seven = add(implies(empty, right), MP(line, t))
    left = fold(alpha, know(a, recv_bot), box=True)
    eight = add(implies(empty, iff(left, right)), Axiom("empty!"))
    goal = implies(empty, left)
    t = add(implies(lines[seven - 1].formula, implies(lines[eight - 1].formula, goal)), Tautology())
    m = add(implies(lines[eight - 1].formula, goal), MP(seven, t))
    add(goal, MP(eight, m))
    return Proof(agents, tuple(atoms), lines)


BUILTIN_TEMPLATES = {
    "ka_recv_bot": lambda alpha, agents, atoms, phi: ka_recv_bot_proof(alpha, agents, atoms, target=phi),
}
