"""Finite epistemic models with one equivalence relation per agent.

Relations are stored as partitions, so they are equivalences by construction
once the partition covers every state exactly once.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import (EmptyUpdate, PartitionError, SchemaError, UnknownAgent,
                     UnknownAtom, UnknownState)

FORMAT = "aa-model"
VERSION = 1


@dataclass(frozen=True)
class EpistemicModel:
    states: tuple
    agents: tuple
    atoms: tuple
    partitions: dict            # agent -> tuple of frozensets
    valuation: dict             # atom -> frozenset of states
    name: str = ""
    _cell: dict = field(default=None, repr=False, compare=False, hash=False)
    _stateset: frozenset = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        cell = {}
        for a, blocks in self.partitions.items():
            ordered = {}
            for block in blocks:
                members = tuple(s for s in self.states if s in block)
                for s in block:
                    ordered[s] = members
            cell[a] = ordered
        object.__setattr__(self, "_cell", cell)
        object.__setattr__(self, "_stateset", frozenset(self.states))

    def __hash__(self):
        return hash((self.states, self.agents, self.atoms))

    def __eq__(self, other):
        if not isinstance(other, EpistemicModel):
            return NotImplemented
        return (self.states == other.states and self.agents == other.agents
                and self.atoms == other.atoms
                and {a: frozenset(b) for a, b in self.partitions.items()}
                == {a: frozenset(b) for a, b in other.partitions.items()}
                and self.valuation == other.valuation)

    def check_state(self, s) -> None:
        if s not in self._stateset:
            raise UnknownState(f"unknown state {s!r}")

    def accessible(self, agent: str, s) -> tuple:
        """States ``agent`` cannot tell apart from ``s`` (including ``s``), in model order."""
        try:
            return self._cell[agent][s]
        except KeyError:
            if agent not in self._cell:
                raise UnknownAgent(f"unknown agent {agent!r}") from None
            raise UnknownState(f"unknown state {s!r}") from None

    def holds(self, atom: str, s) -> bool:
        try:
            return s in self.valuation[atom]
        except KeyError:
            raise UnknownAtom(f"unknown atom {atom!r}") from None

    def related(self, agent: str, s, t) -> bool:
        return t in self.accessible(agent, s)

    def relation(self, agent: str) -> set:
        """The pair relation derived from the partition."""
        return {(s, t) for s in self.states for t in self.accessible(agent, s)}


def make_model(states: Iterable, agents: Iterable[str], atoms: Iterable[str],
               partitions: dict, valuation: dict, name: str = "") -> EpistemicModel:
    """Build a model and raise on any defect."""
    m = _build(states, agents, atoms, partitions, valuation, name)
    problems = model_problems(m)
    if problems:
        kind, msg = problems[0]
        raise kind(msg)
    return m


def _build(states, agents, atoms, partitions, valuation, name="") -> EpistemicModel:
    agents = tuple(agents)
    atoms = tuple(atoms)
    parts = {a: tuple(frozenset(b) for b in partitions.get(a, ())) for a in partitions}
    val = {p: frozenset(valuation.get(p, ())) for p in atoms}
    for p in valuation:
        if p not in val:
            val[p] = frozenset(valuation[p])
    return EpistemicModel(tuple(states), agents, atoms, parts, val, name)


def model_problems(m: EpistemicModel) -> list:
    """Every invariant violation as ``(exception class, message)``; empty when valid."""
    out = []
    states = set(m.states)
    if not m.states:
        out.append((SchemaError, "a model needs at least one state"))
    if len(states) != len(m.states):
        out.append((SchemaError, "duplicate state ids"))
    for a in m.agents:
        if a not in m.partitions:
            out.append((PartitionError, f"no partition for agent {a!r}"))
    for a, blocks in m.partitions.items():
        if a not in m.agents:
            out.append((UnknownAgent, f"partition given for undeclared agent {a!r}"))
            continue
        seen: set = set()
        for block in blocks:
            if not block:
                out.append((PartitionError, f"empty class in partition of {a!r}"))
            unknown = block - states
            if unknown:
                out.append((UnknownState, f"partition of {a!r} mentions unknown states {sorted(unknown)}"))
            overlap = block & seen
            if overlap:
                out.append((PartitionError, f"classes of {a!r} overlap on {sorted(overlap)}"))
            seen |= block
        missing = states - seen
        if missing:
            out.append((PartitionError, f"partition of {a!r} misses states {sorted(missing)}"))
    for p, ext in m.valuation.items():
        if p not in m.atoms:
            out.append((UnknownAtom, f"valuation given for undeclared atom {p!r}"))
        unknown = ext - states
        if unknown:
            out.append((UnknownState, f"valuation of {p!r} mentions unknown states {sorted(unknown)}"))
    return out


def validate_model(m: EpistemicModel) -> bool:
    return not model_problems(m)


# -- persistence ----------------------------------------------------------------

def model_to_dict(m: EpistemicModel) -> dict:
    order = {s: i for i, s in enumerate(m.states)}

    def srt(xs):
        return sorted(xs, key=order.__getitem__)

    return {
        "format": FORMAT,
        "version": VERSION,
        "states": list(m.states),
        "agents": list(m.agents),
        "atoms": list(m.atoms),
        "partitions": {a: sorted((srt(b) for b in m.partitions[a]), key=lambda b: order[b[0]])
                       for a in m.agents},
        "valuation": {p: srt(m.valuation.get(p, ())) for p in m.atoms},
    }


def dump_model(m: EpistemicModel) -> str:
    return json.dumps(model_to_dict(m), indent=2)


def load_model(document) -> EpistemicModel:
    """Load from a JSON string, a parsed dict, or a path."""
    if isinstance(document, Path):
        document = document.read_text()
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise SchemaError(f"not valid JSON: {e}") from None
    if not isinstance(document, dict):
        raise SchemaError("model document must be a JSON object")
    if document.get("format", FORMAT) != FORMAT:
        raise SchemaError(f"format must be {FORMAT!r}")
    if document.get("version", VERSION) != VERSION:
        raise SchemaError(f"unsupported version {document.get('version')!r}")
    for key, typ in (("states", list), ("agents", list), ("atoms", list),
                     ("partitions", dict), ("valuation", dict)):
        if not isinstance(document.get(key), typ):
            raise SchemaError(f"field {key!r} missing or not a {typ.__name__}")
    for key in ("states", "agents", "atoms"):
        if not all(isinstance(x, str) for x in document[key]):
            raise SchemaError(f"entries of {key!r} must be strings")
    for key in ("partitions", "valuation"):
        for k, v in document[key].items():
            ok = isinstance(v, list) and (
                all(isinstance(b, list) for b in v) if key == "partitions"
                else all(isinstance(x, str) for x in v))
            if not ok:
                raise SchemaError(f"bad entry {k!r} in {key!r}")
    extra = set(document) - {"format", "version", "states", "agents", "atoms",
                             "partitions", "valuation", "name"}
    if extra:
        raise SchemaError(f"unknown fields {sorted(extra)}")
    for p in document["valuation"]:
        if p not in document["atoms"]:
            raise UnknownAtom(f"valuation given for undeclared atom {p!r}")
    return make_model(document["states"], document["agents"], document["atoms"],
                      document["partitions"], document["valuation"],
                      document.get("name", ""))


def load_model_file(path) -> EpistemicModel:
    return load_model(Path(path))


# -- generation and update --------------------------------------------------------

def random_model(n: int, agents: Iterable[str], atoms: Iterable[str], seed: int) -> EpistemicModel:
    """A random model with ``n`` states ``s0..s{n-1}``; deterministic in ``seed``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(seed)
    agents, atoms = tuple(agents), tuple(atoms)
    states = tuple(f"s{i}" for i in range(n))
    partitions = {}
    for a in agents:
        groups: dict = {}
        for s in states:
            groups.setdefault(rng.randrange(n), []).append(s)
        partitions[a] = list(groups.values())
    valuation = {p: [s for s in states if rng.random() < 0.5] for p in atoms}
    return make_model(states, agents, atoms, partitions, valuation, f"random:{n}:{seed}")


def restrict(m: EpistemicModel, keep: Iterable) -> EpistemicModel:
    keep = set(keep)
    states = tuple(s for s in m.states if s in keep)
    parts = {a: [b & keep for b in m.partitions[a] if b & keep] for a in m.agents}
    val = {p: m.valuation[p] & keep for p in m.atoms}
    return make_model(states, m.agents, m.atoms, parts, val, m.name)


def update_model(m: EpistemicModel, w, ctx=None) -> EpistemicModel:
    """The submodel of states where ``w`` is executable.  For display only:
    evaluation always runs against the full model."""
    from .semantics import EvalContext

    if ctx is None:
        ctx = EvalContext(m)
    keep = [s for s in m.states if ctx.executable(s, w)]
    if not keep:
        raise EmptyUpdate("no state survives the update")
    return restrict(m, keep)
