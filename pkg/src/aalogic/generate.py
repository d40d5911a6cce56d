"""Seeded random formulas, words and axiom instances for property sweeps."""

from __future__ import annotations

import random
from typing import Sequence

from .axioms import METAVARS, instantiate_axiom
from .syntax import TOP, Atom, Formula, HatK, Not, Or, Recv, Send
from .words import can_receive, count_ann, count_recv


def random_formula(rng: random.Random, depth: int, agents: Sequence[str],
                   atoms: Sequence[str]) -> Formula:
    """A formula whose constructor nesting is at most ``depth``."""
    if depth <= 0 or rng.random() < 0.25:
        return TOP if rng.random() < 0.15 else Atom(rng.choice(atoms))
    d = depth - 1
    k = rng.randrange(6)
    if k == 0:
        return Not(random_formula(rng, d, agents, atoms))
    if k == 1:
        return Or(random_formula(rng, d, agents, atoms), random_formula(rng, d, agents, atoms))
    if k == 2:
        return HatK(rng.choice(agents), random_formula(rng, d, agents, atoms))
    if k == 3:
        # announcements are kept shallow: their content multiplies the search
        return Send(random_formula(rng, min(d, 1), agents, atoms),
                    random_formula(rng, d, agents, atoms))
    if k == 4:
        return Recv(rng.choice(agents), random_formula(rng, d, agents, atoms))
    return Not(HatK(rng.choice(agents), Not(random_formula(rng, d, agents, atoms))))


def random_word(rng: random.Random, max_len: int, agents: Sequence[str], atoms: Sequence[str],
                letter_depth: int = 1, history: bool = False) -> tuple:
    """A word of length ``0..max_len``; with ``history`` set, respects the prefix condition."""
    n = rng.randint(0, max_len)
    w: tuple = ()
    for _ in range(n):
        choices = ["f"] + [a for a in agents if not history or can_receive(w, a)]
        x = rng.choice(choices)
        if x == "f":
            w += (random_formula(rng, letter_depth, agents, atoms),)
        else:
            w += (x,)
    return w


def random_instance(rng: random.Random, schema: str, agents: Sequence[str], atoms: Sequence[str],
                    depth: int = 3, max_len: int = 3) -> Formula:
    """A random instance of ``schema`` whose side condition holds."""
    b: dict = {}
    for var in METAVARS[schema]:
        if var in ("phi", "psi"):
            b[var] = random_formula(rng, depth, agents, atoms)
        elif var == "a":
            b[var] = rng.choice(agents)
        elif var == "p":
            b[var] = rng.choice(atoms)
    if "alpha" in METAVARS[schema]:
        while True:
            w = random_word(rng, max_len, agents, atoms)
            a = b.get("a")
            if schema == "Exec!2" and not count_recv(w, a) < count_ann(w):
                continue
            if schema == "Exec!3" and not count_recv(w, a) >= count_ann(w):
                continue
            b["alpha"] = w
            break
    return instantiate_axiom(schema, b, agents)
