"""The axiom schemas of AA*, as instantiators and matchers.

Metavariables: ``phi``, ``psi`` (formulas), ``alpha`` (word), ``a`` (agent)
and ``p`` (atom name).  Every instance is fully desugared, and
``match_axiom(instantiate_axiom(s, b, ag), s, ag)`` gives back ``b``.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .errors import IncompleteBindings, SideConditionViolated
from .parsing import fold
from .syntax import (BOT, TOP, Atom, Formula, HatK, Not, Recv, Send,
                     as_conjunction, as_iff, as_implication, as_know, conj,
                     conjunction, disj, iff, implies, know, split_box, _empty)
from .words import count_ann, count_recv, format_word, views

METAVARS = {
    "Dist": ("a", "phi", "psi"),
    "Dist!": ("alpha", "phi", "psi"),
    "emptyK": ("a",),
    "emptyT": ("a", "phi"),
    "4": ("a", "phi"),
    "5": ("a", "phi"),
    "Exec!1": ("phi",),
    "Exec!2": ("alpha", "a"),
    "Exec!3": ("alpha", "a"),
    "Func!": ("alpha", "phi"),
    "Perm!": ("p", "alpha"),
    "empty!": ("alpha", "a", "phi"),
}
AXIOM_IDS = tuple(METAVARS)


def _box(w, f):
    return fold(w, f, box=True)


def _dia(w, f):
    return fold(w, f)


def _empty_of(agents) -> Formula:
    return _empty(tuple(sorted(set(agents))))


def instantiate_axiom(schema: str, bindings: Mapping, agents: Iterable[str]) -> Formula:
    if schema not in METAVARS:
        raise KeyError(f"unknown axiom {schema!r}")
    missing = [v for v in METAVARS[schema] if v not in bindings]
    if missing:
        raise IncompleteBindings(f"{schema} needs bindings for {', '.join(missing)}")
    agents = tuple(sorted(set(agents)))
    b = bindings
    match schema:
        case "Dist":
            a, f, g = b["a"], b["phi"], b["psi"]
            return implies(know(a, implies(f, g)), implies(know(a, f), know(a, g)))
        case "Dist!":
            w, f, g = tuple(b["alpha"]), b["phi"], b["psi"]
            return implies(_box(w, implies(f, g)), implies(_box(w, f), _box(w, g)))
        case "emptyK":
            e = _empty_of(agents)
            return implies(e, know(b["a"], e))
        case "emptyT":
            a, f = b["a"], b["phi"]
            return implies(_empty_of(agents), implies(know(a, f), f))
        case "4":
            a, f = b["a"], b["phi"]
            return implies(know(a, f), know(a, know(a, f)))
        case "5":
            a, f = b["a"], b["phi"]
            return implies(HatK(a, f), know(a, HatK(a, f)))
        case "Exec!1":
            f = b["phi"]
            return iff(Send(f, TOP), f)
        case "Exec!2":
            w, a = tuple(b["alpha"]), b["a"]
            if not count_recv(w, a) < count_ann(w):
                raise SideConditionViolated(
                    f"Exec!2 needs |alpha|_{a} < |alpha|_! (alpha = {format_word(w)})")
            return _box(w, Recv(a, TOP))
        case "Exec!3":
            w, a = tuple(b["alpha"]), b["a"]
            if not count_recv(w, a) >= count_ann(w):
                raise SideConditionViolated(
                    f"Exec!3 needs |alpha|_{a} >= |alpha|_! (alpha = {format_word(w)})")
            return implies(_empty_of(agents), _box(w, _box((a,), BOT)))
        case "Func!":
            w, f = tuple(b["alpha"]), b["phi"]
            return implies(_dia(w, f), _box(w, f))
        case "Perm!":
            p, w = b["p"], tuple(b["alpha"])
            p = Atom(p) if isinstance(p, str) else p
            if not isinstance(p, Atom):
                raise SideConditionViolated("Perm! binds p to an atom")
            return conj(implies(p, _box(w, p)), implies(Not(p), _box(w, Not(p))))
        case "empty!":
            w, a, f = tuple(b["alpha"]), b["a"], b["phi"]
            vs = views(w, a, agents)
            right = disj(_box(w, BOT), conjunction(know(a, _box(v, f)) for v in vs))
            return implies(_empty_of(agents), iff(_box(w, know(a, f)), right))
    raise AssertionError(schema)


# -- matching ------------------------------------------------------------------------

def box_splits(g: Formula) -> list:
    """All ``(w, body)`` with ``[w]body`` structurally equal to ``g``."""
    out = [((), g)]
    s = split_box(g)
    if s is not None:
        out.append(s)
    return out


def diamond_splits(g: Formula) -> list:
    """All ``(w, body)`` with ``<w>body`` structurally equal to ``g``."""
    out = [((), g)]
    w: list = []
    while isinstance(g, (Send, Recv)):
        w.append(g.ann if isinstance(g, Send) else g.agent)
        g = g.sub
        out.append((tuple(w), g))
    return out


def _candidates(f: Formula, schema: str) -> list:
    """Bindings that could make ``f`` an instance; verified afterwards."""
    imp = as_implication(f)
    out: list = []
    match schema:
        case "Dist" if imp:
            k = as_know(imp[0])
            if k and as_implication(k[1]):
                phi, psi = as_implication(k[1])
                out.append({"a": k[0], "phi": phi, "psi": psi})
        case "Dist!" if imp:
            for w, body in box_splits(imp[0]):
                parts = as_implication(body)
                if parts:
                    out.append({"alpha": w, "phi": parts[0], "psi": parts[1]})
        case "emptyK" if imp:
            k = as_know(imp[1])
            if k:
                out.append({"a": k[0]})
        case "emptyT" if imp:
            inner = as_implication(imp[1])
            if inner and as_know(inner[0]):
                out.append({"a": as_know(inner[0])[0], "phi": inner[1]})
        case "4" if imp:
            k = as_know(imp[0])
            if k:
                out.append({"a": k[0], "phi": k[1]})
        case "5" if imp:
            if isinstance(imp[0], HatK):
                out.append({"a": imp[0].agent, "phi": imp[0].sub})
        case "Exec!1":
            parts = as_iff(f)
            if parts:
                out.append({"phi": parts[1]})
        case "Exec!2":
            for w, body in box_splits(f):
                if isinstance(body, Recv) and body.sub is TOP:
                    out.append({"alpha": w, "a": body.agent})
        case "Exec!3" if imp:
            for w, body in box_splits(imp[1]):
                s = split_box(body)
                if s and len(s[0]) == 1 and isinstance(s[0][0], str):
                    out.append({"alpha": w, "a": s[0][0]})
        case "Func!" if imp:
            for w, body in box_splits(imp[1]):
                out.append({"alpha": w, "phi": body})
        case "Perm!":
            parts = as_conjunction(f)
            first = as_implication(parts[0]) if parts else None
            if first and isinstance(first[0], Atom):
                for w, _ in box_splits(first[1]):
                    out.append({"p": first[0].name, "alpha": w})
        case "empty!" if imp:
            parts = as_iff(imp[1])
            if parts:
                for w, body in box_splits(parts[0]):
                    k = as_know(body)
                    if k:
                        out.append({"alpha": w, "a": k[0], "phi": k[1]})
    return out


def match_axiom(f: Formula, schema: str, agents: Iterable[str]) -> dict | None:
    """Bindings under which ``f`` is an instance of ``schema``, or None."""
    agents = tuple(sorted(set(agents)))
    for b in _candidates(f, schema):
        if "a" in b and b["a"] not in agents:
            continue
        try:
            if instantiate_axiom(schema, b, agents) is f:
                return b
        except SideConditionViolated:
            continue
    return None


def identify_axiom(f: Formula, agents: Iterable[str]) -> tuple | None:
    """The first schema (in table order) that ``f`` instantiates, with its bindings."""
    for schema in AXIOM_IDS:
        b = match_axiom(f, schema, agents)
        if b is not None:
            return schema, b
    return None
