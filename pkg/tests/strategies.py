"""Hypothesis strategies for formulas, words and models."""

from hypothesis import strategies as st

from aalogic.models import random_model
from aalogic.syntax import TOP, Atom, HatK, Not, Or, Recv, Send

AGENTS = ("a", "b")
ATOMS = ("p", "q")


def formulas(agents=AGENTS, atoms=ATOMS, max_leaves=6):
    leaf = st.one_of(st.just(TOP), st.sampled_from(atoms).map(Atom))
    ag = st.sampled_from(agents)

    def extend(inner):
        return st.one_of(
            inner.map(Not),
            st.tuples(inner, inner).map(lambda t: Or(*t)),
            st.tuples(ag, inner).map(lambda t: HatK(*t)),
            st.tuples(ag, inner).map(lambda t: Recv(*t)),
            st.tuples(leaf, inner).map(lambda t: Send(*t)),
        )

    return st.recursive(leaf, extend, max_leaves=max_leaves)


def words(agents=AGENTS, atoms=ATOMS, max_size=4, letters=None):
    letter = letters if letters is not None else st.one_of(
        st.sampled_from(agents), formulas(agents, atoms, max_leaves=2))
    return st.lists(letter, max_size=max_size).map(tuple)


def histories(agents=AGENTS, atoms=ATOMS, max_size=4):
    """Words built left to right, receiving only what has been sent."""
    ann = formulas(agents, atoms, max_leaves=2)

    @st.composite
    def build(draw):
        w = ()
        for _ in range(draw(st.integers(0, max_size))):
            ready = [a for a in agents
                     if sum(x == a for x in w) < sum(not isinstance(x, str) for x in w)]
            if ready and draw(st.booleans()):
                w += (draw(st.sampled_from(ready)),)
            else:
                w += (draw(ann),)
        return w

    return build()


def models(agents=AGENTS, atoms=ATOMS, max_states=4):
    return st.tuples(st.integers(1, max_states), st.integers(0, 2**32 - 1)).map(
        lambda t: random_model(t[0], agents, atoms, t[1]))
