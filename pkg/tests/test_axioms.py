import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aalogic.axioms import (AXIOM_IDS, METAVARS, identify_axiom, instantiate_axiom,
                            match_axiom)
from aalogic.errors import IncompleteBindings, SideConditionViolated
from aalogic.generate import random_instance
from aalogic.parsing import parse_formula, parse_word
from aalogic.syntax import Atom, print_formula
from aalogic.validity import ModelFamily, ValidityQuery, check_star
from strategies import AGENTS, ATOMS

p = Atom("p")


def F(text):
    return parse_formula(text, AGENTS, ATOMS)


def W(text):
    return parse_word(text, AGENTS, ATOMS)


def test_exec1_example():
    assert match_axiom(F("<p>T <-> p"), "Exec!1", AGENTS) == {"phi": p}


def test_exec3_example():
    assert match_axiom(F("empty -> [a][a]F"), "Exec!3", AGENTS) == {"alpha": ("a",), "a": "a"}
    assert match_axiom(F("[T]<a>T"), "Exec!3", AGENTS) is None
    assert match_axiom(F("[T]<a>T"), "Exec!2", AGENTS) == {"alpha": W("T"), "a": "a"}


def test_side_conditions():
    with pytest.raises(SideConditionViolated):
        instantiate_axiom("Exec!2", {"alpha": (), "a": "a"}, AGENTS)
    with pytest.raises(SideConditionViolated):
        instantiate_axiom("Exec!3", {"alpha": W("p"), "a": "a"}, AGENTS)
    # a formula of the Exec!2 shape whose word breaks the condition is not an instance
    assert match_axiom(F("[b]<a>T"), "Exec!2", AGENTS) is None


def test_missing_bindings_and_unknown_schema():
    with pytest.raises(IncompleteBindings):
        instantiate_axiom("Dist", {"a": "a"}, AGENTS)
    with pytest.raises(KeyError):
        instantiate_axiom("B", {}, AGENTS)


def test_empty_bang_uses_canonical_view_order():
    b = {"alpha": W("p.a"), "a": "a", "phi": p}
    f = instantiate_axiom("empty!", b, AGENTS)
    text = print_formula(f)
    first, second, third = (text.index(s) for s in ("<p><a>~p", "<p><a><b>~p", "<p><b><a>~p"))
    assert first < second < third
    # the same conjuncts in another order do not match
    other = F("empty -> ([p.a]K a p <-> ([p.a]F | ((K a [p.a]p & K a [p.b.a]p) & K a [p.a.b]p)))")
    assert match_axiom(other, "empty!", AGENTS) is None
    assert match_axiom(f, "empty!", AGENTS) == b


@pytest.mark.parametrize("schema", AXIOM_IDS)
def test_round_trip(schema):
    rng = random.Random(schema)
    for _ in range(25):
        f = random_instance(rng, schema, AGENTS, ATOMS)
        b = match_axiom(f, schema, AGENTS)
        assert b is not None
        assert instantiate_axiom(schema, b, AGENTS) is f
        assert set(b) == set(METAVARS[schema])


def test_identify():
    assert identify_axiom(F("<a>T -> [a]T"), AGENTS)[0] == "Func!"
    assert identify_axiom(F("p -> q"), AGENTS) is None


@settings(max_examples=12)
@given(st.sampled_from(AXIOM_IDS), st.integers(0, 10**6))
def test_instances_survive_bounded_search(schema, seed):
    f = random_instance(random.Random(seed), schema, AGENTS, ATOMS, depth=2, max_len=2)
    r = check_star(ValidityQuery(f, ModelFamily(4, 3, seed, AGENTS, ATOMS), max_len=2))
    assert r.valid, r.witness


def test_non_star_valid_principles_are_refuted():
    # T without the empty guard, and B, are epsilon-valid only
    fam = ModelFamily(10, 3, 4, AGENTS, ATOMS)
    assert not check_star(ValidityQuery(F("K a [b]F -> [b]F"), fam)).valid
    assert not check_star(ValidityQuery(F("<b>T -> K a Khat a <b>T"), fam)).valid
