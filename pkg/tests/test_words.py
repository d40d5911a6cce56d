import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aalogic.errors import NotAHistory
from aalogic.parsing import parse_word
from aalogic.syntax import Atom, HatK
from aalogic.words import (as_history, can_receive, counts, format_word, is_history,
                           ll_less, measure, proj_read, view_rel, views, word_deg,
                           word_size)
from oracles import history, read, views_brute
from strategies import AGENTS, ATOMS, histories, words

p = Atom("p")


def W(text):
    return parse_word(text, AGENTS, ATOMS)


def test_history_examples():
    assert is_history(W("p.q.a.a"))
    assert is_history(W("p.a.q"))
    assert not is_history(W("p.a.a.q"))
    assert not is_history(W("p.q.a.a.a"))
    assert is_history(())


def test_as_history_raises():
    with pytest.raises(NotAHistory):
        as_history(("a",))


@given(words(max_size=6, letters=st.sampled_from(["a", "b", p])))
def test_history_agrees_with_prefix_definition(w):
    assert is_history(w) == history(w)


def test_counts_and_reading():
    w = W("p.q.a")
    c = counts(w, AGENTS)
    assert c.ann == 2 and c.recv == {"a": 1, "b": 0}
    assert c.read("a") == 1
    assert proj_read(w, "a") == (p,)
    assert can_receive(w, "b") and can_receive(w, "a")
    assert not can_receive(W("p.a"), "a")


def test_size_and_degree_of_words():
    assert word_size(()) == 0
    assert word_size(W("p.a")) == 3
    assert word_deg((HatK("a", p), "a", HatK("b", HatK("a", p)))) == 3


def test_views_example():
    assert [format_word(v) for v in views(W("p.a"), "a", AGENTS)] == ["p.a", "p.a.b", "p.b.a"]
    assert views(W("p.a"), "b", AGENTS) == ((),)
    assert views((), "a", AGENTS) == ((),)


@settings(max_examples=60)
@given(histories(max_size=5))
def test_views_match_brute_force(alpha):
    for a in AGENTS:
        got = views(alpha, a, AGENTS)
        assert len(set(got)) == len(got)
        assert set(got) == views_brute(alpha, a, AGENTS)


@given(histories(max_size=5), st.sampled_from(AGENTS))
def test_view_rel_matches_views(alpha, a):
    for beta in views(alpha, a, AGENTS):
        assert view_rel(alpha, beta, a)
        assert read(beta, a) == read(alpha, a)


def test_view_rel_not_reflexive_nor_symmetric():
    pa, paq = W("p.a"), W("p.a.q")
    assert not view_rel(paq, paq, "a")
    assert view_rel(paq, pa, "a") and not view_rel(pa, paq, "a")


def test_views_are_sorted_by_length_then_text():
    vs = views(W("p.q.a.a"), "a", AGENTS)
    keys = [(len(v), [x if isinstance(x, str) else format_word((x,)) for x in v]) for v in vs]
    assert keys == sorted(keys)


def test_ll_less_examples():
    from aalogic.syntax import Not
    assert ll_less(((), p), ((), Not(p)))
    alpha = W("p.a")
    for beta in views(alpha, "a", AGENTS):
        assert ll_less((beta, p), (alpha, HatK("a", p)))
    assert measure(W("p.a"), p) == (0, 5)
