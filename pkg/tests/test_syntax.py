import copy
import pickle
import warnings

import pytest
from hypothesis import given

from aalogic.errors import FormulaSyntaxError, LexError, ParseError
from aalogic.parsing import parse_formula, parse_word
from aalogic.syntax import (BOT, TOP, Atom, HatK, Not, Or, Recv, Send, SingleAgentWarning,
                            conj, conjunction, deg, empty_formula, iff, implies, know,
                            normalize, pretty_formula, print_formula, size, split_box,
                            subformulas)
from oracles import deg_by_rules, size_by_rules
from strategies import AGENTS, ATOMS, formulas

p, q = Atom("p"), Atom("q")


def P(text, agents=AGENTS, atoms=ATOMS, **kw):
    return parse_formula(text, agents, atoms, **kw)


class TestMeasures:
    def test_base_sizes(self):
        assert size(p) == 2
        assert size(TOP) == 1
        assert size(Not(p)) == 3
        assert size(Or(p, TOP)) == 3
        assert size(HatK("a", p)) == 3
        assert size(Recv("a", p)) == 4

    def test_announcement_counts_twice(self):
        assert size(Send(q, p)) == 2 * 2 + 2

    def test_degrees(self):
        assert deg(p) == 0
        assert deg(HatK("a", p)) == 1
        assert deg(Send(HatK("a", p), HatK("b", q))) == 2
        assert deg(Recv("a", HatK("b", p))) == 1
        assert deg(Or(HatK("a", p), p)) == 1

    @given(formulas())
    def test_measures_follow_rules(self, f):
        assert size(f) == size_by_rules(f)
        assert deg(f) == deg_by_rules(f)


class TestInterning:
    def test_structural_identity(self):
        assert Or(Not(p), q) is Or(Not(Atom("p")), Atom("q"))

    def test_immutable(self):
        with pytest.raises(AttributeError):
            p.name = "r"

    def test_pickle_and_copy_keep_identity(self):
        f = Send(p, HatK("a", Not(q)))
        assert pickle.loads(pickle.dumps(f)) is f
        assert copy.deepcopy(f) is f

    def test_bad_children_rejected(self):
        with pytest.raises(TypeError):
            Not("p")


class TestDerived:
    def test_bot_and_know(self):
        assert BOT is Not(TOP)
        assert know("a", p) is Not(HatK("a", Not(p)))

    def test_conjunction_folds_left(self):
        assert conjunction([p, q, TOP]) is conj(conj(p, q), TOP)
        assert conjunction([]) is TOP

    def test_empty_two_agents_mentions_all_pairs(self):
        e = empty_formula(["a", "b"])
        boxes = {s for s in subformulas(e) if split_box(s)}
        assert len(boxes) == 2      # [a]F and [b]F, each shared by the K parts

    def test_empty_single_agent_warns(self):
        with pytest.warns(SingleAgentWarning):
            empty_formula(["a"])

    def test_normalize_removes_double_negation(self):
        assert normalize(Not(Not(Send(Not(Not(p)), q)))) is Send(p, q)


class TestParsing:
    def test_precedence(self):
        assert P("p | q & p") is Or(p, conj(q, p))
        assert P("p -> q -> p") is implies(p, implies(q, p))
        assert P("p <-> q") is iff(p, q)
        assert P("~p | q") is Or(Not(p), q)

    def test_modalities(self):
        assert P("<a>p") is Recv("a", p)
        assert P("<q>p") is Send(q, p)
        assert P("<q.a>p") is Send(q, Recv("a", p))
        assert P("[a]F") is Not(Recv("a", Not(BOT)))
        assert P("K a p") is know("a", p)
        assert P("Khat a p") is HatK("a", p)

    def test_words(self):
        assert parse_word("p.a.(p | q).b", AGENTS, ATOMS) == (p, "a", Or(p, q), "b")
        assert parse_word("eps", AGENTS, ATOMS) == ()

    def test_word_metavariable(self):
        w = (p, "a")
        assert P("[$alpha]q", bindings={"alpha": w}) is P("[p.a]q")
        with pytest.raises(FormulaSyntaxError):
            P("[$beta]q", bindings={"alpha": w})

    def test_unicode_aliases(self):
        assert P("¬p ∨ ⊤") is Or(Not(p), TOP)
        assert P("⟨a⟩⊥") is Recv("a", BOT)

    def test_errors_carry_positions(self):
        with pytest.raises(LexError) as e:
            P("p # q")
        assert e.value.pos == 2
        with pytest.raises(ParseError):
            P("p |")
        with pytest.raises(ParseError):
            P("(p")

    def test_undeclared_identifier(self):
        with pytest.raises(ParseError):
            P("r")

    def test_agent_atom_clash(self):
        with pytest.raises(ValueError):
            parse_formula("p", ["p"], ["p"])


class TestPrinting:
    def test_canonical_forms(self):
        assert print_formula(Or(Not(p), HatK("a", TOP))) == "(~p | Khat a T)"
        assert print_formula(Send(Or(p, q), Recv("a", p))) == "<(p | q)><a>p"

    def test_pretty_resugars(self):
        assert pretty_formula(P("[a]F")) == "[a]F"
        assert pretty_formula(P("K a p -> q")) == "(K a p -> q)"
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert pretty_formula(empty_formula(["a", "b"]), ["a", "b"]) == "empty"

    @given(formulas(max_leaves=10))
    def test_round_trip_canonical(self, f):
        assert P(print_formula(f)) is f

    @given(formulas(max_leaves=10))
    def test_round_trip_pretty(self, f):
        assert P(pretty_formula(f, AGENTS)) is f
