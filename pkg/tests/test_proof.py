import textwrap

import pytest
from hypothesis import given

from aalogic import FIXTURES
from aalogic.errors import ProofFormatError, TooManyLetters
from aalogic.parsing import parse_formula, parse_word
from aalogic.proof import (ACCEPTED, ACCEPTED_BOUNDED, ACCEPTED_HYPOTHESES, REJECTED,
                           check_proof, check_tautology, format_proof, ka_recv_bot_proof,
                           load_proof, parse_proof)
from aalogic.syntax import Atom, Not, Or, conjunction
from mutations import KINDS, applicable, mutate
from oracles import tautology_brute
from strategies import AGENTS, ATOMS, formulas

KA_FIXTURES = {"eps": "ka_recv_bot_eps.prf", "p.a": "ka_recv_bot_p_a.prf",
               "p.q.a": "ka_recv_bot_p_q_a.prf"}


def F(text, alpha=()):
    return parse_formula(text, AGENTS, ATOMS, {"alpha": alpha})


def proof(text, **kw):
    return parse_proof(textwrap.dedent(text), **kw)


class TestTautology:
    def test_examples(self):
        assert check_tautology(F("Khat a p -> (~Khat a p -> F)"))
        assert check_tautology(F("F -> <a>q"))
        assert not check_tautology(F("p -> q"))
        assert not check_tautology(F("K a p -> p"))

    @given(formulas(max_leaves=8))
    def test_matches_brute_force(self, f):
        assert check_tautology(f) == tautology_brute(f)

    @given(formulas(max_leaves=5))
    def test_excluded_middle_instances(self, f):
        assert check_tautology(Or(f, Not(f)))

    def test_letter_limit(self):
        many = conjunction(Atom(f"x{i}") for i in range(21))
        with pytest.raises(TooManyLetters):
            check_tautology(many)


class TestFixtures:
    def test_box_diamond(self):
        r = check_proof(load_proof(FIXTURES / "box_diamond.prf"))
        assert r.verdict == ACCEPTED, r.failures
        assert r.conclusion is F("[T]p <-> ([T]F | <T>p)")

    @pytest.mark.parametrize("word", sorted(KA_FIXTURES))
    def test_ka_recv_bot(self, word):
        p = load_proof(FIXTURES / KA_FIXTURES[word])
        r = check_proof(p)
        assert r.verdict == ACCEPTED, r.failures
        alpha = parse_word(word, AGENTS, ATOMS)
        assert r.conclusion is F("empty -> [$alpha]K a [a]F", alpha)

    @pytest.mark.parametrize("word", sorted(KA_FIXTURES))
    def test_ka_fixtures_match_generator(self, word):
        generated = ka_recv_bot_proof(parse_word(word, AGENTS, ATOMS), AGENTS, ATOMS, agent="a")
        stored = load_proof(FIXTURES / KA_FIXTURES[word])
        assert [(ln.formula, ln.justification) for ln in stored.lines] == \
               [(ln.formula, ln.justification) for ln in generated.lines]

    def test_format_round_trip(self):
        p = load_proof(FIXTURES / "box_diamond.prf")
        again = parse_proof(format_proof(p))
        assert [ln.formula for ln in again.lines] == [ln.formula for ln in p.lines]

    def test_rstar_is_bounded(self):
        r = check_proof(load_proof(FIXTURES / "ka_recv_bot_rstar.prf"))
        assert r.verdict == ACCEPTED_BOUNDED
        assert r.instances_checked > 1


class TestRejections:
    def test_deleting_a_line_breaks_the_next_mp(self):
        p = load_proof(FIXTURES / "box_diamond.prf")
        p.lines = [ln for ln in p.lines if ln.index != 3]
        r = check_proof(p)
        assert r.verdict == REJECTED
        assert r.first_failure.index == 4 and r.first_failure.rule == "mp"

    @pytest.mark.parametrize("kind", KINDS)
    def test_each_mutation_kind(self, kind):
        p = load_proof(FIXTURES / "box_diamond.prf")
        for ln in p.lines:
            if applicable(ln, kind):
                r = check_proof(mutate(p, ln.index, kind))
                assert r.first_failure is not None and r.first_failure.index == ln.index, (kind, ln.index)

    def test_citing_forward_is_rejected(self):
        r = check_proof(proof("""\
            agents: a, b
            atoms: p, q
            1. p ; mp 2 3
            2. p -> p ; taut
            3. (p -> p) -> p ; hyp h
            """))
        assert r.first_failure.index == 1

    def test_hypotheses_are_flagged(self):
        r = check_proof(proof("""\
            agents: a, b
            atoms: p, q
            1. p ; hyp h
            2. K a p ; neck 1 a
            """))
        assert r.verdict == ACCEPTED_HYPOTHESES

    def test_necessitation_rules(self):
        r = check_proof(proof("""\
            agents: a, b
            atoms: p, q
            1. p -> p ; taut
            2. [p.a](p -> p) ; nec! 1 p.a
            3. K b [p.a](p -> p) ; neck 2 b
            4. K a (p -> p) ; neck 2 a
            """))
        assert [x.ok for x in r.results] == [True, True, True, False]

    def test_double_negation_is_ignored(self):
        r = check_proof(proof("""\
            agents: a, b
            atoms: p, q
            1. ~~<p>T <-> p ; axiom Exec!1
            """))
        assert r.verdict == ACCEPTED


class TestTemplates:
    TEMPLATE = """\
        agents: a, b
        atoms: p, q
        param: alpha
        1. p -> p ; taut
        2. [$alpha](p -> p) ; nec! 1 $alpha
        3. [$alpha](p -> p) -> (empty -> [$alpha](p -> p)) ; taut
        4. empty -> [$alpha](p -> p) ; mp 2 3
        """

    def test_file_template(self, tmp_path):
        (tmp_path / "t.prf").write_text(textwrap.dedent(self.TEMPLATE))
        main = tmp_path / "main.prf"
        main.write_text("agents: a, b\natoms: p, q\n1. p -> p ; rstar t.prf vocab=p bound=2\n")
        r = check_proof(load_proof(main))
        assert r.verdict == ACCEPTED_BOUNDED
        main.write_text("agents: a, b\natoms: p, q\n1. p -> q ; rstar t.prf vocab=p bound=2\n")
        assert check_proof(load_proof(main)).verdict == REJECTED

    def test_template_needs_binding(self):
        with pytest.raises(ProofFormatError):
            proof(self.TEMPLATE)

    def test_builtin_rejects_other_targets(self):
        r = check_proof(proof("""\
            agents: a, b
            atoms: p, q
            1. K a [b]F ; rstar builtin:ka_recv_bot vocab=p bound=1
            """))
        assert r.verdict == REJECTED


class TestFormat:
    @pytest.mark.parametrize("text", [
        "1. p ; taut\n",                                         # no header
        "agents: a\natoms: p\n1. p taut\n",                      # no separator
        "agents: a\natoms: p\n2. p ; taut\n1. p ; taut\n",       # decreasing
        "agents: a\natoms: p\n1. p ; magic\n",                   # unknown rule
        "agents: a\natoms: p\n1. p ; axiom B\n",                 # unknown axiom
        "agents: a\natoms: p\n1. p | ; taut\n",                  # bad formula
        "agents: a\natoms: p\n1. p ; mp 1\n",                    # arity
    ])
    def test_errors(self, text):
        with pytest.raises(ProofFormatError):
            parse_proof(text)

    def test_error_carries_line(self):
        with pytest.raises(ProofFormatError) as e:
            parse_proof("agents: a\natoms: p\n\n1. p | ; taut\n")
        assert e.value.line == 4


class TestSoundnessBridge:
    @pytest.mark.parametrize("name", ["box_diamond.prf", *KA_FIXTURES.values()])
    def test_accepted_lines_survive_search(self, name):
        from aalogic.validity import ModelFamily, ValidityQuery, check_star
        p = load_proof(FIXTURES / name)
        assert check_proof(p).verdict == ACCEPTED
        fam = ModelFamily(20, 4, 17, p.agents, p.atoms).models()
        for ln in p.lines:
            r = check_star(ValidityQuery(ln.formula, fam))
            assert r.valid, (ln.index, r.witness)
