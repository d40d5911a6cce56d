import json

import pytest
from hypothesis import given

from aalogic import FIXTURES
from aalogic.errors import (EmptyUpdate, PartitionError, SchemaError, UnknownAgent,
                            UnknownAtom, UnknownState)
from aalogic.models import (_build, dump_model, load_model, load_model_file,
                            model_problems, random_model, update_model, validate_model)
from aalogic.parsing import parse_word
from strategies import models


def owners():
    return load_model_file(FIXTURES / "owners.json")


def doc(**changes):
    d = json.loads((FIXTURES / "owners.json").read_text())
    d.update(changes)
    return d


def test_owners_loads():
    m = owners()
    assert m.states == ("pq", "p~q", "~pq", "~p~q")
    assert m.accessible("a", "pq") == ("pq", "p~q")
    assert m.related("b", "pq", "~pq") and not m.related("b", "pq", "p~q")
    assert m.holds("p", "p~q") and not m.holds("q", "p~q")


@given(models(max_states=5))
def test_dump_load_round_trip(m):
    assert load_model(dump_model(m)) == m
    assert validate_model(m)


def test_random_model_is_deterministic():
    assert random_model(4, "ab", "pq", 9) == random_model(4, "ab", "pq", 9)
    assert random_model(4, "ab", "pq", 9).name == "random:4:9"


@pytest.mark.parametrize("changes, error", [
    ({"states": "pq"}, SchemaError),
    ({"partitions": None}, SchemaError),
    ({"extra": 1}, SchemaError),
    ({"format": "other"}, SchemaError),
    ({"valuation": {"r": []}}, UnknownAtom),
    ({"partitions": {"a": [["pq", "p~q"]], "b": [["pq", "~pq"], ["p~q", "~p~q"]]}}, PartitionError),
    ({"partitions": {"a": [["pq", "p~q"], ["p~q", "~pq", "~p~q"]],
                     "b": [["pq", "~pq"], ["p~q", "~p~q"]]}}, PartitionError),
    ({"partitions": {"a": [["pq", "p~q"], ["~pq", "~p~q"]],
                     "b": [["pq", "~pq"], ["p~q", "~p~q"]], "c": [["pq"]]}}, UnknownAgent),
    ({"valuation": {"p": ["zz"], "q": []}}, UnknownState),
])
def test_bad_documents(changes, error):
    with pytest.raises(error):
        load_model(doc(**changes))


def test_not_json():
    with pytest.raises(SchemaError):
        load_model("{not json")


def test_problems_are_all_reported():
    m = owners()
    broken = _build(m.states, m.agents, m.atoms, {"a": [["pq"]]}, {})
    kinds = {k for k, _ in model_problems(broken)}
    assert {PartitionError} <= kinds
    assert len(model_problems(broken)) >= 2     # a misses states, b has no partition


def test_unknown_state_lookup():
    with pytest.raises(UnknownState):
        owners().check_state("nowhere")
    with pytest.raises(KeyError):
        owners().accessible("a", "nowhere")


def test_update_drops_states():
    m = owners()
    w = parse_word("(p | q).a", m.agents, m.atoms)
    assert update_model(m, w).states == ("pq", "p~q", "~pq")
    with pytest.raises(EmptyUpdate):
        update_model(m, parse_word("(p & ~p)", m.agents, m.atoms))
