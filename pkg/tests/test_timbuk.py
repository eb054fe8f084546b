"""
Tests for reading and writing Timbuk documents.
"""

import os
import sys

import pytest
from hypothesis import given, settings

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from automata.core import RankedAlphabet, Transition, TreeAutomaton
from automata.generator import TvParams, tabakov_vardi
from formats.timbuk import (
    dump_timbuk,
    load_timbuk,
    parse_timbuk,
    read_timbuk_document,
    serialize_timbuk,
)
from utils.errors import INVALID_INPUT, TimbukSyntaxError

from .helpers import MIXED, small_automata

pytestmark = pytest.mark.unit


# ==================== Test: parse_timbuk ====================


def test_parse_sample(sample_timbuk):
    """Test comments, empty argument lists and state annotations"""
    a = parse_timbuk(sample_timbuk)

    assert [s.name for s in a.alphabet] == ["a", "b", "c"]
    assert a.state_names == ("q0", "q1", "q2")
    assert a.initial == frozenset({0})
    assert set(a.transitions) == {
        Transition(1, 1, ()),
        Transition(2, 2, ()),
        Transition(0, 0, (1, 2)),
        Transition(0, 0, (1, 1)),
    }


def test_document_keeps_name_and_bottom_up_rules(sample_timbuk):
    """Test the intermediate document"""
    doc = read_timbuk_document(sample_timbuk)

    assert doc.name == "pairs"
    assert doc.ops == [("a", 2), ("b", 0), ("c", 0)]
    assert ("a", ("q1", "q2"), "q0") in doc.transitions


def test_parse_arity_mismatch_reports_position():
    """Test that applying a binary symbol to one state fails at that symbol"""
    text = (
        "Ops a:2 b:0\nAutomaton A\nStates q\nFinal States q\n"
        "Transitions\nb -> q\na(q) -> q\n"
    )

    with pytest.raises(TimbukSyntaxError) as exc_info:
        parse_timbuk(text)

    assert exc_info.value.line == 7
    assert exc_info.value.column == 1
    assert exc_info.value.code == INVALID_INPUT
    assert "arity 2" in str(exc_info.value)


def test_parse_undeclared_symbol():
    """Test that symbols must appear in Ops"""
    text = "Ops b:0\nAutomaton A\nStates q\nFinal States q\nTransitions\nc -> q\n"

    with pytest.raises(TimbukSyntaxError) as exc_info:
        parse_timbuk(text)

    assert "undeclared symbol 'c'" in str(exc_info.value)
    assert (exc_info.value.line, exc_info.value.column) == (6, 1)


def test_parse_undeclared_state():
    """Test that rule states must be declared"""
    text = "Ops b:0\nAutomaton A\nStates q\nFinal States q\nTransitions\nb -> r\n"

    with pytest.raises(TimbukSyntaxError) as exc_info:
        parse_timbuk(text)

    assert (exc_info.value.line, exc_info.value.column) == (6, 6)


def test_parse_missing_section():
    """Test that a section keyword out of place is reported on its line"""
    with pytest.raises(TimbukSyntaxError) as exc_info:
        parse_timbuk("Ops b:0\nStates q\n")

    assert exc_info.value.line == 2


def test_parse_bad_character():
    """Test that a stray token after a rule is rejected"""
    with pytest.raises(TimbukSyntaxError):
        parse_timbuk(
            "Ops b:0\nAutomaton A\nStates q\nFinal States q\nTransitions\nb -> q ;\n"
        )


def test_parse_empty_transitions():
    """Test an automaton without rules"""
    a = parse_timbuk("Ops a:2 b:0\nAutomaton E\nStates\nFinal States\nTransitions\n")

    assert a.state_count == 0
    assert a.transitions == ()


# ==================== Test: serialize_timbuk ====================


def test_serialize_single_leaf_rule():
    """Test that one leaf rule is written as exactly one rule line"""
    a = TreeAutomaton.from_rules([("b", 0)], [("q0", "b", ())], ["q0"])

    text = serialize_timbuk(a, "leaf")

    assert text.splitlines()[-1] == "b -> q0"
    assert text.count("->") == 1
    assert "Final States q0" in text


def test_serialize_empty_automaton(empty_automaton):
    """Test the document of an automaton without states"""
    text = serialize_timbuk(empty_automaton)

    assert text.splitlines() == [
        "Ops a:2 b:0",
        "",
        "Automaton A",
        "States",
        "Final States",
        "Transitions",
    ]
    assert parse_timbuk(text) == empty_automaton


def test_serialize_renames_unusable_state_names():
    """Test the fallback to q<i> when names cannot be written"""
    a = TreeAutomaton(
        RankedAlphabet.from_pairs([("b", 0)]),
        2,
        frozenset({0}),
        (Transition(0, 0, ()),),
        ("p_q", "p_q"),
    )

    assert "States q0 q1" in serialize_timbuk(a)


def test_generated_automaton_round_trip():
    """Test that a generated automaton survives a write and read unchanged"""
    a = tabakov_vardi(TvParams(n=6, s=2, td=1.5, ad=0.5, seed=3))

    text = serialize_timbuk(a)
    again = parse_timbuk(text)

    assert again == a
    assert serialize_timbuk(again) == text


@settings(deadline=None, max_examples=30)
@given(small_automata(max_states=5, alphabet=MIXED))
def test_serialization_is_stable(a):
    """Test that serialization is a fixed point after one read"""
    text = serialize_timbuk(a)

    assert serialize_timbuk(parse_timbuk(text)) == text


def test_dump_and_load(tmp_path, pair_automaton):
    """Test file helpers"""
    path = tmp_path / "pair.timbuk"

    dump_timbuk(pair_automaton, path, "pair")

    assert load_timbuk(path) == pair_automaton
    assert path.read_text().startswith("Ops a:2 b:0")
