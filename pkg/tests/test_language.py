"""Utterance parsing: the three template forms and their edge cases."""

from __future__ import annotations

import pytest

from groundschool.errors import UnparseableUtterance
from groundschool.language import Grammar


@pytest.fixture()
def grammar():
    return Grammar()


def test_bare_property_sequence(grammar):
    parse = grammar.parse("red")
    assert len(parse.object_refs) == 1
    assert parse.object_refs[0].properties == ("red",)
    assert not parse.rel_refs and not parse.act_refs

    parse = grammar.parse("the big red box")
    assert parse.object_refs[0].properties == ("big", "red", "box")


def test_articles_are_dropped_everywhere(grammar):
    a = grammar.parse("the red box left of a blue cone")
    b = grammar.parse("red box left of blue cone")
    assert a == b


def test_relation_form(grammar):
    parse = grammar.parse("red box left of blue cone")
    assert [r.properties for r in parse.object_refs] == [("red", "box"), ("blue", "cone")]
    (rel,) = parse.rel_refs
    assert rel.rel_name == "left of"
    assert (rel.arg1, rel.arg2) == (parse.object_refs[0].ref_id, parse.object_refs[1].ref_id)
    assert not parse.act_refs


def test_longest_relation_phrase_wins(grammar):
    # "in front of" must not be split at "front of" or captured differently
    parse = grammar.parse("red box in front of blue cone")
    (rel,) = parse.rel_refs
    assert rel.rel_name == "in front of"
    assert parse.object_refs[0].properties == ("red", "box")
    assert parse.object_refs[1].properties == ("blue", "cone")


def test_action_form(grammar):
    parse = grammar.parse("move the blue cone right of the red cylinder")
    (act,) = parse.act_refs
    assert act.act_name == "move"
    assert act.relation == "right of"
    assert parse.ref(act.arg1).properties == ("blue", "cone")
    assert parse.ref(act.arg2).properties == ("red", "cylinder")
    assert not parse.rel_refs


def test_case_insensitive(grammar):
    assert grammar.parse("Move Blue Cone Right Of Red Cylinder").act_refs


def test_empty_and_verb_without_relation_fail(grammar):
    with pytest.raises(UnparseableUtterance):
        grammar.parse("   ")
    with pytest.raises(UnparseableUtterance):
        grammar.parse("move the blue cone")


def test_words_property_lists_reference_properties(grammar):
    parse = grammar.parse("red box left of blue cone")
    assert parse.words == ("red", "box", "blue", "cone")


def test_relationless_multiword_is_one_reference(grammar):
    # no relation phrase present, so the whole thing names one object
    parse = grammar.parse("blue cone red cylinder")
    assert len(parse.object_refs) == 1
    assert parse.object_refs[0].properties == ("blue", "cone", "red", "cylinder")
