"""Term layer: symbols, facts, cases, traces, and the s-expression format."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from groundschool.errors import MalformedTrace
from groundschool.facts import (
    AFTER,
    Case,
    Compound,
    EpisodicTrace,
    FINAL,
    Fact,
    GEN_ENT_FN,
    HELD,
    HOLDS_IN,
    ISA,
    START,
    Skolem,
    SymbolKind,
    concept,
    entity,
    fact_key,
    format_fact,
    gen_entity,
    is_bindable,
    make_trace,
    parse_fact,
    percept,
    predicate,
    reify,
    term_key,
    timepoint,
    trace_to_case,
    unreify,
)


def test_symbol_equality_is_by_name_and_kind():
    assert entity("o1") == entity("o1")
    assert entity("o1") != percept("o1")
    assert hash(entity("o1")) == hash(entity("o1"))
    assert len({entity("o1"), entity("o1"), percept("o1")}) == 2


def test_fact_predicate_position_is_validated():
    Fact(ISA, (entity("o1"), percept("CVRed")))
    Fact(concept("RLeftOf"), (entity("o1"), entity("o2")))  # concept tags allowed
    with pytest.raises(ValueError):
        Fact(entity("o1"), (entity("o2"),))
    with pytest.raises(ValueError):
        Fact(percept("CVRed"), (entity("o1"),))


def test_equal_facts_share_hash_and_set_identity():
    a = Fact(ISA, (entity("o1"), percept("CVRed")))
    b = Fact(ISA, (entity("o1"), percept("CVRed")))
    assert a == b
    assert hash(a) == hash(b)
    assert len({a, b}) == 1
    nested = Compound(GEN_ENT_FN, (0, concept("RRedMt")))
    assert hash(nested) == hash(Compound(GEN_ENT_FN, (0, concept("RRedMt"))))


def test_bindability_rules():
    assert is_bindable(entity("o1"))
    assert is_bindable(timepoint("T0"))
    assert is_bindable(gen_entity(0, concept("RRedMt")))
    assert is_bindable(Skolem(timepoint("T2")))
    assert not is_bindable(percept("CVRed"))
    assert not is_bindable(concept("RRed"))
    assert not is_bindable(predicate("dc"))
    # a reified fact is a plain compound, not a bindable unit
    assert not is_bindable(reify(Fact(HELD, (entity("o1"),))))


def test_case_canonical_order_is_deterministic():
    facts = [
        Fact(ISA, (entity("o2"), percept("CVRed"))),
        Fact(ISA, (entity("o1"), percept("CVRed"))),
        Fact(HELD, (entity("o1"),)),
    ]
    rng = random.Random(5)
    for _ in range(5):
        rng.shuffle(facts)
        case = Case(facts)
        assert [format_fact(f) for f in case.canonical] == [
            "(held o1)",
            "(isa o1 CVRed)",
            "(isa o2 CVRed)",
        ]
    assert case.entities == {entity("o1"), entity("o2")}


def test_case_union_never_drops_facts():
    base = Case([Fact(HELD, (entity("o1"),))])
    grown = base.union([Fact(ISA, (entity("o1"), percept("CVRed")))])
    assert base.facts < grown.facts
    assert len(base) == 1  # original untouched


def test_term_and_fact_keys_are_total_orders():
    terms = [entity("a"), timepoint("T0"), percept("CVRed"), 3, gen_entity(1, concept("XMt"))]
    keys = [term_key(t) for t in terms]
    assert len(set(keys)) == len(keys)
    assert sorted(keys) == sorted(keys, key=lambda k: k)  # comparable without TypeError


def test_make_trace_scaffolding():
    s0 = [Fact(ISA, (entity("o1"), percept("CVRed")))]
    s1 = [Fact(HELD, (entity("o1"),))]
    s2 = [Fact(ISA, (entity("o1"), percept("CVRed")))]
    trace = make_trace([s0, s1, s2])
    case = trace_to_case(trace)
    rendered = {format_fact(f) for f in case.canonical}
    assert "(isa T0 start)" in rendered
    assert "(after T1 T0)" in rendered
    assert "(after T2 T1)" in rendered
    assert "(final T2 T1)" in rendered
    assert "(H T1 (held o1))" in rendered
    # one H fact per state fact, plus start, two after links, one final
    assert len(case) == 3 + 1 + 2 + 1


def test_unfinished_trace_has_no_final_marker():
    trace = make_trace([[Fact(HELD, (entity("o1"),))]], final=False)
    case = trace_to_case(trace)
    assert not any(f.predicate == FINAL for f in case.canonical)
    assert any(f.predicate == ISA and f.args[1] == START for f in case.canonical)


def test_trace_validation():
    state = frozenset([Fact(HELD, (entity("o1"),))])
    with pytest.raises(MalformedTrace):
        EpisodicTrace(())
    with pytest.raises(MalformedTrace):
        EpisodicTrace(((timepoint("T0"), state),), final_marked=True)
    with pytest.raises(MalformedTrace):
        EpisodicTrace(((timepoint("T0"), state), (timepoint("T0"), state)))
    with pytest.raises(MalformedTrace):
        EpisodicTrace(((entity("T0"), state),), final_marked=False)


def test_reify_round_trip():
    fact = Fact(predicate("dc"), (entity("o1"), entity("o2")))
    assert unreify(reify(fact)) == fact


def test_parse_format_round_trip_with_declarations():
    declared = {"RRed": SymbolKind.CONCEPT, "RRedMt": SymbolKind.CONCEPT}
    for text in (
        "(isa o1 CVRed)",
        "(held o1)",
        "(dc o1 o2)",
        "(isa (GenEntFn 0 RRedMt) CVRed)",
        "(H T1 (held o1))",
        "(after T1 T0)",
    ):
        assert format_fact(parse_fact(text, declared)) == text


# Alphabet chosen to dodge the standard vocabulary (no "e", "ec", ...), and
# the predicates avoid the temporal ones whose arguments parse as timepoints.
_NAMES = st.text(alphabet="ghijk", min_size=1, max_size=4)


@given(
    pred=st.sampled_from(["isa", "dc", "held"]),
    names=st.lists(_NAMES, min_size=1, max_size=3),
)
def test_format_parse_inverse_property(pred, names):
    fact = Fact(predicate(pred), tuple(entity(n) for n in names))
    assert parse_fact(format_fact(fact)) == fact
