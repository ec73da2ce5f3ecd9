"""Generalization bookkeeping against an independent replay oracle.

The oracle reimplements the storage policy (assimilate, merge, keep lone)
on top of the public matcher, with its own count dictionaries and entity
index assignment.  Agreement means the probabilities really are
aligned_count / example_count and nothing ever drifts or disappears.
"""

from __future__ import annotations

import random

import pytest

from conftest import random_flat_case
from oracles import ReplayOracle
from groundschool.facts import (
    Case,
    Fact,
    ISA,
    concept,
    entity,
    gen_entity,
    percept,
)
from groundschool.generalize import (
    GeneralizationContext,
    StorageOutcome,
    Thresholds,
)

RRED = concept("RRed")
CV_RED = percept("CVRed")
CV_BOX = percept("CVBox")
CV_CYL = percept("CVCylinder")


def _example(obj: str, *attrs) -> Case:
    o = entity(obj)
    return Case([Fact(ISA, (o, a)) for a in attrs] + [Fact(ISA, (o, RRED))])


# -- frozen worked example --------------------------------------------------

def test_two_examples_merge_into_half_half_table():
    ctx = GeneralizationContext(RRED)
    r1 = ctx.add_example(_example("o1", CV_RED, CV_BOX))
    r2 = ctx.add_example(_example("o2", CV_RED, CV_CYL))
    assert r1.outcome == StorageOutcome.STORED and r1.generalization_id is None
    assert r2.outcome == StorageOutcome.MERGED and r2.generalization_id == "g0"
    (gen,) = ctx.generalizations
    assert gen.example_count == 2
    ge = gen_entity(0, ctx.context_id)
    assert gen.probabilities() == {
        Fact(ISA, (ge, CV_BOX)): 0.5,
        Fact(ISA, (ge, CV_CYL)): 0.5,
        Fact(ISA, (ge, CV_RED)): 1.0,
        Fact(ISA, (ge, RRED)): 1.0,
    }
    assert not ctx.examples


def test_third_example_shifts_the_minority_facts():
    ctx = GeneralizationContext(RRED)
    ctx.add_example(_example("o1", CV_RED, CV_BOX))
    ctx.add_example(_example("o2", CV_RED, CV_CYL))
    r3 = ctx.add_example(_example("o3", CV_RED, CV_BOX))
    assert r3.outcome == StorageOutcome.ASSIMILATED
    (gen,) = ctx.generalizations
    ge = gen_entity(0, ctx.context_id)
    assert gen.probabilities() == {
        Fact(ISA, (ge, CV_BOX)): 2 / 3,
        Fact(ISA, (ge, CV_CYL)): 1 / 3,
        Fact(ISA, (ge, CV_RED)): 1.0,
        Fact(ISA, (ge, RRED)): 1.0,
    }


def test_facts_are_never_deleted():
    ctx = GeneralizationContext(RRED)
    ctx.add_example(_example("o1", CV_RED, CV_BOX))
    ctx.add_example(_example("o2", CV_RED, CV_CYL))
    rng = random.Random(6)
    attrs = (CV_RED, CV_BOX, CV_CYL, percept("CVBlue"), percept("CVSphere"))
    known = set(ctx.generalizations[0].counts)
    for i in range(20):
        ctx.add_example(_example(f"e{i}", *rng.sample(attrs, 2)))
        now = set(ctx.generalizations[0].counts)
        assert known <= now
        known = now


def test_dissimilar_examples_stay_lone():
    ctx = GeneralizationContext(RRED)
    ctx.add_example(Case([Fact(ISA, (entity("o1"), CV_RED))]))
    result = ctx.add_example(Case([Fact(concept("RBig"), (entity("o2"), entity("o3")))]))
    assert result.outcome == StorageOutcome.STORED
    assert len(ctx.examples) == 2
    assert not ctx.generalizations


def test_assimilation_threshold_gates_merging():
    strict = GeneralizationContext(RRED, Thresholds(assimilation=0.6))
    a = Case([Fact(ISA, (entity("o1"), CV_RED)), Fact(ISA, (entity("o1"), CV_BOX))])
    b = Case([Fact(ISA, (entity("o2"), CV_RED)), Fact(ISA, (entity("o2"), percept("CVBlue")))])
    strict.add_example(a)
    assert strict.add_example(b).outcome == StorageOutcome.STORED  # 0.5 < 0.6

    loose = GeneralizationContext(RRED, Thresholds(assimilation=0.4))
    loose.add_example(a)
    assert loose.add_example(b).outcome == StorageOutcome.MERGED  # 0.5 >= 0.4


def test_empty_example_is_rejected():
    ctx = GeneralizationContext(RRED)
    with pytest.raises(ValueError):
        ctx.add_example(Case([]))


def test_context_requires_concept_symbol():
    with pytest.raises(ValueError):
        GeneralizationContext(entity("o1"))


# -- replay property --------------------------------------------------------

def test_replay_oracle_agrees_on_random_sequences():
    rng = random.Random(13)
    thresholds = Thresholds()
    for _ in range(100):
        ctx = GeneralizationContext(RRED, thresholds)
        oracle = ReplayOracle(RRED, thresholds)
        for _ in range(rng.randint(1, 6)):
            example = random_flat_case(rng)
            ctx.add_example(example)
            oracle.store(example)
            oracle.assert_agrees(ctx)


def test_snapshot_round_trip_preserves_everything():
    ctx = GeneralizationContext(RRED)
    ctx.add_example(_example("o1", CV_RED, CV_BOX))
    ctx.add_example(_example("o2", CV_RED, CV_CYL))
    ctx.add_example(Case([Fact(ISA, (entity("o9"), percept("CVSphere")))]))
    restored = GeneralizationContext.from_snapshot(ctx.snapshot(), {"RRed": RRED.kind})
    assert restored.snapshot() == ctx.snapshot()
    # and the restored context keeps absorbing identically
    extra = _example("o4", CV_RED, CV_BOX)
    assert ctx.add_example(extra).outcome == restored.add_example(extra).outcome
    assert ctx.generalizations[0].counts == restored.generalizations[0].counts
