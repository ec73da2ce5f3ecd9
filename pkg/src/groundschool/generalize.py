"""Incremental analogical generalization.

A concept accumulates examples.  Each new example is matched against the
concept's generalizations (probability-weighted) and then its stored lone
examples, in insertion order; the first match at or above the assimilation
threshold absorbs it.  Two merged examples become a generalization whose fact
probabilities are aligned_count / example_count, with aligned entities
replaced by abstract GenEntFn terms.  Facts are never deleted and
generalizations never merge with each other; probabilities just decay.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .facts import (
    Case,
    Compound,
    Fact,
    Symbol,
    SymbolKind,
    Term,
    concept as concept_symbol,
    fact_key,
    format_fact,
    gen_entity,
    is_bindable,
    parse_fact,
    term_key,
)
from .mapping import Mapping, match


@dataclass(frozen=True)
class Thresholds:
    """Operating points for assimilation, concept membership, and acceptance."""

    assimilation: float = 0.01
    probability: float = 0.6
    match: float = 0.75


class StorageOutcome(str, Enum):
    ASSIMILATED = "assimilated"   # absorbed into an existing generalization
    MERGED = "merged"             # fused with a stored example into a new one
    STORED = "stored"             # kept as a lone example


@dataclass
class StorageResult:
    outcome: StorageOutcome
    generalization_id: str | None = None


class Generalization:
    """A probabilistic fact summary over the examples absorbed so far."""

    __slots__ = ("gen_id", "context_id", "example_count", "next_entity_index", "counts")

    def __init__(self, gen_id: str, context_id: Symbol):
        self.gen_id = gen_id
        self.context_id = context_id
        self.example_count = 0
        self.next_entity_index = 0
        self.counts: dict[Fact, int] = {}

    def fresh_entity(self) -> Compound:
        term = gen_entity(self.next_entity_index, self.context_id)
        self.next_entity_index += 1
        return term

    def probability(self, fact: Fact) -> float:
        return self.counts[fact] / self.example_count

    def probabilities(self) -> dict[Fact, float]:
        n = self.example_count
        return {f: c / n for f, c in sorted(self.counts.items(), key=lambda kv: fact_key(kv[0]))}

    def facts(self) -> Case:
        return Case(self.counts)

    def concept_facts(self, probability_threshold: float) -> dict[Fact, float]:
        """Facts at or above the probability threshold, with probabilities as weights."""
        n = self.example_count
        return {
            f: c / n
            for f, c in sorted(self.counts.items(), key=lambda kv: fact_key(kv[0]))
            if c / n >= probability_threshold
        }


class GeneralizationContext:
    """All analogical knowledge held for one concept."""

    def __init__(self, concept: Symbol, thresholds: Thresholds | None = None):
        if concept.kind != SymbolKind.CONCEPT:
            raise ValueError(f"context requires a concept symbol, got {concept!r}")
        self.concept = concept
        self.context_id = concept_symbol(f"{concept.name}Mt")
        self.thresholds = thresholds or Thresholds()
        self.generalizations: list[Generalization] = []
        self.examples: list[Case] = []
        self._gen_serial = 0

    # -- storage ------------------------------------------------------------

    def add_example(self, example: Case) -> StorageResult:
        if not example.facts:
            raise ValueError("refusing to store an empty example")
        for gen in self.generalizations:
            m = match(gen.facts(), example, gen.probabilities())
            if m.score >= self.thresholds.assimilation:
                self._absorb(gen, example, m)
                return StorageResult(StorageOutcome.ASSIMILATED, gen.gen_id)
        for i, stored in enumerate(self.examples):
            m = match(stored, example)
            if m.score >= self.thresholds.assimilation:
                gen = self._merge(stored, example, m)
                self.examples.pop(i)
                self.generalizations.append(gen)
                return StorageResult(StorageOutcome.MERGED, gen.gen_id)
        self.examples.append(example)
        return StorageResult(StorageOutcome.STORED)

    def _absorb(self, gen: Generalization, example: Case, m: Mapping) -> None:
        gen.example_count += 1
        corresponded_targets = set()
        for corr in m.correspondences:
            gen.counts[corr.base_fact] += 1
            corresponded_targets.add(corr.target_fact)
        # New facts enter at count 1, rewritten into the generalization's
        # entity space: bound example terms take their existing GenEntFn
        # partner, unbound ones get fresh indexes.
        reverse = {t: b for b, t in m.bindings}

        def into_gen_space(term: Term) -> Term:
            hit = reverse.get(term)
            if hit is None:
                hit = gen.fresh_entity()
                reverse[term] = hit
            return hit

        for fact in example.canonical:
            if fact in corresponded_targets:
                continue
            rewritten = _rewrite(fact, into_gen_space)
            gen.counts[rewritten] = gen.counts.get(rewritten, 0) + 1

    def _merge(self, base_example: Case, target_example: Case, m: Mapping) -> Generalization:
        gen = Generalization(f"g{self._gen_serial}", self.context_id)
        self._gen_serial += 1
        gen.example_count = 2

        assignments: dict[tuple[str, Term], Term] = {}
        forward = m.binding_map
        reverse = {t: b for b, t in m.bindings}

        def base_term(term: Term) -> Term:
            key = ("b", term)
            if key not in assignments:
                assignments[key] = gen.fresh_entity()
            return assignments[key]

        def target_term(term: Term) -> Term:
            partner = reverse.get(term)
            if partner is not None:
                return base_term(partner)
            key = ("t", term)
            if key not in assignments:
                assignments[key] = gen.fresh_entity()
            return assignments[key]

        corresponded_base = {c.base_fact for c in m.correspondences}
        corresponded_target = {c.target_fact for c in m.correspondences}
        # Index assignment follows first appearance: corresponded facts in
        # canonical order, then base-only facts, then target-only facts.
        for fact in base_example.canonical:
            if fact in corresponded_base:
                gen.counts[_rewrite(fact, base_term)] = 2
        for fact in base_example.canonical:
            if fact not in corresponded_base:
                rewritten = _rewrite(fact, base_term)
                gen.counts[rewritten] = gen.counts.get(rewritten, 0) + 1
        for fact in target_example.canonical:
            if fact not in corresponded_target:
                rewritten = _rewrite(fact, target_term)
                gen.counts[rewritten] = gen.counts.get(rewritten, 0) + 1
        return gen

    # -- introspection ------------------------------------------------------

    def sources(self) -> Iterator[tuple[str, Case, dict[Fact, float]]]:
        """Match bases in precedence order: generalizations, then lone examples."""
        for gen in self.generalizations:
            yield gen.gen_id, gen.facts(), gen.probabilities()
        for i, example in enumerate(self.examples):
            yield f"e{i}", example, {f: 1.0 for f in example.canonical}

    def example_total(self) -> int:
        return sum(g.example_count for g in self.generalizations) + len(self.examples)

    # -- snapshots ----------------------------------------------------------

    def snapshot(self) -> dict:
        return {
            "concept": self.concept.name,
            "context_id": self.context_id.name,
            "thresholds": {
                "assimilation": self.thresholds.assimilation,
                "probability": self.thresholds.probability,
                "match": self.thresholds.match,
            },
            "generalizations": [
                {
                    "id": g.gen_id,
                    "example_count": g.example_count,
                    "next_entity_index": g.next_entity_index,
                    "facts": [
                        {
                            "fact": format_fact(f),
                            "aligned_count": c,
                            "probability": c / g.example_count,
                        }
                        for f, c in sorted(g.counts.items(), key=lambda kv: fact_key(kv[0]))
                    ],
                }
                for g in self.generalizations
            ],
            "examples": [[format_fact(f) for f in ex.canonical] for ex in self.examples],
            "gen_serial": self._gen_serial,
        }

    @classmethod
    def from_snapshot(cls, payload: dict, declared=None) -> "GeneralizationContext":
        ctx = cls(concept_symbol(payload["concept"]), Thresholds(**payload["thresholds"]))
        ctx._gen_serial = payload.get("gen_serial", len(payload["generalizations"]))
        kinds = dict(declared or {})
        kinds.setdefault(payload["concept"], SymbolKind.CONCEPT)
        kinds.setdefault(payload["context_id"], SymbolKind.CONCEPT)
        for g_payload in payload["generalizations"]:
            gen = Generalization(g_payload["id"], ctx.context_id)
            gen.example_count = g_payload["example_count"]
            gen.next_entity_index = g_payload["next_entity_index"]
            for entry in g_payload["facts"]:
                gen.counts[parse_fact(entry["fact"], kinds)] = entry["aligned_count"]
            ctx.generalizations.append(gen)
        for ex_payload in payload["examples"]:
            ctx.examples.append(Case(parse_fact(s, kinds) for s in ex_payload))
        return ctx


def _rewrite(fact: Fact, mapper) -> Fact:
    def visit(term: Term) -> Term:
        if is_bindable(term):
            return mapper(term)
        if isinstance(term, Compound):
            return Compound(term.head, tuple(visit(a) for a in term.args))
        return term

    return Fact(fact.predicate, tuple(visit(a) for a in fact.args))
