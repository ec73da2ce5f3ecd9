"""Concept memory: create, store, query, and project over generalization contexts.

The memory is a registry of per-concept generalization contexts plus the
word-to-concept ledger.  Queries match a concept's threshold-filtered facts
against a scene and return pattern-unifying inferences; projection matches an
action concept against a partial episodic trace and returns the immediate
next state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .errors import DuplicateConcept, InvalidCommand, NoProjection, UnknownContext
from .facts import (
    AFTER,
    Case,
    Compound,
    Fact,
    FINAL,
    HOLDS_IN,
    Skolem,
    Symbol,
    SymbolKind,
    Term,
    concept as concept_symbol,
    fact_key,
    fact_terms,
    format_fact,
    is_bindable,
    parse_fact,
    term_key,
    unreify,
)
from .generalize import GeneralizationContext, StorageResult, Thresholds
from .mapping import Mapping as MatchResult, enumerate_mappings, match


class ConceptKind(str, Enum):
    VISUAL = "visual"
    SPATIAL = "spatial"
    ACTION = "action"


@dataclass(frozen=True)
class Variable:
    """A query pattern variable, written ?name."""

    name: str

    def __repr__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True)
class FactPattern:
    """A fact template with at least one distinct variable, e.g. (isa ?o RRed)."""

    predicate: Symbol
    args: tuple[Variable | Term, ...]

    def __post_init__(self) -> None:
        variables = [a for a in self.args if isinstance(a, Variable)]
        if not variables:
            raise ValueError("a pattern needs at least one variable")
        if len({v.name for v in variables}) != len(variables):
            raise ValueError("pattern variables must be distinct")

    def concept(self) -> Symbol:
        if self.predicate.kind == SymbolKind.CONCEPT:
            return self.predicate
        for arg in self.args:
            if isinstance(arg, Symbol) and arg.kind == SymbolKind.CONCEPT:
                return arg
        raise ValueError("pattern names no concept")

    def unify(self, fact: Fact) -> dict[str, Term] | None:
        if fact.predicate != self.predicate or len(fact.args) != len(self.args):
            return None
        binding: dict[str, Term] = {}
        for pat, got in zip(self.args, fact.args):
            if isinstance(pat, Variable):
                binding[pat.name] = got
            elif pat != got:
                return None
        return binding


def _contains_skolem(fact: Fact) -> bool:
    return any(isinstance(t, Skolem) for t in fact_terms(fact))


@dataclass(frozen=True)
class ScoredInference:
    fact: Fact
    score: float
    source: str
    # Skolem-free expected facts the mapping wanted in the scene but did not
    # find; verification layers use these to reject partial instantiations.
    unmet: tuple[Fact, ...] = ()

    def binding(self, pattern: FactPattern) -> dict[str, Term]:
        return pattern.unify(self.fact) or {}


@dataclass(frozen=True)
class QueryResult:
    pattern: FactPattern
    inferences: tuple[ScoredInference, ...]
    accepted: tuple[ScoredInference, ...]

    def accepted_facts(self) -> tuple[Fact, ...]:
        return tuple(i.fact for i in self.accepted)


@dataclass(frozen=True)
class Projection:
    facts: tuple[Fact, ...]
    terminal: bool
    score: float
    source: str


@dataclass
class MemoryCounters:
    creates: int = 0
    stores: int = 0
    queries: int = 0
    projections: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "creates": self.creates,
            "stores": self.stores,
            "queries": self.queries,
            "projections": self.projections,
        }


def concept_name_for(word: str) -> str:
    return "R" + "".join(part.capitalize() for part in word.split())


class ConceptMemory:
    """The agent-facing memory interface."""

    def __init__(self, thresholds: Thresholds | None = None):
        self.thresholds = thresholds or Thresholds()
        self.contexts: dict[Symbol, GeneralizationContext] = {}
        self.kinds: dict[Symbol, ConceptKind] = {}
        self.words: dict[str, Symbol] = {}
        self.counters = MemoryCounters()

    # -- commands -----------------------------------------------------------

    def create(self, word: str, kind: ConceptKind) -> Symbol:
        """Mint a concept symbol for a word and open its empty context."""
        if word in self.words:
            raise DuplicateConcept(f"word {word!r} already names {self.words[word].name}")
        symbol = concept_symbol(concept_name_for(word))
        if symbol in self.contexts:
            raise DuplicateConcept(f"concept {symbol.name} already exists")
        self.contexts[symbol] = GeneralizationContext(symbol, self.thresholds)
        self.kinds[symbol] = kind
        self.words[word] = symbol
        self.counters.creates += 1
        return symbol

    def store(self, facts: Case | Iterable[Fact], concept: Symbol) -> StorageResult:
        ctx = self._context(concept)
        case = facts if isinstance(facts, Case) else Case(facts)
        if not any(_mentions(f, concept) for f in case.canonical):
            raise InvalidCommand(f"example never mentions {concept.name}")
        result = ctx.add_example(case)
        self.counters.stores += 1
        return result

    def query(self, scene: Case, pattern: FactPattern) -> QueryResult:
        """Inferences supported by the pattern's concept in this scene.

        For each candidate source (each generalization, then each lone
        example) the concept's tag facts (those mentioning the concept
        symbol) are split out: matching and the score run over the remaining
        content facts, and tag facts are projected through each mapping's
        bindings as inference templates.  The best-scoring source wins; every
        injective binding of a small base contributes its own inferences.
        """
        concept = pattern.concept()
        ctx = self._context(concept)
        self.counters.queries += 1

        best: tuple[float, str, list[ScoredInference]] | None = None
        for source_id, _base, weights in ctx.sources():
            filtered = self._filtered(concept, weights, self.thresholds.probability)
            if filtered is None:
                continue
            content, content_weights, tags = filtered
            if not content.facts:
                continue
            mappings = enumerate_mappings(content, scene, content_weights)
            inferences: dict[Fact, ScoredInference] = {}
            top = 0.0
            for m in mappings:
                top = max(top, m.score)
                unmet = tuple(f for f in m.candidate_inferences if not _contains_skolem(f))
                binding = m.binding_map
                for tag in tags:
                    inf = _substituted(tag, binding)
                    if inf is None or _contains_skolem(inf):
                        continue
                    if pattern.unify(inf) is None:
                        continue
                    prior = inferences.get(inf)
                    better = prior is None or m.score > prior.score or (
                        m.score == prior.score and prior.unmet and not unmet
                    )
                    if better:
                        inferences[inf] = ScoredInference(inf, m.score, source_id, unmet)
            if best is None or top > best[0]:
                best = (top, source_id, list(inferences.values()))

        found = [] if best is None else best[2]
        found.sort(key=lambda i: (-i.score, fact_key(i.fact)))
        accepted = tuple(i for i in found if i.score >= self.thresholds.match)
        return QueryResult(pattern, tuple(found), accepted)

    def project(self, trace: Case, concept: Symbol) -> Projection:
        """The next expected state along an action concept's trajectory.

        Matches the concept (full concept facts, tag included, since stored
        traces carry their tags) against the partial trace, finds the unique
        skolem timepoint t with an inferred (after t T_current), and returns
        the de-skolemized H facts for t plus a terminal flag when (final t _)
        is also inferred.
        """
        ctx = self._context(concept)
        self.counters.projections += 1
        current = _current_timepoint(trace)

        best: tuple[float, str, MatchResult] | None = None
        for source_id, _base, weights in ctx.sources():
            kept = {
                f: w
                for f, w in weights.items()
                if w >= self.thresholds.probability or _mentions(f, concept)
            }
            if not kept:
                continue
            m = match(Case(kept), trace, kept)
            if best is None or m.score > best[0]:
                best = (m.score, source_id, m)
        if best is None:
            raise NoProjection(f"{concept.name} holds no usable knowledge")

        score, source_id, m = best
        candidates = []
        for inf in m.candidate_inferences:
            if inf.predicate == AFTER and len(inf.args) == 2:
                nxt, prev = inf.args
                if isinstance(nxt, Skolem) and prev == current:
                    candidates.append(nxt)
        if not candidates:
            raise NoProjection("no successor state is inferable from here")
        candidates.sort(key=term_key)
        chosen = candidates[0]

        facts = []
        terminal = False
        for inf in m.candidate_inferences:
            if inf.predicate == HOLDS_IN and len(inf.args) == 2 and inf.args[0] == chosen:
                inner = inf.args[1]
                if isinstance(inner, Compound) and not _contains_skolem_term(inner):
                    facts.append(unreify(inner))
            if inf.predicate == FINAL and len(inf.args) == 2 and inf.args[0] == chosen:
                terminal = True
        if not facts:
            raise NoProjection("successor state carries no grounded facts")
        facts.sort(key=fact_key)
        return Projection(tuple(facts), terminal, score, source_id)

    def final_state_template(self, concept: Symbol):
        """Role pair and expected facts at an action concept's final timepoint.

        Reads the most-supported source (largest generalization first, lone
        examples as a last resort) and returns ((role_a, role_b), facts) with
        facts restricted to holdings over the role entities, or None when the
        context holds no usable action structure.
        """
        ctx = self._context(concept)
        ranked: list[tuple[int, int, dict[Fact, float]]] = []
        for idx, gen in enumerate(ctx.generalizations):
            ranked.append((gen.example_count, idx, gen.probabilities()))
        offset = len(ctx.generalizations)
        for i, example in enumerate(ctx.examples):
            ranked.append((1, offset + i, {f: 1.0 for f in example.facts}))
        ranked.sort(key=lambda t: (-t[0], t[1]))
        for _, _, weights in ranked:
            kept = {f for f, w in weights.items() if w >= self.thresholds.probability}
            tag = next(
                (f for f in kept if f.predicate == concept and len(f.args) == 2), None
            )
            if tag is None:
                continue
            role_a, role_b = tag.args
            roles = {role_a, role_b}
            final_t = next(
                (f.args[0] for f in kept if f.predicate == FINAL and len(f.args) == 2),
                None,
            )
            if final_t is None:
                continue
            facts = []
            for f in kept:
                if f.predicate == HOLDS_IN and len(f.args) == 2 and f.args[0] == final_t:
                    inner = f.args[1]
                    if not isinstance(inner, Compound):
                        continue
                    inner_fact = unreify(inner)
                    bindables = {t for t in fact_terms(inner_fact) if is_bindable(t)}
                    if bindables <= roles:
                        facts.append(inner_fact)
            if facts:
                facts.sort(key=fact_key)
                return (role_a, role_b), tuple(facts)
        return None

    # -- helpers ------------------------------------------------------------

    def _context(self, concept: Symbol) -> GeneralizationContext:
        ctx = self.contexts.get(concept)
        if ctx is None:
            raise UnknownContext(f"no context for {concept.name}")
        return ctx

    def _filtered(self, concept: Symbol, weights: dict[Fact, float], threshold: float):
        kept = {f: w for f, w in weights.items() if w >= threshold}
        if not kept:
            return None
        tags = []
        content = {}
        for f, w in kept.items():
            if _mentions(f, concept):
                tags.append(f)
            else:
                content[f] = w
        return Case(content), content, sorted(tags, key=fact_key)

    def concept_for_word(self, word: str) -> Symbol | None:
        return self.words.get(word)

    def kind_of(self, concept: Symbol) -> ConceptKind:
        return self.kinds[concept]

    # -- snapshots ----------------------------------------------------------

    def snapshot(self) -> dict:
        return {
            "thresholds": {
                "assimilation": self.thresholds.assimilation,
                "probability": self.thresholds.probability,
                "match": self.thresholds.match,
            },
            "counters": self.counters.as_dict(),
            "words": {w: s.name for w, s in sorted(self.words.items())},
            "kinds": {s.name: k.value for s, k in sorted(self.kinds.items(), key=lambda kv: kv[0].name)},
            "contexts": [self.contexts[s].snapshot() for s in sorted(self.contexts, key=lambda s: s.name)],
        }

    def snapshot_text(self) -> str:
        return json.dumps(self.snapshot(), indent=2, sort_keys=True)

    @classmethod
    def restore(cls, payload: dict) -> "ConceptMemory":
        mem = cls(Thresholds(**payload["thresholds"]))
        mem.counters = MemoryCounters(**payload["counters"])
        declared = {name: SymbolKind.CONCEPT for name in payload["kinds"]}
        declared.update({f"{name}Mt": SymbolKind.CONCEPT for name in payload["kinds"]})
        for ctx_payload in payload["contexts"]:
            ctx = GeneralizationContext.from_snapshot(ctx_payload, declared)
            mem.contexts[ctx.concept] = ctx
        for name, kind in payload["kinds"].items():
            mem.kinds[concept_symbol(name)] = ConceptKind(kind)
        for word, name in payload["words"].items():
            mem.words[word] = concept_symbol(name)
        return mem

    # -- JSON command envelopes --------------------------------------------

    def execute(self, command: Mapping) -> dict:
        """Dispatch one JSON command envelope; see the README for schemas."""
        if not isinstance(command, Mapping) or len(command) != 1:
            raise InvalidCommand("envelope must hold exactly one command key")
        (kind, body), = command.items()
        if kind == "create":
            symbol = self.create(body["word"], ConceptKind(body["kind"]))
            return {"concept": symbol.name}
        if kind == "store":
            concept = self._declared_concept(body["concept"])
            declared = self._declarations()
            case = Case(parse_fact(s, declared) for s in body["facts"])
            result = self.store(case, concept)
            return {"outcome": result.outcome.value, "generalization": result.generalization_id}
        if kind == "query":
            declared = self._declarations()
            scene = Case(parse_fact(s, declared) for s in body["scene"])
            pattern = parse_pattern(body["pattern"], declared)
            result = self.query(scene, pattern)
            return {
                "inferences": [
                    {"fact": format_fact(i.fact), "score": i.score} for i in result.inferences
                ],
                "accepted": [format_fact(i.fact) for i in result.accepted],
            }
        if kind == "project":
            declared = self._declarations()
            trace = Case(parse_fact(s, declared) for s in body["trace"])
            concept = self._declared_concept(body["concept"])
            projection = self.project(trace, concept)
            return {
                "facts": [format_fact(f) for f in projection.facts],
                "terminal": projection.terminal,
                "score": projection.score,
            }
        raise InvalidCommand(f"unknown command {kind!r}")

    def _declared_concept(self, name: str) -> Symbol:
        symbol = concept_symbol(name)
        if symbol not in self.contexts:
            raise UnknownContext(f"no context for {name}")
        return symbol

    def _declarations(self) -> dict[str, SymbolKind]:
        declared = {s.name: SymbolKind.CONCEPT for s in self.contexts}
        declared.update({f"{s.name}Mt": SymbolKind.CONCEPT for s in self.contexts})
        return declared


def parse_pattern(text: str, declared: Mapping[str, SymbolKind] | None = None) -> FactPattern:
    """Parse a pattern like "(isa ?o RRed)"; ?-prefixed tokens are variables."""
    stripped = text.strip()
    if not (stripped.startswith("(") and stripped.endswith(")")):
        raise InvalidCommand(f"not a pattern: {text!r}")
    tokens = stripped[1:-1].split()
    if not tokens:
        raise InvalidCommand("empty pattern")
    placeholder = "GSVAR"
    rewritten = []
    variables: dict[str, Variable] = {}
    for tok in tokens:
        if tok.startswith("?"):
            key = f"{placeholder}{len(variables)}"
            variables[key] = Variable(tok[1:])
            rewritten.append(key)
        else:
            rewritten.append(tok)
    proto = parse_fact("(" + " ".join(rewritten) + ")", declared)
    args: list[Variable | Term] = []
    for arg in proto.args:
        if isinstance(arg, Symbol) and arg.name in variables:
            args.append(variables[arg.name])
        else:
            args.append(arg)
    return FactPattern(proto.predicate, tuple(args))


def _mentions(fact: Fact, concept: Symbol) -> bool:
    if fact.predicate == concept:
        return True
    return any(t == concept for t in fact_terms(fact))


def _substituted(fact: Fact, binding: Mapping[Term, Term]) -> Fact | None:
    """Bindings applied to a tag fact; unbound bindables skolemize."""
    bound_any = [False]

    def visit(term: Term) -> Term:
        if is_bindable(term):
            hit = binding.get(term)
            if hit is not None:
                bound_any[0] = True
                return hit
            return Skolem(term)
        if isinstance(term, Compound):
            return Compound(term.head, tuple(visit(a) for a in term.args))
        return term

    args = tuple(visit(a) for a in fact.args)
    if not bound_any[0]:
        return None
    return Fact(fact.predicate, args)


def _contains_skolem_term(term: Term) -> bool:
    if isinstance(term, Skolem):
        return True
    if isinstance(term, Compound):
        return any(_contains_skolem_term(a) for a in term.args)
    return False


def _current_timepoint(trace: Case) -> Symbol:
    times = set()
    predecessors = set()
    for fact in trace.canonical:
        if fact.predicate == HOLDS_IN and fact.args and isinstance(fact.args[0], Symbol):
            if fact.args[0].kind == SymbolKind.TIME:
                times.add(fact.args[0])
        if fact.predicate == AFTER and len(fact.args) == 2:
            if isinstance(fact.args[0], Symbol):
                times.add(fact.args[0])
            if isinstance(fact.args[1], Symbol):
                times.add(fact.args[1])
                predecessors.add(fact.args[1])
    frontier = sorted(times - predecessors, key=term_key)
    if len(frontier) != 1:
        from .errors import MalformedTrace

        raise MalformedTrace(f"trace has {len(frontier)} frontier timepoints")
    return frontier[0]
