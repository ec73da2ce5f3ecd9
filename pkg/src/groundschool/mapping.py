"""Structure mapping between fact cases.

A match aligns facts of a base case with facts of a target case under a
one-to-one entity correspondence, scores the alignment by the fraction of base
weight it covers, and projects the unaligned base facts into the target as
candidate inferences (skolemizing entities that found no counterpart).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .facts import (
    Case,
    Compound,
    Fact,
    Skolem,
    Symbol,
    Term,
    fact_key,
    format_fact,
    format_term,
    is_bindable,
    term_key,
)

__all__ = [
    "Correspondence",
    "Mapping",
    "Skolem",
    "match",
    "enumerate_mappings",
    "mapping_to_json",
]


@dataclass(frozen=True)
class Correspondence:
    """One aligned base/target fact pair and the entity bindings it induces."""

    base_fact: Fact
    target_fact: Fact
    bindings: tuple[tuple[Term, Term], ...]


@dataclass(frozen=True)
class Mapping:
    """Result of matching a base case against a target case."""

    correspondences: tuple[Correspondence, ...]
    bindings: tuple[tuple[Term, Term], ...]
    score: float
    candidate_inferences: tuple[Fact, ...]
    aligned_weight: float
    total_weight: float

    @property
    def binding_map(self) -> dict[Term, Term]:
        return dict(self.bindings)

    def base_of(self, fact: Fact) -> Fact | None:
        for corr in self.correspondences:
            if corr.target_fact == fact:
                return corr.base_fact
        return None


def _collect_bindings(base: Term, target: Term, out: dict[Term, Term]) -> bool:
    """Accumulate the bindings needed to align two terms; False if impossible."""
    if is_bindable(base) or is_bindable(target):
        if not (is_bindable(base) and is_bindable(target)):
            return False
        prior = out.get(base)
        if prior is not None and prior != target:
            return False
        out[base] = target
        return True
    if isinstance(base, Symbol) and isinstance(target, Symbol):
        return base == target
    if isinstance(base, int) and isinstance(target, int):
        return base == target
    if isinstance(base, Compound) and isinstance(target, Compound):
        if base.head != target.head or len(base.args) != len(target.args):
            return False
        return all(_collect_bindings(b, t, out) for b, t in zip(base.args, target.args))
    return False


def _hypothesis(base_fact: Fact, target_fact: Fact) -> dict[Term, Term] | None:
    if base_fact.predicate != target_fact.predicate:
        return None
    if len(base_fact.args) != len(target_fact.args):
        return None
    out: dict[Term, Term] = {}
    for b, t in zip(base_fact.args, target_fact.args):
        if not _collect_bindings(b, t, out):
            return None
    # one-to-one in both directions: a pair such as (r a b) over (r c c)
    # would need two base terms on one target term, which is no alignment
    if len(set(out.values())) != len(out):
        return None
    return out


def _substitute(term: Term, binding: Mapping[Term, Term], bound_flag: list[bool]) -> Term:
    if is_bindable(term):
        hit = binding.get(term)
        if hit is not None:
            bound_flag[0] = True
            return hit
        return Skolem(term)
    if isinstance(term, Compound):
        return Compound(term.head, tuple(_substitute(a, binding, bound_flag) for a in term.args))
    return term


def _project_inferences(
    unaligned: Iterable[Fact],
    binding: Mapping[Term, Term],
) -> tuple[Fact, ...]:
    """Substitute bindings into unaligned base facts; unbound terms skolemize.

    A fact with no bound occurrence at all has no anchor in the target and is
    dropped rather than asserted as a free-floating skolem statement.
    """
    out = []
    for fact in unaligned:
        flag = [False]
        args = tuple(_substitute(a, binding, flag) for a in fact.args)
        if flag[0]:
            out.append(Fact(fact.predicate, args))
    return tuple(sorted(out, key=fact_key))


def _weights(base: Case, base_weights: Mapping[Fact, float] | None) -> dict[Fact, float]:
    if base_weights is None:
        return {f: 1.0 for f in base.canonical}
    weights = {}
    for fact in base.canonical:
        w = base_weights.get(fact)
        if w is None:
            raise ValueError(f"missing weight for base fact {format_fact(fact)}")
        if not (0.0 < w <= 1.0):
            raise ValueError(f"weight out of (0, 1]: {w} for {format_fact(fact)}")
        weights[fact] = w
    return weights


def _hypotheses(
    base: Case, target: Case, weights: Mapping[Fact, float]
) -> list[tuple[float, Fact, Fact, dict[Term, Term]]]:
    out: list[tuple[float, Fact, Fact, dict[Term, Term]]] = []
    for bf in base.canonical:
        for tf in target.canonical:
            local = _hypothesis(bf, tf)
            if local is not None:
                out.append((weights[bf], bf, tf, local))
    out.sort(key=lambda h: (-h[0], fact_key(h[1]), fact_key(h[2])))
    return out


def _greedy(
    base: Case,
    weights: Mapping[Fact, float],
    hypotheses: list[tuple[float, Fact, Fact, dict[Term, Term]]],
    seed: int | None = None,
) -> Mapping:
    """One greedy pass over the hypothesis list, optionally forcing a first pick."""
    order: Iterable[int] = range(len(hypotheses))
    if seed is not None:
        order = [seed, *(i for i in range(len(hypotheses)) if i != seed)]

    forward: dict[Term, Term] = {}
    reverse: dict[Term, Term] = {}
    used_base: set[Fact] = set()
    used_target: set[Fact] = set()
    chosen: list[Correspondence] = []

    for i in order:
        _w, bf, tf, local = hypotheses[i]
        if bf in used_base or tf in used_target:
            continue
        consistent = True
        for b, t in local.items():
            if forward.get(b, t) != t or reverse.get(t, b) != b:
                consistent = False
                break
        if not consistent:
            continue
        forward.update(local)
        for b, t in local.items():
            reverse[t] = b
        used_base.add(bf)
        used_target.add(tf)
        chosen.append(Correspondence(bf, tf, tuple(sorted(local.items(), key=lambda p: term_key(p[0])))))

    aligned = sum(weights[c.base_fact] for c in chosen)
    total = sum(weights.values())
    score = aligned / total if total > 0 else 0.0
    inferences = _project_inferences((f for f in base.canonical if f not in used_base), forward)
    return Mapping(
        correspondences=tuple(chosen),
        bindings=tuple(sorted(forward.items(), key=lambda p: term_key(p[0]))),
        score=score,
        candidate_inferences=inferences,
        aligned_weight=aligned,
        total_weight=total,
    )


# A committed early correspondence can lock greedy search out of the optimum,
# so the scan restarts with forced first hypotheses, most-constrained base
# facts first; the cap bounds cost on pathologically ambiguous cases.
_MAX_RESTARTS = 32


def _restart_order(hypotheses: list[tuple[float, Fact, Fact, dict[Term, Term]]]) -> list[int]:
    fanout: dict[Fact, int] = {}
    for _w, bf, _tf, _local in hypotheses:
        fanout[bf] = fanout.get(bf, 0) + 1
    order = sorted(range(len(hypotheses)), key=lambda i: (fanout[hypotheses[i][1]], i))
    return order[:_MAX_RESTARTS]


def match(base: Case, target: Case, base_weights: Mapping[Fact, float] | None = None) -> Mapping:
    """Build the best greedy maximal consistent correspondence set.

    Hypotheses (same predicate, same arity, alignable arguments) are taken in
    descending base-weight order, ties broken by canonical fact order, skipping
    any that would reuse a fact or violate binding injectivity.  The pass is
    restarted with hypotheses of low-ambiguity base facts forced first and the
    best-scoring result wins.  The score is aligned base weight over total base
    weight, so matching a case against itself scores 1.0 and an empty base
    scores 0.0.
    """
    weights = _weights(base, base_weights)
    hypotheses = _hypotheses(base, target, weights)
    best = _greedy(base, weights, hypotheses)
    for i in _restart_order(hypotheses):
        if best.score >= 1.0:
            break
        cand = _greedy(base, weights, hypotheses, seed=i)
        if cand.score > best.score:
            best = cand
    return best


def _mapping_for_binding(
    base: Case,
    target: Case,
    weights: dict[Fact, float],
    binding: dict[Term, Term],
) -> Mapping:
    """Deterministic alignment induced by a fixed entity binding."""
    target_facts = target.facts
    chosen = []
    used_base = set()
    for bf in base.canonical:
        local: dict[Term, Term] = {}
        grounded = True
        for b in _fact_bindables(bf):
            t = binding.get(b)
            if t is None:
                grounded = False
                break
            local[b] = t
        if not grounded:
            continue
        flag = [False]
        image = Fact(bf.predicate, tuple(_substitute(a, binding, flag) for a in bf.args))
        if image in target_facts:
            used_base.add(bf)
            chosen.append(Correspondence(bf, image, tuple(sorted(local.items(), key=lambda p: term_key(p[0])))))
    aligned = sum(weights[c.base_fact] for c in chosen)
    total = sum(weights.values())
    inferences = _project_inferences((f for f in base.canonical if f not in used_base), binding)
    return Mapping(
        correspondences=tuple(chosen),
        bindings=tuple(sorted(binding.items(), key=lambda p: term_key(p[0]))),
        score=aligned / total if total > 0 else 0.0,
        candidate_inferences=inferences,
        aligned_weight=aligned,
        total_weight=total,
    )


def _fact_bindables(fact: Fact) -> list[Term]:
    seen = []
    def visit(term: Term) -> None:
        if is_bindable(term):
            if term not in seen:
                seen.append(term)
        elif isinstance(term, Compound):
            for a in term.args:
                visit(a)
    for a in fact.args:
        visit(a)
    return seen


def enumerate_mappings(
    base: Case,
    target: Case,
    base_weights: Mapping[Fact, float] | None = None,
    max_base_entities: int = 3,
) -> list[Mapping]:
    """All mappings induced by injective bindings of base entities to target ones.

    Used by queries that need every consistent placement of a small concept
    (one mapping per binding, e.g. one inference per matching scene object).
    Falls back to the single greedy mapping when the base has too many
    bindable terms for exhaustive assignment.
    """
    weights = _weights(base, base_weights)
    base_terms = sorted(base.bindable_terms, key=term_key)
    if len(base_terms) > max_base_entities:
        # exhaustive assignment is too wide; fall back to the distinct
        # results of the restarted greedy passes
        hypotheses = _hypotheses(base, target, weights)
        found: list[Mapping] = [_greedy(base, weights, hypotheses)]
        for i in _restart_order(hypotheses):
            found.append(_greedy(base, weights, hypotheses, seed=i))
        distinct: list[Mapping] = []
        keys: set[tuple] = set()
        for m in found:
            if not m.correspondences:
                continue
            key = tuple(sorted((fact_key(c.base_fact), fact_key(c.target_fact)) for c in m.correspondences))
            if key not in keys:
                keys.add(key)
                distinct.append(m)
        distinct.sort(key=lambda m: (-m.score, tuple(fact_key(c.base_fact) for c in m.correspondences)))
        return distinct or [match(base, target, base_weights)]
    target_terms = sorted(target.bindable_terms, key=term_key)

    results: list[Mapping] = []
    seen: set[tuple] = set()

    def assign(i: int, binding: dict[Term, Term], used: set[Term]) -> None:
        if i == len(base_terms):
            if not binding:
                return
            m = _mapping_for_binding(base, target, weights, dict(binding))
            if not m.correspondences:
                return
            key = tuple(sorted((fact_key(c.base_fact), fact_key(c.target_fact)) for c in m.correspondences))
            if key not in seen:
                seen.add(key)
                results.append(m)
            return
        b = base_terms[i]
        for t in target_terms:
            if t in used:
                continue
            binding[b] = t
            used.add(t)
            assign(i + 1, binding, used)
            del binding[b]
            used.remove(t)
        assign(i + 1, binding, used)  # leave b unbound

    assign(0, {}, set())
    results.sort(key=lambda m: (-m.score, tuple(fact_key(c.base_fact) for c in m.correspondences)))
    return results


# ---------------------------------------------------------------------------
# Debug serialization
# ---------------------------------------------------------------------------

def mapping_to_json(mapping: Mapping) -> str:
    payload = {
        "score": mapping.score,
        "aligned_weight": mapping.aligned_weight,
        "total_weight": mapping.total_weight,
        "correspondences": [
            {
                "base": format_fact(c.base_fact),
                "target": format_fact(c.target_fact),
                "bindings": {format_term(b): format_term(t) for b, t in c.bindings},
            }
            for c in mapping.correspondences
        ],
        "bindings": {format_term(b): format_term(t) for b, t in mapping.bindings},
        "candidate_inferences": [format_fact(f) for f in mapping.candidate_inferences],
    }
    return json.dumps(payload, indent=2, sort_keys=True)
