"""Symbolic substrate: symbols, terms, facts, cases, and episodic traces.

Everything downstream (matching, generalization, the agent) manipulates the
types defined here.  Facts are immutable and compare structurally, cases are
fact sets with a stable canonical order, and the s-expression text format
round-trips losslessly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import MalformedTrace


class SymbolKind(str, Enum):
    ENTITY = "entity"
    PERCEPT = "percept"
    CONCEPT = "concept"
    PREDICATE = "predicate"
    FUNCTOR = "functor"
    TIME = "time"


# Terms nest and get hashed in every matcher inner loop, so each carries its
# hash precomputed; the explicit __hash__ keeps dataclasses from regenerating
# the recursive default.


@dataclass(frozen=True, slots=True)
class Symbol:
    """An interned name with a kind.  Equality and hashing are by (kind, name)."""

    name: str
    kind: SymbolKind
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.name, self.kind)))

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"{self.name}:{self.kind.value[:4]}"


@dataclass(frozen=True, slots=True)
class Compound:
    """A functor application, e.g. (GenEntFn 0 RRedMt) or a reified fact."""

    head: Symbol
    args: tuple["Term", ...]
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.head, self.args)))

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = " ".join(repr(a) for a in self.args)
        return f"({self.head.name} {inner})"


@dataclass(frozen=True, slots=True)
class Skolem:
    """Placeholder for an unbound base term carried into a candidate inference."""

    term: "Term"
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash(("skolem", self.term)))

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"(:skolem {self.term!r})"


Term = Union[Symbol, int, Compound, Skolem]


@dataclass(frozen=True, slots=True)
class Fact:
    """An immutable ground assertion: a predicate applied to argument terms.

    The predicate position holds a predicate-kind symbol for ordinary relations
    and a concept-kind symbol for binary concept tags such as (RLeftOf o1 o2).
    """

    predicate: Symbol
    args: tuple[Term, ...]
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.predicate.kind not in (SymbolKind.PREDICATE, SymbolKind.CONCEPT):
            raise ValueError(f"predicate position requires a predicate or concept symbol, got {self.predicate!r}")
        object.__setattr__(self, "_hash", hash((self.predicate, self.args)))

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return format_fact(self)


# ---------------------------------------------------------------------------
# Standard vocabulary
# ---------------------------------------------------------------------------

def entity(name: str) -> Symbol:
    return Symbol(name, SymbolKind.ENTITY)


def percept(name: str) -> Symbol:
    return Symbol(name, SymbolKind.PERCEPT)


def concept(name: str) -> Symbol:
    return Symbol(name, SymbolKind.CONCEPT)


def predicate(name: str) -> Symbol:
    return Symbol(name, SymbolKind.PREDICATE)


def functor(name: str) -> Symbol:
    return Symbol(name, SymbolKind.FUNCTOR)


def timepoint(name: str) -> Symbol:
    return Symbol(name, SymbolKind.TIME)


SHAPE_PERCEPTS = tuple(percept(n) for n in ("CVBox", "CVCone", "CVSphere", "CVCylinder"))
COLOR_PERCEPTS = tuple(percept(n) for n in ("CVGreen", "CVBlue", "CVRed", "CVYellow", "CVPurple"))

ISA = predicate("isa")
HELD = predicate("held")
HOLDS_IN = predicate("H")
AFTER = predicate("after")
FINAL = predicate("final")
START = concept("start")

RCC8_NAMES = ("dc", "ec", "po", "tpp", "ntpp", "tppi", "ntppi", "eq")
CDC_NAMES = ("n", "ne", "e", "se", "s", "sw", "w", "nw")
RCC8_PREDICATES = {n: predicate(n) for n in RCC8_NAMES}
CDC_PREDICATES = {n: predicate(n) for n in CDC_NAMES}

GEN_ENT_FN = functor("GenEntFn")

_STANDARD_KINDS: dict[str, SymbolKind] = {}
for _sym in (*SHAPE_PERCEPTS, *COLOR_PERCEPTS):
    _STANDARD_KINDS[_sym.name] = _sym.kind
for _sym in (ISA, HELD, HOLDS_IN, AFTER, FINAL, START, GEN_ENT_FN):
    _STANDARD_KINDS[_sym.name] = _sym.kind
for _sym in (*RCC8_PREDICATES.values(), *CDC_PREDICATES.values()):
    _STANDARD_KINDS[_sym.name] = _sym.kind


def gen_entity(index: int, context_id: Symbol) -> Compound:
    """Abstract entity placeholder scoped to a generalization context."""
    return Compound(GEN_ENT_FN, (index, context_id))


def is_bindable(term: Term) -> bool:
    """True for terms that may participate in entity correspondences.

    Entities and timepoints bind; abstract GenEntFn entities bind as opaque
    units regardless of their internal arguments.
    """
    if isinstance(term, Symbol):
        return term.kind in (SymbolKind.ENTITY, SymbolKind.TIME)
    if isinstance(term, Compound):
        return term.head == GEN_ENT_FN
    return isinstance(term, Skolem)


def walk_terms(term: Term) -> Iterator[Term]:
    """Yield term and, for non-bindable compounds, all nested subterms."""
    yield term
    if isinstance(term, Compound) and not is_bindable(term):
        for arg in term.args:
            yield from walk_terms(arg)


def fact_terms(fact: Fact) -> Iterator[Term]:
    for arg in fact.args:
        yield from walk_terms(arg)


# ---------------------------------------------------------------------------
# Canonical ordering
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def term_key(term: Term) -> tuple:
    if isinstance(term, Symbol):
        return (0, term.name, term.kind.value, ())
    if isinstance(term, int):
        return (1, f"{term:020d}", "", ())
    if isinstance(term, Compound):
        return (2, term.head.name, "", tuple(term_key(a) for a in term.args))
    if isinstance(term, Skolem):
        return (3, "", "", (term_key(term.term),))
    raise TypeError(f"not a term: {term!r}")


@lru_cache(maxsize=None)
def fact_key(fact: Fact) -> tuple:
    return (fact.predicate.name, tuple(term_key(a) for a in fact.args))


# ---------------------------------------------------------------------------
# Cases
# ---------------------------------------------------------------------------

class Case:
    """An immutable set of facts with derived entity inventories.

    Iteration follows the canonical order (lexicographic by predicate, then by
    argument keys), which keeps every downstream algorithm deterministic.
    """

    __slots__ = ("facts", "_canonical", "_entities", "_bindables")

    def __init__(self, facts: Iterable[Fact]):
        self.facts: frozenset[Fact] = frozenset(facts)
        self._canonical: tuple[Fact, ...] = tuple(sorted(self.facts, key=fact_key))
        entities = set()
        bindables = set()
        for fact in self._canonical:
            for term in fact_terms(fact):
                if isinstance(term, Symbol) and term.kind == SymbolKind.ENTITY:
                    entities.add(term)
                if is_bindable(term):
                    bindables.add(term)
        self._entities = frozenset(entities)
        self._bindables = frozenset(bindables)

    @property
    def canonical(self) -> tuple[Fact, ...]:
        return self._canonical

    @property
    def entities(self) -> frozenset[Symbol]:
        return self._entities

    @property
    def bindable_terms(self) -> frozenset[Term]:
        return self._bindables

    def __iter__(self) -> Iterator[Fact]:
        return iter(self._canonical)

    def __len__(self) -> int:
        return len(self.facts)

    def __contains__(self, fact: object) -> bool:
        return fact in self.facts

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Case) and self.facts == other.facts

    def __hash__(self) -> int:
        return hash(self.facts)

    def __repr__(self) -> str:
        return f"Case({len(self.facts)} facts)"

    def union(self, extra: Iterable[Fact]) -> "Case":
        return Case([*self.facts, *extra])


# ---------------------------------------------------------------------------
# Episodic traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EpisodicTrace:
    """An ordered run of (timepoint, state facts) episodes.

    Completed demonstrations are final-marked; traces still being extended
    during execution are not, since the final marker is itself evidence the
    behavior has ended.
    """

    episodes: tuple[tuple[Symbol, frozenset[Fact]], ...]
    final_marked: bool = True

    def __post_init__(self) -> None:
        if not self.episodes:
            raise MalformedTrace("a trace requires at least one episode")
        seen: set[Symbol] = set()
        for time, state in self.episodes:
            if time.kind != SymbolKind.TIME:
                raise MalformedTrace(f"episode timepoint must be time-kind, got {time!r}")
            if time in seen:
                raise MalformedTrace(f"duplicate timepoint {time.name}")
            seen.add(time)
        if self.final_marked and len(self.episodes) < 2:
            raise MalformedTrace("a final-marked trace requires at least two episodes")

    @property
    def start(self) -> Symbol:
        return self.episodes[0][0]

    @property
    def current(self) -> Symbol:
        return self.episodes[-1][0]


def make_trace(states: Sequence[Iterable[Fact]], *, final: bool = True, prefix: str = "T") -> EpisodicTrace:
    """Build a trace from per-episode state fact collections with fresh timepoints."""
    episodes = tuple((timepoint(f"{prefix}{i}"), frozenset(state)) for i, state in enumerate(states))
    return EpisodicTrace(episodes, final_marked=final)


def trace_to_case(trace: EpisodicTrace) -> Case:
    """Reify a trace into a case of H facts plus temporal scaffolding.

    Each state fact f at timepoint T becomes (H T f); the first episode is
    start-marked, consecutive episodes are chained with after, and a
    final-marked trace also emits (final T_last T_prev).
    """
    out: list[Fact] = []
    for time, state in trace.episodes:
        for fact in state:
            out.append(Fact(HOLDS_IN, (time, reify(fact))))
    out.append(Fact(ISA, (trace.start, START)))
    for (prev, _), (cur, _) in zip(trace.episodes, trace.episodes[1:]):
        out.append(Fact(AFTER, (cur, prev)))
    if trace.final_marked:
        last, prev = trace.episodes[-1][0], trace.episodes[-2][0]
        out.append(Fact(FINAL, (last, prev)))
    return Case(out)


def reify(fact: Fact) -> Compound:
    """Embed a fact as a term so it can appear inside an H fact."""
    return Compound(fact.predicate, fact.args)


def unreify(term: Term) -> Fact:
    if not isinstance(term, Compound):
        raise ValueError(f"cannot interpret {term!r} as a fact")
    return Fact(term.head, term.args)


# ---------------------------------------------------------------------------
# S-expression text format
# ---------------------------------------------------------------------------

def format_term(term: Term) -> str:
    if isinstance(term, Symbol):
        return term.name
    if isinstance(term, int):
        return str(term)
    if isinstance(term, Compound):
        inner = " ".join(format_term(a) for a in term.args)
        return f"({term.head.name} {inner})" if term.args else f"({term.head.name})"
    if isinstance(term, Skolem):
        return f"(:skolem {format_term(term.term)})"
    raise TypeError(f"not a term: {term!r}")


def format_fact(fact: Fact) -> str:
    if not fact.args:
        return f"({fact.predicate.name})"
    inner = " ".join(format_term(a) for a in fact.args)
    return f"({fact.predicate.name} {inner})"


def case_to_text(case: Case, *, header: str | None = None) -> str:
    """Serialize a case, one fact per canonical line.  `;` starts a comment."""
    lines = []
    if header:
        for piece in header.splitlines():
            lines.append(f"; {piece}")
    lines.extend(format_fact(f) for f in case.canonical)
    return "\n".join(lines) + "\n"


_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")
_INT_RE = re.compile(r"-?\d+$")


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    for line in text.splitlines():
        body = line.split(";", 1)[0]
        tokens.extend(_TOKEN_RE.findall(body))
    return tokens


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise ValueError("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _read(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise ValueError("unbalanced parentheses")
        return items, pos + 1
    if tok == ")":
        raise ValueError("unbalanced parentheses")
    return tok, pos + 1


def _atoms(node, out: set[str]) -> None:
    if isinstance(node, str):
        out.add(node)
    else:
        for item in node:
            _atoms(item, out)


def _contextual_kinds(nodes: list) -> dict[str, SymbolKind]:
    """Infer time symbols from their structural positions (H/after/final)."""
    kinds: dict[str, SymbolKind] = {}

    def visit(node) -> None:
        if not isinstance(node, list) or not node:
            return
        head = node[0]
        if head == "H" and len(node) >= 2 and isinstance(node[1], str):
            kinds[node[1]] = SymbolKind.TIME
        if head in ("after", "final"):
            for arg in node[1:]:
                if isinstance(arg, str):
                    kinds[arg] = SymbolKind.TIME
        for item in node[1:]:
            visit(item)

    for node in nodes:
        visit(node)
    return kinds


class _Reader:
    def __init__(self, declared: Mapping[str, SymbolKind] | None, contextual: Mapping[str, SymbolKind]):
        merged = dict(_STANDARD_KINDS)
        merged.update(contextual)
        if declared:
            merged.update(declared)
        self.kinds = merged

    def symbol(self, name: str, position: str) -> Symbol:
        kind = self.kinds.get(name)
        if kind is None:
            # Undeclared symbols in argument position are entities; an
            # undeclared head is treated as a predicate (top) or functor.
            kind = {
                "arg": SymbolKind.ENTITY,
                "pred": SymbolKind.PREDICATE,
                "functor": SymbolKind.FUNCTOR,
            }[position]
        return Symbol(name, kind)

    def term(self, node) -> Term:
        if isinstance(node, str):
            if _INT_RE.match(node):
                return int(node)
            return self.symbol(node, "arg")
        if not node:
            raise ValueError("empty term")
        head = node[0]
        if head == ":skolem":
            if len(node) != 2:
                raise ValueError("skolem takes one inner term")
            return Skolem(self.term(node[1]))
        head_sym = self.symbol(head, "functor")
        if head_sym.kind not in (SymbolKind.FUNCTOR,):
            # Reified facts keep their predicate head.
            head_sym = Symbol(head_sym.name, head_sym.kind)
        return Compound(head_sym, tuple(self.term(a) for a in node[1:]))

    def fact(self, node) -> Fact:
        if not isinstance(node, list) or not node or not isinstance(node[0], str):
            raise ValueError(f"not a fact: {node!r}")
        pred = self.symbol(node[0], "pred")
        if pred.kind not in (SymbolKind.PREDICATE, SymbolKind.CONCEPT):
            raise ValueError(f"bad predicate {pred!r}")
        return Fact(pred, tuple(self.term(a) for a in node[1:]))


def parse_fact(text: str, declared: Mapping[str, SymbolKind] | None = None) -> Fact:
    tokens = _tokenize(text)
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise ValueError("trailing tokens after fact")
    reader = _Reader(declared, _contextual_kinds([node]))
    return reader.fact(node)


def parse_case(text: str, declared: Mapping[str, SymbolKind] | None = None) -> Case:
    """Parse a .facts document: one fact per s-expression, `;` comments allowed."""
    tokens = _tokenize(text)
    nodes = []
    pos = 0
    while pos < len(tokens):
        node, pos = _read(tokens, pos)
        nodes.append(node)
    reader = _Reader(declared, _contextual_kinds(nodes))
    return Case(reader.fact(n) for n in nodes)
