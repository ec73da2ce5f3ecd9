"""Template parsing for trainer utterances.

Three pre-encoded forms: a bare property sequence naming one object, two
object references joined by a relation phrase, and a verb acting on that
pair.  Property words are never checked against a lexicon here; resolution
against the semantic map happens during comprehension.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import UnparseableUtterance

RELATION_PHRASES: tuple[str, ...] = ("in front of", "left of", "right of", "behind")
VERBS: tuple[str, ...] = ("move",)
_ARTICLES = frozenset({"a", "an", "the"})


@dataclass(frozen=True)
class ObjectRef:
    ref_id: str
    properties: tuple[str, ...]


@dataclass(frozen=True)
class RelationRef:
    rel_name: str
    arg1: str
    arg2: str


@dataclass(frozen=True)
class ActionRef:
    act_name: str
    arg1: str
    arg2: str
    relation: str


@dataclass(frozen=True)
class ParseResult:
    object_refs: tuple[ObjectRef, ...]
    rel_refs: tuple[RelationRef, ...] = ()
    act_refs: tuple[ActionRef, ...] = ()

    def ref(self, ref_id: str) -> ObjectRef:
        for ref in self.object_refs:
            if ref.ref_id == ref_id:
                return ref
        raise KeyError(ref_id)

    @property
    def words(self) -> tuple[str, ...]:
        out: list[str] = []
        for ref in self.object_refs:
            out.extend(ref.properties)
        return tuple(out)


class Grammar:
    """The fixed utterance grammar; relation phrases and verbs are closed sets."""

    def __init__(
        self,
        relation_phrases: Sequence[str] = RELATION_PHRASES,
        verbs: Sequence[str] = VERBS,
    ):
        # Longest phrase first so "in front of" wins over any shorter overlap.
        self.relation_phrases = sorted(
            (tuple(p.split()) for p in relation_phrases), key=len, reverse=True
        )
        self.verbs = tuple(verbs)

    def parse(self, content: str) -> ParseResult:
        words = [w for w in content.lower().split() if w not in _ARTICLES]
        if not words:
            raise UnparseableUtterance("empty utterance")

        if words[0] in self.verbs:
            verb, rest = words[0], words[1:]
            split = self._split_on_relation(rest)
            if split is None:
                raise UnparseableUtterance(
                    f"no relation phrase after {verb!r}: {content!r}"
                )
            left, phrase, right = split
            refs = (ObjectRef("or1", tuple(left)), ObjectRef("or2", tuple(right)))
            act = ActionRef(verb, "or1", "or2", phrase)
            return ParseResult(refs, act_refs=(act,))

        split = self._split_on_relation(words)
        if split is not None:
            left, phrase, right = split
            refs = (ObjectRef("or1", tuple(left)), ObjectRef("or2", tuple(right)))
            rel = RelationRef(phrase, "or1", "or2")
            return ParseResult(refs, rel_refs=(rel,))

        return ParseResult((ObjectRef("or1", tuple(words)),))

    def _split_on_relation(
        self, words: Sequence[str]
    ) -> tuple[list[str], str, list[str]] | None:
        for phrase in self.relation_phrases:
            k = len(phrase)
            for i in range(1, len(words) - k):
                if tuple(words[i : i + k]) == phrase:
                    return list(words[:i]), " ".join(phrase), list(words[i + k :])
        return None
