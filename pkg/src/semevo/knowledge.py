"""Offline commonsense knowledge store.

Assertions are read from tab-separated dump files, one per line::

    origin <TAB> relation <TAB> start <TAB> end <TAB> score

``origin`` is ``conceptnet``, ``wordnet`` or ``fixture``.  ConceptNet and
fixture rows use ConceptNet relation labels.  WordNet rows use pointer
names read as "``end`` is the <pointer> of ``start``" and are projected
onto ConceptNet relations with score 10:

=========== ==========================
hypernym    ``IsA(start, end)``
holonym     ``PartOf(start, end)``
meronym     ``PartOf(end, start)``
attribute   ``HasProperty(start, end)``
entailment  ``Causes(end, start)``
=========== ==========================

WordNet rows may also carry an already projected ConceptNet label.  Lines
starting with ``#`` and blank lines are ignored.
"""

from __future__ import annotations

import hashlib
import logging
import pickle
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    EmptyStoreError,
    ExhaustedStoreError,
    InvalidRelationError,
    ParseError,
)
from .network import Relation, SemanticNetwork, normalize_concept, relation_type

logger = logging.getLogger(__name__)

ORIGINS = ("conceptnet", "wordnet", "fixture")
WORDNET_SCORE = 10

# pointer -> (ConceptNet relation, swap endpoints)
WORDNET_RELATIONS = {
    "hypernym": ("IsA", False),
    "holonym": ("PartOf", False),
    "meronym": ("PartOf", True),
    "attribute": ("HasProperty", False),
    "entailment": ("Causes", True),
}

OUT, IN = "out", "in"


@dataclass(frozen=True, slots=True)
class Assertion:
    rel_type: str
    start: str
    end: str
    score: int
    origin: str = "fixture"

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.rel_type, self.start, self.end)

    @property
    def relation(self) -> Relation:
        return Relation(self.rel_type, self.start, self.end, self.score)

    def other(self, concept: str) -> str:
        return self.end if concept == self.start else self.start

    def __str__(self):
        return f"{self.rel_type}({self.start}, {self.end})[{self.score}]"


def parse_line(line: str, path=None, lineno=None) -> Assertion | None:
    """Parse one dump row; returns None for comments and blank lines."""
    text = line.rstrip("\r\n")
    if not text.strip() or text.lstrip().startswith("#"):
        return None
    fields = [f.strip() for f in text.split("\t")]
    if len(fields) == 4 and fields[0].lower() == "wordnet":
        fields.append(str(WORDNET_SCORE))
    if len(fields) != 5:
        raise ParseError(f"expected 5 tab-separated fields, got {len(fields)}", path, lineno)
    origin, label, start, end, score = fields
    origin = origin.lower()
    if origin not in ORIGINS:
        raise ParseError(f"unknown origin {origin!r}", path, lineno)
    try:
        start, end = normalize_concept(start), normalize_concept(end)
        if origin == "wordnet":
            if label.lower() in WORDNET_RELATIONS:
                rel, swap = WORDNET_RELATIONS[label.lower()]
                if swap:
                    start, end = end, start
            else:
                # already projected, as written back by write_assertions
                try:
                    rel = relation_type(label)
                except InvalidRelationError:
                    raise ParseError(f"unknown WordNet relation {label!r}", path, lineno) from None
            value = WORDNET_SCORE
        else:
            rel = relation_type(label)
            value = int(score)
    except ParseError:
        raise
    except InvalidRelationError as e:
        raise ParseError(str(e), path, lineno) from None
    except ValueError:
        raise ParseError(f"score {score!r} is not an integer", path, lineno) from None
    if not -10 <= value <= 10:
        raise ParseError(f"score {value} outside [-10, 10]", path, lineno)
    if start == end:
        logger.warning("%s:%s: skipping self-loop %s(%s, %s)", path, lineno, rel, start, end)
        return None
    return Assertion(rel, start, end, value, origin)


def read_assertions(path) -> list[Assertion]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            a = parse_line(line, path, lineno)
            if a is not None:
                out.append(a)
    return out


def write_assertions(assertions: Iterable[Assertion], path) -> None:
    """Write assertions as a dump file that :func:`read_assertions` reads back."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a in assertions:
            fh.write(f"{a.origin}\t{a.rel_type}\t{a.start}\t{a.end}\t{a.score}\n")


def _threshold(score_min):
    return -11 if score_min is None else score_min


class KnowledgeStore:
    """Indexed, read-only collection of scored assertions.

    Triples are unique; a triple seen more than once keeps its highest
    score.  All random queries take a caller-owned ``numpy.random.Generator``
    so that parallel workers can sample independently and reproducibly.
    """

    def __init__(self, assertions: Iterable[Assertion], score_min: int | None = None):
        self.score_min = score_min
        thr = _threshold(score_min)
        by_triple: dict[tuple, Assertion] = {}
        for a in assertions:
            if a.score < thr:
                continue
            old = by_triple.get(a.triple)
            if old is None or old.score < a.score:
                by_triple[a.triple] = a
        if not by_triple:
            raise EmptyStoreError("knowledge store is empty")
        self.assertions: tuple[Assertion, ...] = tuple(by_triple.values())
        self._index = {a.triple: i for i, a in enumerate(self.assertions)}
        self._by_concept: dict[str, list[int]] = {}
        self._by_pair: dict[tuple[str, str], list[int]] = {}
        self._by_signature: dict[tuple[str, str, str], list[int]] = {}
        for i, a in enumerate(self.assertions):
            self._by_concept.setdefault(a.start, []).append(i)
            self._by_concept.setdefault(a.end, []).append(i)
            self._by_pair.setdefault(tuple(sorted((a.start, a.end))), []).append(i)
            # (type, direction, other endpoint) is the slot a concept fills
            self._by_signature.setdefault((a.rel_type, OUT, a.end), []).append(i)
            self._by_signature.setdefault((a.rel_type, IN, a.start), []).append(i)
        self.concepts: tuple[str, ...] = tuple(sorted(self._by_concept))
        self._best_score = {
            c: max(self.assertions[i].score for i in idx) for c, idx in self._by_concept.items()
        }
        self._support: dict[int, tuple[str, ...]] = {}
        self._partners: dict[tuple[str, int], tuple[str, ...]] = {}

    # -- construction -------------------------------------------------------

    @classmethod
    def from_files(cls, paths: Sequence, score_min: int | None = None) -> "KnowledgeStore":
        assertions: list[Assertion] = []
        for p in paths:
            assertions.extend(read_assertions(p))
        return cls(assertions, score_min)

    @classmethod
    def from_network(cls, net: SemanticNetwork, origin="fixture") -> "KnowledgeStore":
        return cls(Assertion(r.rel_type, r.source, r.target, r.score, origin) for r in net)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            pickle.dump(self, fh, protocol=pickle.HIGHEST_PROTOCOL)

    @staticmethod
    def load(path) -> "KnowledgeStore":
        try:
            with open(path, "rb") as fh:
                store = pickle.load(fh)
        except (pickle.UnpicklingError, EOFError, AttributeError, ImportError) as e:
            raise ParseError(f"unreadable store snapshot: {e}", path) from None
        if not isinstance(store, KnowledgeStore):
            raise ParseError("not a knowledge store snapshot", path)
        return store

    def __getstate__(self):
        return {"assertions": self.assertions, "score_min": self.score_min}

    def __setstate__(self, state):
        self.__init__(state["assertions"], state["score_min"])

    # -- summaries ----------------------------------------------------------

    def __len__(self):
        return len(self.assertions)

    def __repr__(self):
        return f"KnowledgeStore({len(self.assertions)} assertions, {len(self.concepts)} concepts)"

    def summary(self) -> dict:
        return {
            "assertions": len(self.assertions),
            "concepts": len(self.concepts),
            "by_origin": dict(sorted(Counter(a.origin for a in self.assertions).items())),
        }

    # -- queries ------------------------------------------------------------

    def get(self, triple) -> Assertion | None:
        i = self._index.get(tuple(triple))
        return None if i is None else self.assertions[i]

    def relation_exists(self, r, score_min: int | None = None) -> bool:
        """True iff the exact directed triple is stored with score >= score_min."""
        triple = r.triple if hasattr(r, "triple") else tuple(r)
        i = self._index.get(triple)
        return i is not None and self.assertions[i].score >= _threshold(score_min)

    def involved_relations(self, concept: str, score_min: int | None = None) -> list[Assertion]:
        thr = _threshold(score_min)
        return [a for a in (self.assertions[i] for i in self._by_concept.get(concept, ()))
                if a.score >= thr]

    def relations_between(self, a: str, b: str, score_min: int | None = None) -> list[Assertion]:
        thr = _threshold(score_min)
        key = (a, b) if a <= b else (b, a)
        return [x for x in (self.assertions[i] for i in self._by_pair.get(key, ()))
                if x.score >= thr]

    def support(self, score_min: int | None = None) -> tuple[str, ...]:
        """Sorted concepts appearing in at least one assertion above threshold."""
        thr = _threshold(score_min)
        sup = self._support.get(thr)
        if sup is None:
            sup = tuple(c for c in self.concepts if self._best_score[c] >= thr)
            self._support[thr] = sup
        return sup

    def random_concept(self, rng: np.random.Generator, score_min: int | None = None) -> str:
        sup = self.support(score_min)
        if not sup:
            raise ExhaustedStoreError(f"no concept with an assertion scored >= {score_min}")
        return sup[rng.integers(len(sup))]

    def signatures(self, concept: str, score_min: int | None = None) -> list[tuple[str, str, str]]:
        """Relation slots ``(type, direction, other endpoint)`` the concept fills."""
        out = []
        for a in self.involved_relations(concept, score_min):
            if a.start == concept:
                out.append((a.rel_type, OUT, a.end))
            else:
                out.append((a.rel_type, IN, a.start))
        return out

    def fill_signature(self, signature, concept: str) -> tuple[str, str, str]:
        rel, direction, other = signature
        return (rel, concept, other) if direction == OUT else (rel, other, concept)

    def interchangeable_with(self, concept: str, score_min: int | None = None) -> tuple[str, ...]:
        """Concepts sharing at least one stored relation slot with ``concept``."""
        thr = _threshold(score_min)
        key = (concept, thr)
        cached = self._partners.get(key)
        if cached is not None:
            return cached
        found: dict[str, None] = {}
        for sig in self.signatures(concept, score_min):
            outgoing = sig[1] == OUT
            for i in self._by_signature.get(sig, ()):
                a = self.assertions[i]
                if a.score < thr:
                    continue
                other = a.start if outgoing else a.end
                if other != concept:
                    found[other] = None
        result = tuple(sorted(found))
        self._partners[key] = result
        return result

    def shared_signatures(self, a: str, b: str, score_min: int | None = None) -> list[tuple]:
        sb = set(self.signatures(b, score_min))
        return [s for s in self.signatures(a, score_min) if s in sb]

    def attachable_concepts(self, net: SemanticNetwork, score_min: int | None = None
                            ) -> list[tuple[str, Assertion]]:
        """Pairs ``(c, a)``: ``c`` is outside ``net`` and ``a`` links it to a member."""
        out = []
        for member in net.concepts:
            for a in self.involved_relations(member, score_min):
                other = a.other(member)
                if not net.has_concept(other):
                    out.append((other, a))
        return out

    def interchangeable_pairs(self, net_a: SemanticNetwork, net_b: SemanticNetwork,
                              score_min: int | None = None) -> list[tuple[str, str]]:
        """All ``(a, b)``, ``a`` in ``net_a``, ``b`` in ``net_b``, ``a != b``,
        that can stand in for each other in at least one stored relation."""
        pairs = []
        for a in net_a.concepts:
            partners = set(self.interchangeable_with(a, score_min))
            if not partners:
                continue
            pairs.extend((a, b) for b in net_b.concepts if b in partners)
        return pairs

    def cross_attachments(self, net_a: SemanticNetwork, net_b: SemanticNetwork,
                          score_min: int | None = None) -> list[Assertion]:
        """Stored relations joining a concept of ``net_a`` with one of ``net_b``
        that are not already present in either network."""
        small, large = (net_a, net_b) if net_a.n_concepts <= net_b.n_concepts else (net_b, net_a)
        seen = set()
        out = []
        for c in small.concepts:
            for a in self.involved_relations(c, score_min):
                if a.triple in seen:
                    continue
                other = a.other(c)
                if large.has_concept(other) and a.triple not in net_a and a.triple not in net_b:
                    seen.add(a.triple)
                    out.append(a)
        out.sort(key=lambda a: self._index[a.triple])
        return out


def ingest(paths: Sequence, score_min: int | None = None) -> KnowledgeStore:
    """Read dump files into a store keeping assertions scored >= ``score_min``."""
    return KnowledgeStore.from_files(paths, score_min)


def content_hash(paths: Sequence, score_min: int | None = None) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
        h.update(b"\0")
    h.update(repr(score_min).encode())
    return h.hexdigest()


def load_store(paths: Sequence, score_min: int | None = None, cache_dir=None) -> KnowledgeStore:
    """Ingest dumps, reusing a snapshot in ``cache_dir`` keyed by content hash."""
    if cache_dir is None:
        return ingest(paths, score_min)
    cache = Path(cache_dir) / f"store-{content_hash(paths, score_min)[:16]}.pkl"
    if cache.exists():
        return KnowledgeStore.load(cache)
    store = ingest(paths, score_min)
    cache.parent.mkdir(parents=True, exist_ok=True)
    store.save(cache)
    return store
