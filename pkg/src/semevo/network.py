"""Semantic networks: concepts joined by typed, directed commonsense relations."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .exceptions import InvalidRelationError, NoSuchConceptError

RELATION_TYPES = (
    "IsA",
    "HasA",
    "PartOf",
    "UsedFor",
    "AtLocation",
    "CapableOf",
    "MadeOf",
    "CreatedBy",
    "HasSubevent",
    "HasFirstSubevent",
    "HasLastSubevent",
    "HasPrerequisite",
    "MotivatedByGoal",
    "Causes",
    "Desires",
    "CausesDesire",
    "HasProperty",
    "ReceivesAction",
    "DefinedAs",
    "SymbolOf",
    "LocatedNear",
    "ObstructedBy",
    "ConceptuallyRelatedTo",
    "InheritsFrom",
)
_RELATION_LOOKUP = {name.lower(): name for name in RELATION_TYPES}

# Relation types treated as attributes by the structure mapper.
ATTRIBUTE_TYPES = frozenset({"IsA", "HasProperty"})

SCORE_MIN, SCORE_MAX = -10, 10


def relation_type(label: str) -> str:
    """Return the canonical spelling of a relation label.

    >>> relation_type("atlocation")
    'AtLocation'
    """
    try:
        return _RELATION_LOOKUP[label.strip().lower()]
    except (KeyError, AttributeError):
        raise InvalidRelationError(f"unknown relation type {label!r}") from None


def normalize_concept(name: str) -> str:
    """Lowercase a concept name and collapse its whitespace.

    >>> normalize_concept("  Solar   System ")
    'solar system'
    """
    if not isinstance(name, str):
        raise InvalidRelationError(f"concept name must be a string, got {name!r}")
    norm = " ".join(name.split()).lower()
    if not norm:
        raise InvalidRelationError("concept name is empty")
    return norm


@dataclass(frozen=True, slots=True)
class Relation:
    """A directed relation ``rel_type(source, target)``.

    Identity is the ``(rel_type, source, target)`` triple; ``score`` is
    provenance only and takes no part in equality or hashing.
    """

    rel_type: str
    source: str
    target: str
    score: int = field(default=1, compare=False)

    def __post_init__(self):
        if self.source == self.target:
            raise InvalidRelationError(f"self-loop {self}")
        if not SCORE_MIN <= self.score <= SCORE_MAX:
            raise InvalidRelationError(f"score {self.score} outside [-10, 10]")

    @classmethod
    def parse(cls, rel_type: str, source: str, target: str, score: int = 1) -> "Relation":
        """Build a relation from raw, unnormalized fields."""
        return cls(relation_type(rel_type), normalize_concept(source),
                   normalize_concept(target), int(score))

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.rel_type, self.source, self.target)

    def other(self, concept: str) -> str:
        return self.target if concept == self.source else self.source

    def __str__(self):
        return f"{self.rel_type}({self.source}, {self.target})"


class SemanticNetwork:
    """Immutable directed labelled multigraph of concepts.

    Concepts and relations keep their insertion order, which is what file
    writers and correspondence tables report; equality ignores order.
    Isolated concepts and disconnected clusters are allowed.
    """

    __slots__ = ("_concepts", "_relations", "_adjacency", "_key")

    def __init__(self, concepts: Iterable[str] = (), relations: Iterable[Relation] = ()):
        self._concepts: dict[str, None] = {}
        self._relations: dict[tuple[str, str, str], Relation] = {}
        for c in concepts:
            self._concepts[normalize_concept(c)] = None
        for r in relations:
            self._put(r)
        self._adjacency = None
        self._key = None

    def _put(self, r: Relation) -> None:
        if not isinstance(r, Relation):
            raise InvalidRelationError(f"not a Relation: {r!r}")
        self._concepts.setdefault(r.source, None)
        self._concepts.setdefault(r.target, None)
        old = self._relations.get(r.triple)
        # Duplicate triples keep the highest score.
        if old is None or old.score < r.score:
            self._relations[r.triple] = r

    @classmethod
    def _raw(cls, concepts: dict, relations: dict) -> "SemanticNetwork":
        net = cls.__new__(cls)
        net._concepts = concepts
        net._relations = relations
        net._adjacency = None
        net._key = None
        return net

    # -- inspection ---------------------------------------------------------

    @property
    def concepts(self) -> tuple[str, ...]:
        return tuple(self._concepts)

    @property
    def relations(self) -> tuple[Relation, ...]:
        return tuple(self._relations.values())

    @property
    def n_concepts(self) -> int:
        return len(self._concepts)

    @property
    def n_relations(self) -> int:
        return len(self._relations)

    def size(self) -> tuple[int, int]:
        """``(concept_count, relation_count)``; the relation count is the
        network size used in run statistics."""
        return len(self._concepts), len(self._relations)

    def __len__(self):
        return len(self._relations)

    def __contains__(self, item) -> bool:
        if isinstance(item, Relation):
            return item.triple in self._relations
        if isinstance(item, tuple):
            return item in self._relations
        return item in self._concepts

    def has_concept(self, concept: str) -> bool:
        return concept in self._concepts

    def get_relation(self, triple) -> Relation | None:
        return self._relations.get(triple)

    def incident(self, concept: str) -> tuple[Relation, ...]:
        """Relations having ``concept`` as source or target, in network order."""
        if self._adjacency is None:
            adj: dict[str, list[Relation]] = {c: [] for c in self._concepts}
            for r in self._relations.values():
                adj[r.source].append(r)
                adj[r.target].append(r)
            self._adjacency = {c: tuple(rs) for c, rs in adj.items()}
        return self._adjacency.get(concept, ())

    def neighbors(self, concept: str) -> set[str]:
        return {r.other(concept) for r in self.incident(concept)}

    def clusters(self) -> list[frozenset[str]]:
        """Weakly connected components, ordered by their smallest member."""
        seen: set[str] = set()
        out = []
        for start in sorted(self._concepts):
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            while queue:
                c = queue.popleft()
                for other in self.neighbors(c):
                    if other not in comp:
                        comp.add(other)
                        queue.append(other)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def key(self) -> tuple:
        """Order-independent canonical form, usable as a cache key."""
        if self._key is None:
            self._key = (tuple(sorted(self._concepts)), tuple(sorted(self._relations)))
        return self._key

    def __eq__(self, other):
        if not isinstance(other, SemanticNetwork):
            return NotImplemented
        return (self._concepts.keys() == other._concepts.keys()
                and self._relations.keys() == other._relations.keys())

    def __hash__(self):
        return hash(self.key())

    def __iter__(self) -> Iterator[Relation]:
        return iter(self._relations.values())

    def __repr__(self):
        return f"SemanticNetwork({len(self._concepts)} concepts, {len(self._relations)} relations)"

    def __str__(self):
        lines = [str(r) for r in self._relations.values()]
        lines += [c for c in self._concepts if not self.incident(c)]
        return "\n".join(lines)

    # -- functional updates -------------------------------------------------

    def add_relation(self, r: Relation) -> "SemanticNetwork":
        """Return a copy holding ``r`` and both its endpoints."""
        net = SemanticNetwork._raw(dict(self._concepts), dict(self._relations))
        net._put(r)
        return net

    def add_relations(self, rels: Iterable[Relation]) -> "SemanticNetwork":
        net = SemanticNetwork._raw(dict(self._concepts), dict(self._relations))
        for r in rels:
            net._put(r)
        return net

    def add_concept(self, concept: str) -> "SemanticNetwork":
        concepts = dict(self._concepts)
        concepts[normalize_concept(concept)] = None
        return SemanticNetwork._raw(concepts, dict(self._relations))

    def remove_relation(self, r) -> "SemanticNetwork":
        """Drop one relation, keeping both endpoints even if left isolated."""
        triple = r.triple if isinstance(r, Relation) else tuple(r)
        if triple not in self._relations:
            raise KeyError(f"no relation {triple}")
        rels = dict(self._relations)
        del rels[triple]
        return SemanticNetwork._raw(dict(self._concepts), rels)

    def remove_concept(self, concept: str) -> "SemanticNetwork":
        """Drop a concept together with every relation it takes part in."""
        if concept not in self._concepts:
            raise NoSuchConceptError(concept)
        concepts = {c: None for c in self._concepts if c != concept}
        rels = {t: r for t, r in self._relations.items()
                if r.source != concept and r.target != concept}
        return SemanticNetwork._raw(concepts, rels)

    def union(self, other: "SemanticNetwork") -> "SemanticNetwork":
        net = SemanticNetwork._raw(dict(self._concepts), dict(self._relations))
        for c in other._concepts:
            net._concepts.setdefault(c, None)
        for r in other._relations.values():
            net._put(r)
        return net

    def subnetwork(self, concepts: Iterable[str]) -> "SemanticNetwork":
        """Induced subnetwork on ``concepts``."""
        keep = set(concepts)
        return SemanticNetwork._raw(
            {c: None for c in self._concepts if c in keep},
            {t: r for t, r in self._relations.items()
             if r.source in keep and r.target in keep},
        )


def add_relation(net: SemanticNetwork, r: Relation) -> SemanticNetwork:
    return net.add_relation(r)


def remove_concept(net: SemanticNetwork, concept: str) -> SemanticNetwork:
    return net.remove_concept(concept)


def clusters(net: SemanticNetwork) -> list[frozenset[str]]:
    return net.clusters()


def size(net: SemanticNetwork) -> tuple[int, int]:
    return net.size()
