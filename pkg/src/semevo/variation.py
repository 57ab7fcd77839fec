"""Commonsense crossover and mutation.

Every offspring produced here contains only relations stored in the
knowledge store at or above ``score_min``.  Operators that cannot be applied
to a given parent raise :class:`InfeasibleMutation`; the :func:`mutate`
dispatcher consumes that and draws another operator.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleMutation, InvalidPairError
from .knowledge import IN, OUT, KnowledgeStore
from .network import Relation, SemanticNetwork

logger = logging.getLogger(__name__)

OPERATORS = ("xover1", "xover2", "mutI", "mutIIa", "mutIIb", "mutIIIa", "mutIIIb", "mutIV", "none")


@dataclass(frozen=True)
class VariationOutcome:
    offspring: tuple[SemanticNetwork, ...]
    operator_used: str
    detail: str = ""

    def __post_init__(self):
        if self.operator_used not in OPERATORS:
            raise ValueError(f"unknown operator {self.operator_used!r}")


def _pick(seq, rng: np.random.Generator):
    return seq[rng.integers(len(seq))]


def _stored(store: KnowledgeStore, triple, score_min) -> Relation | None:
    a = store.get(triple)
    if a is None or (score_min is not None and a.score < score_min):
        return None
    return a.relation


# -- crossover ----------------------------------------------------------------

def _slot(r: Relation, concept: str) -> tuple[str, str, str]:
    return (r.rel_type, OUT, r.target) if r.source == concept else (r.rel_type, IN, r.source)


def crossover_split(net: SemanticNetwork, concept: str, other_net: SemanticNetwork,
                    other_concept: str):
    """Split ``net`` around its crossover concept.

    Returns ``(subgraph, remainder, severed)``.  The subgraph holds the
    crossover concept, its relations whose slot the other crossover concept
    does not also fill in ``other_net``, and everything reachable from those
    without passing through the crossover concept or through concepts
    attached to it by a shared slot.  The remainder keeps the crossover
    concept, the shared relations and whatever else is left.  ``severed``
    lists relations joining the two parts anywhere but at the crossover
    concept.
    """
    other_slots = {_slot(r, other_concept) for r in other_net.incident(other_concept)}
    own = net.incident(concept)
    shared_ends = {r.other(concept) for r in own if _slot(r, concept) in other_slots}
    blocked = shared_ends | {concept}

    start = [r.other(concept) for r in own
             if _slot(r, concept) not in other_slots and r.other(concept) not in blocked]
    reached = set(start)
    queue = deque(start)
    while queue:
        c = queue.popleft()
        for nb in net.neighbors(c):
            if nb not in reached and nb not in blocked:
                reached.add(nb)
                queue.append(nb)

    # own relations that are not shared but end on a shared concept still
    # belong to the subgraph
    loose = [r for r in own if _slot(r, concept) not in other_slots and r.other(concept) in shared_ends]
    sub_concepts = reached | {concept}
    rest_concepts = (set(net.concepts) - reached) | {concept}
    subgraph = net.subnetwork(sub_concepts).add_relations(loose)
    remainder = net.subnetwork(rest_concepts)
    for r in loose:
        remainder = remainder.remove_relation(r)
    severed = [r for r in net if r.triple not in subgraph and r.triple not in remainder]
    return subgraph, remainder, severed


def _graft(store, remainder: SemanticNetwork, old: str, new: str,
           subgraph: SemanticNetwork, score_min) -> SemanticNetwork:
    concepts = [new if c == old else c for c in remainder.concepts] + list(subgraph.concepts)
    rels = []
    for r in remainder:
        if old in (r.source, r.target):
            s = new if r.source == old else r.source
            t = new if r.target == old else r.target
            if s == t:
                continue
            triple = (r.rel_type, s, t)
        else:
            triple = r.triple
        rel = _stored(store, triple, score_min)
        if rel is not None:
            rels.append(rel)
    rels.extend(r for r in subgraph if _stored(store, r.triple, score_min) is not None)
    return SemanticNetwork(concepts, rels)


def crossover_type1(store: KnowledgeStore, p1: SemanticNetwork, p2: SemanticNetwork,
                    pair: tuple[str, str], rng: np.random.Generator | None = None,
                    score_min: int | None = None) -> tuple[SemanticNetwork, SemanticNetwork]:
    """Subgraph crossover: swap the subgraphs specific to two interchangeable
    crossover concepts.  ``rng`` is accepted for interface symmetry; the
    exchange itself is deterministic once the pair is fixed."""
    x, y = pair
    if not (p1.has_concept(x) and p2.has_concept(y) and x != y
            and y in store.interchangeable_with(x, score_min)):
        raise InvalidPairError(f"{x!r} and {y!r} are not interchangeable crossover concepts")
    sub1, rest1, _ = crossover_split(p1, x, p2, y)
    sub2, rest2, _ = crossover_split(p2, y, p1, x)
    o1 = _graft(store, rest1, x, y, sub2, score_min)
    o2 = _graft(store, rest2, y, x, sub1, score_min)
    return o1, o2


def crossover_type2(store: KnowledgeStore, p1: SemanticNetwork, p2: SemanticNetwork,
                    score_min: int | None, rng: np.random.Generator) -> SemanticNetwork:
    """Graph-merging crossover: both parents plus one random stored relation
    joining them, or just both parents side by side when none exists."""
    return _merge(store, p1, p2, score_min, rng)[0]


def _merge(store, p1, p2, score_min, rng):
    merged = p1.union(p2)
    links = store.cross_attachments(p1, p2, score_min)
    if not links:
        return merged, "merged as separate clusters"
    a = _pick(links, rng)
    return merged.add_relation(a.relation), f"merged by {a.relation}"


def apply_crossover(store: KnowledgeStore, p1: SemanticNetwork, p2: SemanticNetwork,
                    score_min: int | None, rng: np.random.Generator) -> VariationOutcome:
    pairs = store.interchangeable_pairs(p1, p2, score_min)
    if pairs:
        pair = _pick(pairs, rng)
        o1, o2 = crossover_type1(store, p1, p2, pair, rng, score_min)
        return VariationOutcome((o1, o2), "xover1", f"crossover concepts {pair[0]} <-> {pair[1]}")
    o1, d1 = _merge(store, p1, p2, score_min, rng)
    o2, d2 = _merge(store, p1, p2, score_min, rng)
    return VariationOutcome((o1, o2), "xover2", f"{d1}; {d2}")


def crossover(store: KnowledgeStore, p1: SemanticNetwork, p2: SemanticNetwork,
              score_min: int | None, rng: np.random.Generator
              ) -> tuple[SemanticNetwork, SemanticNetwork]:
    """Try subgraph crossover on a random interchangeable pair; fall back to
    two independent graph merges when the parents share no such pair."""
    return apply_crossover(store, p1, p2, score_min, rng).offspring


# -- mutation -----------------------------------------------------------------

def _attach(store, parent, score_min, rng):
    options = store.attachable_concepts(parent, score_min)
    if not options:
        raise InfeasibleMutation("no attachable concept")
    concepts = list(dict.fromkeys(c for c, _ in options))
    c = _pick(concepts, rng)
    a = _pick([a for cc, a in options if cc == c], rng)
    return parent.add_relation(a.relation), f"attached {c} by {a.relation}"


def _add_relation(store, parent, score_min, rng):
    found = {}
    for c in parent.concepts:
        for a in store.involved_relations(c, score_min):
            if parent.has_concept(a.other(c)) and a.triple not in parent:
                found.setdefault(a.triple, a)
    if not found:
        raise InfeasibleMutation("no stored relation between unlinked members")
    a = _pick(list(found.values()), rng)
    return parent.add_relation(a.relation), f"added {a.relation}"


def _delete_relation(parent, rng):
    rels = parent.relations
    if not rels:
        raise InfeasibleMutation("parent has no relation")
    r = _pick(rels, rng)
    return parent.remove_relation(r), f"deleted {r}"


def _add_concept(store, parent, score_min, rng):
    support = store.support(score_min)
    for _ in range(16 if support else 0):
        c = _pick(support, rng)
        if not parent.has_concept(c):
            break
    else:
        outside = [c for c in support if not parent.has_concept(c)]
        if not outside:
            raise InfeasibleMutation("parent already holds every stored concept")
        c = _pick(outside, rng)
    return parent.add_concept(c), f"added concept {c}"


def _delete_concept(parent, rng):
    if parent.n_concepts < 2:
        raise InfeasibleMutation("cannot delete the last concept")
    c = _pick(parent.concepts, rng)
    return parent.remove_concept(c), f"deleted concept {c}"


def replace_concept(store: KnowledgeStore, parent: SemanticNetwork, old: str, new: str,
                    score_min: int | None = None) -> SemanticNetwork:
    """Substitute ``new`` for ``old``, dropping relations the store does not
    support for the new concept."""
    concepts = [new if c == old else c for c in parent.concepts]
    rels = []
    for r in parent:
        if old in (r.source, r.target):
            s = new if r.source == old else r.source
            t = new if r.target == old else r.target
            rel = None if s == t else _stored(store, (r.rel_type, s, t), score_min)
            if rel is not None:
                rels.append(rel)
        else:
            rels.append(r)
    return SemanticNetwork(concepts, rels)


def _replace(store, parent, score_min, rng):
    candidates = []
    for c in parent.concepts:
        partners = [d for d in store.interchangeable_with(c, score_min) if not parent.has_concept(d)]
        if partners:
            candidates.append((c, partners))
    if not candidates:
        raise InfeasibleMutation("no concept has an interchangeable substitute")
    c, partners = _pick(candidates, rng)
    d = _pick(partners, rng)
    return replace_concept(store, parent, c, d, score_min), f"replaced {c} with {d}"


def mutate_concept_attachment(store, parent, score_min, rng) -> SemanticNetwork:
    """Type I: attach a new concept through one stored relation."""
    return _attach(store, parent, score_min, rng)[0]


def mutate_relation_addition(store, parent, score_min, rng) -> SemanticNetwork:
    """Type IIa: add a stored relation between two existing concepts."""
    return _add_relation(store, parent, score_min, rng)[0]


def mutate_relation_deletion(parent, rng) -> SemanticNetwork:
    """Type IIb: delete one relation, keeping its concepts."""
    return _delete_relation(parent, rng)[0]


def mutate_concept_addition(store, parent, score_min, rng) -> SemanticNetwork:
    """Type IIIa: add a random stored concept as a new isolated cluster."""
    return _add_concept(store, parent, score_min, rng)[0]


def mutate_concept_deletion(parent, rng) -> SemanticNetwork:
    """Type IIIb: delete a concept with all its relations."""
    return _delete_concept(parent, rng)[0]


def mutate_concept_replacement(store, parent, score_min, rng) -> SemanticNetwork:
    """Type IV: replace a concept with an interchangeable one."""
    return _replace(store, parent, score_min, rng)[0]


MUTATIONS = (
    ("mutI", lambda s, p, m, g: _attach(s, p, m, g)),
    ("mutIIa", lambda s, p, m, g: _add_relation(s, p, m, g)),
    ("mutIIb", lambda s, p, m, g: _delete_relation(p, g)),
    ("mutIIIa", lambda s, p, m, g: _add_concept(s, p, m, g)),
    ("mutIIIb", lambda s, p, m, g: _delete_concept(p, g)),
    ("mutIV", lambda s, p, m, g: _replace(s, p, m, g)),
)


def apply_mutation(store: KnowledgeStore, parent: SemanticNetwork, score_min: int | None,
                   count_timeout: int, rng: np.random.Generator) -> VariationOutcome:
    for _ in range(count_timeout):
        name, op = MUTATIONS[rng.integers(len(MUTATIONS))]
        try:
            child, detail = op(store, parent, score_min, rng)
        except InfeasibleMutation:
            continue
        return VariationOutcome((child,), name, detail)
    logger.debug("no feasible mutation in %d draws; parent kept", count_timeout)
    return VariationOutcome((parent,), "none", "no feasible mutation before timeout")


def mutate(store: KnowledgeStore, parent: SemanticNetwork, score_min: int | None,
           count_timeout: int, rng: np.random.Generator) -> SemanticNetwork:
    """Apply a uniformly drawn feasible mutation type, redrawing on
    infeasibility; the parent comes back unchanged after ``count_timeout``
    failed draws."""
    return apply_mutation(store, parent, score_min, count_timeout, rng).offspring[0]
