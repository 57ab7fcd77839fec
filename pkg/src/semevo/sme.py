"""Structure mapping between semantic networks.

A match hypothesis pairs a base relation with a target relation of the
same type and implies the correspondences of their sources and of their
targets.  A mapping is a set of hypotheses whose implied concept
correspondences are one-to-one.  Mappings are scored by

    base_weight * matched_relations + trickle_factor * connected_relations

where a matched relation is *connected* when one of its base endpoints is
shared with another matched relation.  The second term rewards systematic,
interlinked structure over scattered matches.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

from .network import ATTRIBUTE_TYPES, Relation, SemanticNetwork

UNMATCHED = "—"


@dataclass(frozen=True)
class SMEWeights:
    base_weight: float = 0.3
    trickle_factor: float = 0.1

    def value(self, n_matched: int, n_connected: int) -> float:
        return self.base_weight * n_matched + self.trickle_factor * n_connected


DEFAULT_WEIGHTS = SMEWeights()
EXHAUSTIVE_CUTOFF = 16
# Search-node allowance once the hypothesis count exceeds the cutoff.
NODE_BUDGET = 50_000


@dataclass(frozen=True)
class MatchHypothesis:
    base_rel: Relation
    target_rel: Relation

    @property
    def implied(self) -> tuple[tuple[str, str], tuple[str, str]]:
        return ((self.base_rel.source, self.target_rel.source),
                (self.base_rel.target, self.target_rel.target))

    @property
    def is_attribute(self) -> bool:
        return self.base_rel.rel_type in ATTRIBUTE_TYPES


@dataclass(frozen=True)
class AnalogyMapping:
    concept_pairs: tuple[tuple[str, str], ...]
    relation_pairs: tuple[tuple[Relation, Relation], ...]
    score: float
    base: SemanticNetwork | None = field(default=None, compare=False, repr=False)

    @property
    def concept_map(self) -> dict[str, str]:
        return dict(self.concept_pairs)

    def __len__(self):
        return len(self.relation_pairs)


def match_hypotheses(base: SemanticNetwork, target: SemanticNetwork) -> list[MatchHypothesis]:
    by_type: dict[str, list[Relation]] = {}
    for r in target:
        by_type.setdefault(r.rel_type, []).append(r)
    return [MatchHypothesis(b, t) for b in base for t in by_type.get(b.rel_type, ())]


def connected_count(base_rels: Sequence[Relation]) -> int:
    """Number of relations sharing an endpoint with another relation in the list."""
    degree: dict[str, int] = {}
    for r in base_rels:
        degree[r.source] = degree.get(r.source, 0) + 1
        degree[r.target] = degree.get(r.target, 0) + 1
    return sum(1 for r in base_rels if degree[r.source] > 1 or degree[r.target] > 1)


def score(mapping: AnalogyMapping | Sequence[tuple[Relation, Relation]],
          weights: SMEWeights = DEFAULT_WEIGHTS) -> float:
    pairs = mapping.relation_pairs if isinstance(mapping, AnalogyMapping) else mapping
    base_rels = [b for b, _ in pairs]
    return weights.value(len(base_rels), connected_count(base_rels))


def is_consistent(pairs: Sequence[tuple[Relation, Relation]]) -> bool:
    """One-to-one on relations and on the implied concept correspondences."""
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}
    seen_b, seen_t = set(), set()
    for b, t in pairs:
        if b.rel_type != t.rel_type or b.triple in seen_b or t.triple in seen_t:
            return False
        seen_b.add(b.triple)
        seen_t.add(t.triple)
        for x, y in ((b.source, t.source), (b.target, t.target)):
            if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
                return False
    return True


def _search_order(base: SemanticNetwork, options: dict) -> list[Relation]:
    """Base relations with candidates, walked breadth-first over shared
    concepts so that consistency constraints bite early."""
    pending = [r for r in base if options[r.triple]]
    order, placed = [], set()
    for root in pending:
        if root.triple in placed:
            continue
        queue = [root]
        placed.add(root.triple)
        while queue:
            r = queue.pop(0)
            order.append(r)
            for c in (r.source, r.target):
                for nb in base.incident(c):
                    if nb.triple not in placed and options[nb.triple]:
                        placed.add(nb.triple)
                        queue.append(nb)
    return order


class _Search:
    def __init__(self, order, options, weights, budget):
        self.order = order
        self.options = options
        self.weights = weights
        self.budget = budget
        self.nodes = 0
        self.best_score = -1.0
        self.best: list[tuple[Relation, Relation]] = []
        self.fwd: dict[str, str] = {}
        self.bwd: dict[str, str] = {}
        self.used: set = set()
        self.chosen: list[tuple[Relation, Relation]] = []

    def offer(self, pairs):
        value = self.weights.value(len(pairs), connected_count([b for b, _ in pairs]))
        if value > self.best_score:
            self.best_score = value
            self.best = list(pairs)

    def _bind(self, x, y, undo):
        fx = self.fwd.get(x)
        if fx is not None:
            return fx == y
        if y in self.bwd:
            return False
        self.fwd[x] = y
        self.bwd[y] = x
        undo.append(x)
        return True

    def _unbind(self, undo):
        for x in undo:
            del self.bwd[self.fwd.pop(x)]

    def run(self, i=0):
        if self.budget is not None and self.nodes >= self.budget:
            return
        self.nodes += 1
        n = len(self.chosen)
        bound = n + len(self.order) - i
        if self.weights.value(bound, bound) <= self.best_score:
            return
        if i == len(self.order):
            self.offer(self.chosen)
            return
        b = self.order[i]
        for t in self.options[b.triple]:
            if t.triple in self.used:
                continue
            undo: list[str] = []
            if self._bind(b.source, t.source, undo) and self._bind(b.target, t.target, undo):
                self.used.add(t.triple)
                self.chosen.append((b, t))
                self.run(i + 1)
                self.chosen.pop()
                self.used.discard(t.triple)
            self._unbind(undo)
        self.run(i + 1)


def _greedy(hyps: list[MatchHypothesis], weights: SMEWeights) -> list[tuple[Relation, Relation]]:
    """Grow a mapping from every seed hypothesis, always adding the consistent
    hypothesis with the largest score gain; keep the best grown mapping."""
    best, best_value = [], -1.0
    pairs_all = [(h.base_rel, h.target_rel) for h in hyps]
    for seed in pairs_all:
        current = [seed]
        while True:
            base_value = score(current, weights)
            pick, pick_gain = None, 0.0
            used_b = {b.triple for b, _ in current}
            used_t = {t.triple for _, t in current}
            for cand in pairs_all:
                if cand[0].triple in used_b or cand[1].triple in used_t:
                    continue
                trial = current + [cand]
                if not is_consistent(trial):
                    continue
                gain = score(trial, weights) - base_value
                if gain > pick_gain:
                    pick, pick_gain = cand, gain
            if pick is None:
                break
            current.append(pick)
        value = score(current, weights)
        if value > best_value:
            best, best_value = current, value
    return best


def best_mapping(base: SemanticNetwork, target: SemanticNetwork,
                 weights: SMEWeights = DEFAULT_WEIGHTS,
                 exhaustive_cutoff: int = EXHAUSTIVE_CUTOFF,
                 node_budget: int = NODE_BUDGET) -> AnalogyMapping:
    """Highest-scoring consistent mapping from ``base`` into ``target``.

    With at most ``exhaustive_cutoff`` match hypotheses the search is a
    complete branch and bound and the result is optimal.  Above the cutoff
    a greedy seed-and-grow mapping is computed first and then improved by
    branch and bound limited to ``node_budget`` search nodes.  Ties go to
    the mapping met first in the canonical search order (base relations in
    network order, candidate targets in network order, matching before
    skipping).
    """
    hyps = match_hypotheses(base, target)
    options: dict[tuple, list[Relation]] = {r.triple: [] for r in base}
    for h in hyps:
        options[h.base_rel.triple].append(h.target_rel)
    order = _search_order(base, options)
    exhaustive = len(hyps) <= exhaustive_cutoff
    search = _Search(order, options, weights, None if exhaustive else node_budget)
    if not exhaustive:
        search.offer(_greedy(hyps, weights))
    search.run()
    return _make_mapping(base, search.best, weights)


def _make_mapping(base, pairs, weights) -> AnalogyMapping:
    rank = {r.triple: i for i, r in enumerate(base)}
    pairs = sorted(pairs, key=lambda p: rank[p[0].triple])
    cmap: dict[str, str] = {}
    for b, t in pairs:
        cmap[b.source] = t.source
        cmap[b.target] = t.target
    concept_pairs = tuple((c, cmap[c]) for c in base.concepts if c in cmap)
    return AnalogyMapping(concept_pairs, tuple(pairs), score(pairs, weights), base)


def fitness(base: SemanticNetwork, individual: SemanticNetwork,
            weights: SMEWeights = DEFAULT_WEIGHTS, **kwargs) -> float:
    """Analogical similarity of ``individual`` (target) to ``base``."""
    return best_mapping(base, individual, weights, **kwargs).score


def correspondence_rows(mapping: AnalogyMapping,
                        base: SemanticNetwork | None = None) -> list[tuple[str, str, str]]:
    """``(section, base, target)`` rows listing every base concept and relation
    in base order, with :data:`UNMATCHED` where nothing corresponds."""
    base = base if base is not None else mapping.base
    cmap = mapping.concept_map
    rmap = {b.triple: t for b, t in mapping.relation_pairs}
    if base is None:
        concepts = [c for c, _ in mapping.concept_pairs]
        relations = [b for b, _ in mapping.relation_pairs]
    else:
        concepts, relations = base.concepts, base.relations
    rows = [("concepts", c, cmap.get(c, UNMATCHED)) for c in concepts]
    for r in relations:
        t = rmap.get(r.triple)
        rows.append(("relations", str(r), UNMATCHED if t is None else str(t)))
    return rows


def correspondence_table(mapping: AnalogyMapping, base: SemanticNetwork | None = None) -> str:
    rows = correspondence_rows(mapping, base)
    width = max([len("Base")] + [len(b) for _, b, _ in rows]) + 4
    lines = [f"{'Base':<{width}}Target"]
    section = None
    for sec, b, t in rows:
        if sec != section:
            section = sec
            lines.append(sec.capitalize())
        lines.append(f"{b:<{width}}{t}")
    lines.append(f"Score: {mapping.score:.6g}")
    return "\n".join(lines) + "\n"


def correspondence_csv(mapping: AnalogyMapping, base: SemanticNetwork | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["base", "target"])
    for _, b, t in correspondence_rows(mapping, base):
        writer.writerow([b, t])
    return buf.getvalue()
