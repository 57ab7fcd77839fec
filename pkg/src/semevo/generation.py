"""Random commonsense network growth and initial populations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ConfigError
from .knowledge import KnowledgeStore
from .network import SemanticNetwork, normalize_concept
from .utils import derive_rng


@dataclass(frozen=True)
class GenerationBudget:
    size_network: int = 5
    count_timeout: int = 10

    def __post_init__(self):
        if self.size_network < 1 or self.count_timeout < 1:
            raise ConfigError("size_network and count_timeout must be >= 1")


def random_network(store: KnowledgeStore, budget: GenerationBudget, score_min: int | None,
                   rng: np.random.Generator, seed_concepts: Sequence[str] = ()) -> SemanticNetwork:
    """Grow a network from a random seed concept by appending stored relations.

    The seed search prefers a concept with at least ``size_network`` known
    relations; when none turns up within ``count_timeout`` draws the last
    draw is used.  Growth then repeatedly picks a concept already in the
    network and one of its stored relations, appending it when it meets
    ``score_min``, until the network holds ``size_network`` concepts or
    ``count_timeout`` trials have been spent.  Every appended relation comes
    from the store, so the result is commonsense-valid by construction.

    ``seed_concepts``, when given, replace the random seed search.
    """
    thr = -11 if score_min is None else score_min
    if seed_concepts:
        net = SemanticNetwork([normalize_concept(c) for c in seed_concepts])
    else:
        seed = None
        for _ in range(budget.count_timeout):
            seed = store.random_concept(rng, score_min)
            if len(store.involved_relations(seed)) >= budget.size_network:
                break
        net = SemanticNetwork([seed])

    trials = 0
    while net.n_concepts < budget.size_network and trials < budget.count_timeout:
        concepts = net.concepts
        c = concepts[rng.integers(len(concepts))]
        rels = store.involved_relations(c)
        if rels:
            a = rels[rng.integers(len(rels))]
            if a.score >= thr:
                net = net.add_relation(a.relation)
        trials += 1
    return net


def initialize_population(store: KnowledgeStore, size_pop: int, budget: GenerationBudget,
                          score_min: int | None, seed: int) -> list[SemanticNetwork]:
    """``size_pop`` independent random networks; member ``i`` draws from its
    own generator derived from ``(seed, i)``."""
    if size_pop < 1:
        raise ConfigError("size_pop must be >= 1")
    return [random_network(store, budget, score_min, derive_rng(seed, "init", i))
            for i in range(size_pop)]
