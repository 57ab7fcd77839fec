"""Bundled fixtures and synthetic toy stores."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .io import read_network
from .knowledge import Assertion, KnowledgeStore
from .network import RELATION_TYPES, SemanticNetwork
from .utils import check_random_state

FIXTURES = ("fig1", "fig3", "fig4", "fig5", "toy", "analogy_toy")
NETWORKS = (
    "fig1_network", "fig4_parent1", "fig4_parent2", "fig4_offspring1", "fig4_offspring2",
    "fig5_parent1", "fig5_parent2", "fig9_base", "fig10_target", "exp2_base", "exp2_target",
    "analogy_base",
)


def data_path(name: str) -> Path:
    """Filesystem path of a bundled data file."""
    path = Path(str(resources.files("semevo") / "data" / name))
    if not path.exists():
        raise FileNotFoundError(f"no bundled data file {name!r}")
    return path


def load_network(name: str) -> SemanticNetwork:
    """One of :data:`NETWORKS`, e.g. ``"fig9_base"``."""
    return read_network(data_path(f"{name}.json"))


def load_fixture_store(name: str, score_min: int | None = 2) -> KnowledgeStore:
    """One of :data:`FIXTURES`, e.g. ``"fig4"``."""
    return KnowledgeStore.from_files([data_path(f"{name}.tsv")], score_min)


def _names(prefix: str, n: int) -> list[str]:
    width = len(str(n - 1))
    return [f"{prefix}{i:0{width}d}" for i in range(n)]


def _random_assertions(rng, concepts, n, types, origin="fixture", score_range=(-1, 7)):
    out = []
    while len(out) < n:
        i, j = rng.choice(len(concepts), size=2, replace=False)
        t = types[rng.integers(len(types))]
        out.append(Assertion(t, concepts[i], concepts[j], int(rng.integers(*score_range)), origin))
    return out


def make_toy_store(n_assertions: int = 300, n_concepts: int = 80, random_state=0,
                   score_min: int | None = None) -> KnowledgeStore:
    """Random store over ``n_concepts`` placeholder concepts.

    Relation types come from a small commonsense-like subset so that
    interchangeable concepts are common.  Scores are uniform in ``[-1, 6]``.
    Duplicate triples collapse, so the store may hold slightly fewer than
    ``n_assertions`` entries.
    """
    rng = check_random_state(random_state)
    types = ("IsA", "HasA", "PartOf", "AtLocation", "UsedFor", "CapableOf", "HasProperty", "MadeOf")
    concepts = _names("concept", n_concepts)
    return KnowledgeStore(_random_assertions(rng, concepts, n_assertions, types), score_min)


def make_analogy_store(n_distractors: int = 240, n_concepts: int = 60, random_state=0,
                       score_min: int | None = None) -> tuple[KnowledgeStore, SemanticNetwork]:
    """A store embedding a 10-relation reference network among random distractors.

    Returns ``(store, reference)``.  The reference is the planetary network
    without ``HasProperty(matter, mass)``; distractor assertions use every
    relation type and also touch the reference concepts, so the reference
    is reachable but not isolated.
    """
    rng = check_random_state(random_state)
    full = load_network("fig9_base")
    reference = full.remove_relation(("HasProperty", "matter", "mass"))
    pool = list(reference.concepts) + _names("thing", n_concepts)
    distractors = _random_assertions(rng, pool, n_distractors, RELATION_TYPES)
    own = [Assertion(r.rel_type, r.source, r.target, max(r.score, 3), "fixture") for r in reference]
    return KnowledgeStore(own + distractors, score_min), reference
