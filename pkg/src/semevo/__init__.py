"""Evolve commonsense semantic networks toward analogies of a base network."""

from .estimators import AnalogyEvolver, StructureMapper
from .evolution import EvolutionParams, GenerationStats, Population, run
from .knowledge import Assertion, KnowledgeStore, ingest
from .network import Relation, SemanticNetwork
from .sme import AnalogyMapping, SMEWeights, best_mapping, fitness

__version__ = "0.1.0"

__all__ = [
    "AnalogyEvolver",
    "AnalogyMapping",
    "Assertion",
    "EvolutionParams",
    "GenerationStats",
    "KnowledgeStore",
    "Population",
    "Relation",
    "SMEWeights",
    "SemanticNetwork",
    "StructureMapper",
    "best_mapping",
    "fitness",
    "ingest",
    "run",
]
