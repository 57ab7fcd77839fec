"""Input coercion and checks shared by the estimators and the CLI."""

from __future__ import annotations

from os import PathLike
from typing import Iterable

from .evolution import EvolutionParams
from .exceptions import ConfigError, InvalidRelationError
from .io import network_from_dict, read_network
from .knowledge import KnowledgeStore, load_store
from .network import Relation, SemanticNetwork
from .sme import SMEWeights


def _as_relation(item) -> Relation:
    if isinstance(item, Relation):
        return item
    if isinstance(item, (tuple, list)) and len(item) in (3, 4):
        return Relation.parse(*item)
    raise InvalidRelationError(f"cannot read {item!r} as a relation")


def check_network(x, name: str = "network", allow_empty: bool = False) -> SemanticNetwork:
    """Accept a network, a network document, a JSON path or an iterable of
    ``(type, source, target[, score])`` tuples."""
    if isinstance(x, SemanticNetwork):
        net = x
    elif isinstance(x, dict):
        net = network_from_dict(x)
    elif isinstance(x, (str, PathLike)):
        net = read_network(x)
    elif isinstance(x, Iterable):
        net = SemanticNetwork(relations=[_as_relation(i) for i in x])
    else:
        raise TypeError(f"{name} must be a SemanticNetwork, dict, path or relation list, "
                        f"got {type(x).__name__}")
    if not allow_empty and net.n_concepts == 0:
        raise ValueError(f"{name} is empty")
    return net


def check_networks(xs, name: str = "networks") -> list[SemanticNetwork]:
    if isinstance(xs, (SemanticNetwork, dict, str, PathLike)):
        xs = [xs]
    return [check_network(x, f"{name}[{i}]", allow_empty=True) for i, x in enumerate(xs)]


def check_store(x, score_min: int | None = None) -> KnowledgeStore:
    """A store, or assertion dump paths to ingest."""
    if isinstance(x, KnowledgeStore):
        return x
    if isinstance(x, (str, PathLike)):
        x = [x]
    if isinstance(x, (list, tuple)) and x and all(isinstance(p, (str, PathLike)) for p in x):
        return load_store(x, score_min)
    raise TypeError("store must be a KnowledgeStore or a list of assertion dump paths")


def check_weights(base_weight: float, trickle_factor: float) -> SMEWeights:
    for name, v in (("base_weight", base_weight), ("trickle_factor", trickle_factor)):
        if not isinstance(v, (int, float)) or v < 0:
            raise ConfigError(f"{name} must be a non-negative number")
    return SMEWeights(float(base_weight), float(trickle_factor))


def check_params(**kwargs) -> EvolutionParams:
    try:
        return EvolutionParams.from_dict(kwargs)
    except TypeError as e:
        raise ConfigError(str(e)) from None
