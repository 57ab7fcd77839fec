"""scikit-learn style wrappers.

``X`` is a sequence of networks (anything :func:`check_network` accepts);
``fit`` takes the base network.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .evolution import EvolutionParams, run
from .sme import EXHAUSTIVE_CUTOFF, best_mapping
from .validation import check_network, check_networks, check_params, check_store, check_weights


class StructureMapper(TransformerMixin, BaseEstimator):
    """Scores networks by their analogical similarity to a fitted base.

    >>> mapper = StructureMapper().fit(base)       # doctest: +SKIP
    >>> mapper.transform([target])                 # doctest: +SKIP
    array([[3.6]])
    """

    def __init__(self, base_weight=0.3, trickle_factor=0.1, exhaustive_cutoff=EXHAUSTIVE_CUTOFF):
        self.base_weight = base_weight
        self.trickle_factor = trickle_factor
        self.exhaustive_cutoff = exhaustive_cutoff

    def fit(self, X, y=None):
        self.weights_ = check_weights(self.base_weight, self.trickle_factor)
        self.base_ = check_network(X, "base")
        return self

    def predict(self, X):
        """Best mapping from the base into each network."""
        check_is_fitted(self, "base_")
        return [best_mapping(self.base_, net, self.weights_, self.exhaustive_cutoff)
                for net in check_networks(X)]

    def transform(self, X):
        """Column of mapping scores, shape ``(n_networks, 1)``."""
        return np.array([[m.score] for m in self.predict(X)], dtype=float).reshape(-1, 1)

    def score(self, X, y=None):
        return float(self.transform(X).mean())


class AnalogyEvolver(BaseEstimator):
    """Evolves networks from a knowledge store toward analogies of a base.

    After ``fit(base)``: ``best_`` is the fittest final network,
    ``mapping_`` its mapping from the base, ``history_`` the per-generation
    statistics, ``population_`` and ``fitness_`` the final generation, and
    ``stopped_by_`` either ``"max_generations"`` or ``"plateau"``.
    """

    def __init__(self, store=None, size_pop=200, prob_rec=0.85, prob_mut=0.15, size_network=5,
                 score_min=2, count_timeout=10, size_tourn=8, prob_win=0.8, max_generations=50,
                 plateau_window=15, plateau_epsilon=1e-9, base_weight=0.3, trickle_factor=0.1,
                 exhaustive_cutoff=EXHAUSTIVE_CUTOFF, random_state=0, n_jobs=1):
        self.store = store
        self.size_pop = size_pop
        self.prob_rec = prob_rec
        self.prob_mut = prob_mut
        self.size_network = size_network
        self.score_min = score_min
        self.count_timeout = count_timeout
        self.size_tourn = size_tourn
        self.prob_win = prob_win
        self.max_generations = max_generations
        self.plateau_window = plateau_window
        self.plateau_epsilon = plateau_epsilon
        self.base_weight = base_weight
        self.trickle_factor = trickle_factor
        self.exhaustive_cutoff = exhaustive_cutoff
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _params(self) -> EvolutionParams:
        seed = self.random_state
        if seed is None:
            seed = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
        return check_params(
            size_pop=self.size_pop, prob_rec=self.prob_rec, prob_mut=self.prob_mut,
            size_network=self.size_network, score_min=self.score_min,
            count_timeout=self.count_timeout, size_tourn=self.size_tourn, prob_win=self.prob_win,
            max_generations=self.max_generations, master_seed=int(seed),
            plateau_window=self.plateau_window, plateau_epsilon=self.plateau_epsilon,
        )

    def fit(self, X, y=None, sinks=()):
        if self.store is None:
            raise ValueError("AnalogyEvolver needs a knowledge store")
        params = self._params()
        self.weights_ = check_weights(self.base_weight, self.trickle_factor)
        self.store_ = check_store(self.store)
        self.base_ = check_network(X, "base")
        result = run(self.store_, self.base_, params, self.weights_, sinks=sinks,
                     workers=self.n_jobs or 1, exhaustive_cutoff=self.exhaustive_cutoff)
        self.params_ = params
        self.best_ = result.best
        self.mapping_ = result.mapping
        self.history_ = result.history
        self.population_ = result.population.members
        self.fitness_ = np.asarray(result.fitness, dtype=float)
        self.stopped_by_ = result.stopped_by
        self.n_generations_ = result.population.t
        return self

    def transform(self, X):
        """Column of fitness values of ``X`` against the fitted base."""
        check_is_fitted(self, "best_")
        return np.array([[best_mapping(self.base_, n, self.weights_, self.exhaustive_cutoff).score]
                         for n in check_networks(X)], dtype=float).reshape(-1, 1)

    def predict(self, X=None):
        """Best mapping for each network of ``X``, or for ``best_`` alone."""
        check_is_fitted(self, "best_")
        nets = [self.best_] if X is None else check_networks(X)
        return [best_mapping(self.base_, n, self.weights_, self.exhaustive_cutoff) for n in nets]

    def top(self, k: int = 1):
        """The ``k`` fittest members of the final population, fittest first."""
        check_is_fitted(self, "best_")
        order = sorted(range(len(self.fitness_)), key=lambda i: (-self.fitness_[i], i))
        return [self.population_[i] for i in order[:k]]
