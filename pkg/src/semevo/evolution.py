"""Generational loop: evaluation, tournament selection, variation, elitism."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .exceptions import ConfigError
from .generation import GenerationBudget, random_network
from .io import network_from_dict, network_to_dict
from .knowledge import KnowledgeStore
from .network import SemanticNetwork
from .sme import DEFAULT_WEIGHTS, EXHAUSTIVE_CUTOFF, AnalogyMapping, SMEWeights, best_mapping
from .utils import derive_rng
from .variation import apply_crossover, apply_mutation

logger = logging.getLogger(__name__)

_MAX_SEED = 2**64 - 1


@dataclass
class EvolutionParams:
    """Run parameters; defaults reproduce the published experimental setup
    (population 200, 50 generations)."""

    size_pop: int = 200
    prob_rec: float = 0.85
    prob_mut: float = 0.15
    size_network: int = 5
    score_min: int = 2
    count_timeout: int = 10
    size_tourn: int = 8
    prob_win: float = 0.8
    max_generations: int = 50
    master_seed: int = 0
    plateau_window: int | None = 15
    plateau_epsilon: float = 1e-9

    def __post_init__(self):
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(isinstance(self.size_pop, int) and self.size_pop >= 1, "size_pop must be an integer >= 1")
        need(0.0 <= self.prob_rec <= 1.0, "prob_rec must lie in [0, 1]")
        need(0.0 <= self.prob_mut <= 1.0, "prob_mut must lie in [0, 1]")
        need(isinstance(self.size_network, int) and self.size_network >= 1, "size_network must be >= 1")
        need(isinstance(self.score_min, int) and -10 <= self.score_min <= 10, "score_min must lie in [-10, 10]")
        need(isinstance(self.count_timeout, int) and self.count_timeout >= 1, "count_timeout must be >= 1")
        need(isinstance(self.size_tourn, int) and 1 <= self.size_tourn <= self.size_pop,
             "size_tourn must lie in [1, size_pop]")
        need(0.0 <= self.prob_win <= 1.0, "prob_win must lie in [0, 1]")
        need(isinstance(self.max_generations, int) and self.max_generations >= 0, "max_generations must be >= 0")
        need(isinstance(self.master_seed, int) and 0 <= self.master_seed <= _MAX_SEED,
             "master_seed must be a 64-bit unsigned integer")
        need(self.plateau_window is None or (isinstance(self.plateau_window, int) and self.plateau_window >= 1),
             "plateau_window must be None or >= 1")
        need(self.plateau_epsilon >= 0, "plateau_epsilon must be >= 0")

    @property
    def budget(self) -> GenerationBudget:
        return GenerationBudget(self.size_network, self.count_timeout)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EvolutionParams":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown evolution parameters: {sorted(unknown)}")
        return cls(**d)


def generation_plan(size_pop: int, prob_rec: float) -> tuple[int, int, int]:
    """``(crossover offspring, reproduced members, elites)`` for one generation.

    Crossover events are ``floor(size_pop * prob_rec / 2)``, capped so that
    one slot always remains for the elite.
    """
    events = math.floor(size_pop * prob_rec / 2 + 1e-9)
    events = min(events, (size_pop - 1) // 2)
    reproduced = size_pop - 2 * events - 1
    return 2 * events, reproduced, 1


@dataclass
class Population:
    members: list[SemanticNetwork]
    t: int = 0
    composition: tuple[int, int, int] | None = None
    operators: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class GenerationStats:
    t: int
    best_fitness: float
    avg_fitness: float
    best_size: int
    avg_size: float

    CSV_HEADER = "generation,best_fitness,avg_fitness,best_size,avg_size"

    def csv_row(self) -> str:
        return f"{self.t},{self.best_fitness!r},{self.avg_fitness!r},{self.best_size},{self.avg_size!r}"


def best_index(fitness: Sequence[float]) -> int:
    """Index of the fittest member, lowest index on ties."""
    best = 0
    for i, f in enumerate(fitness):
        if f > fitness[best]:
            best = i
    return best


def generation_stats(t: int, members: Sequence[SemanticNetwork], fitness: Sequence[float]) -> GenerationStats:
    i = best_index(fitness)
    return GenerationStats(
        t=t,
        best_fitness=float(fitness[i]),
        avg_fitness=float(math.fsum(fitness) / len(fitness)),
        best_size=members[i].n_relations,
        avg_size=float(sum(m.n_relations for m in members) / len(members)),
    )


def select_index(fitness: Sequence[float], size_tourn: int, prob_win: float,
                 rng: np.random.Generator) -> int:
    """Tournament: a random first holder meets ``size_tourn - 1`` random
    challengers; a challenger at least as fit takes over with probability
    ``prob_win``.  Members may be picked any number of times."""
    n = len(fitness)
    w = int(rng.integers(n))
    for _ in range(size_tourn - 1):
        o = int(rng.integers(n))
        if fitness[o] >= fitness[w] and rng.random() < prob_win:
            w = o
    return w


def select(population: Sequence[SemanticNetwork], fitness: Sequence[float], size_tourn: int,
           prob_win: float, rng: np.random.Generator) -> SemanticNetwork:
    return population[select_index(fitness, size_tourn, prob_win, rng)]


# -- execution context ---------------------------------------------------------

class _Context:
    """Read-only state shared by every task of a run, plus a fitness memo."""

    def __init__(self, store, base, params, weights, exhaustive_cutoff):
        self.store = store
        self.base = base
        self.params = params
        self.weights = weights
        self.exhaustive_cutoff = exhaustive_cutoff
        self._memo: dict = {}

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_memo"] = {}
        return state

    def fitness(self, net: SemanticNetwork) -> float:
        key = net.key()
        value = self._memo.get(key)
        if value is None:
            value = best_mapping(self.base, net, self.weights, self.exhaustive_cutoff).score
            if len(self._memo) > 200_000:
                self._memo.clear()
            self._memo[key] = value
        return value


_WORKER_CONTEXT: _Context | None = None


def _install(ctx):
    global _WORKER_CONTEXT
    _WORKER_CONTEXT = ctx


def _dispatch(job):
    fn, item = job
    return fn(_WORKER_CONTEXT, item)


def _task_fitness(ctx, net):
    return ctx.fitness(net)


def _task_init(ctx, i):
    p = ctx.params
    return random_network(ctx.store, p.budget, p.score_min, derive_rng(p.master_seed, "init", i))


def _task_offspring(ctx, task):
    kind, parents, seed = task
    p = ctx.params
    rng = np.random.default_rng(seed)
    if kind == "crossover":
        out = apply_crossover(ctx.store, parents[0], parents[1], p.score_min, rng)
        return list(out.offspring), out.operator_used, out.detail
    if rng.random() < p.prob_mut:
        out = apply_mutation(ctx.store, parents[0], p.score_min, p.count_timeout, rng)
        return list(out.offspring), out.operator_used, out.detail
    return [parents[0]], "copy", ""


class Executor:
    """Maps tasks serially or over worker processes.

    Every task carries its own seed, so results do not depend on the number
    of workers.
    """

    def __init__(self, ctx: _Context, workers: int = 1):
        self.ctx = ctx
        self.workers = max(1, int(workers))
        self._pool = None
        if self.workers > 1:
            self._pool = ProcessPoolExecutor(self.workers, initializer=_install, initargs=(ctx,))

    def map(self, fn, items) -> list:
        items = list(items)
        if self._pool is None:
            return [fn(self.ctx, x) for x in items]
        chunk = max(1, len(items) // (4 * self.workers))
        return list(self._pool.map(_dispatch, [(fn, x) for x in items], chunksize=chunk))

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _executor(store, base, params, weights, exhaustive_cutoff, executor):
    if executor is not None:
        return executor, False
    ctx = _Context(store, base, params, weights, exhaustive_cutoff)
    return Executor(ctx, 1), True


# -- public operations -----------------------------------------------------------

def evaluate_fitnesses(base: SemanticNetwork, population: Sequence[SemanticNetwork],
                       weights: SMEWeights = DEFAULT_WEIGHTS, executor: Executor | None = None,
                       exhaustive_cutoff: int = EXHAUSTIVE_CUTOFF) -> list[float]:
    members = population.members if isinstance(population, Population) else population
    if executor is None:
        return [best_mapping(base, m, weights, exhaustive_cutoff).score for m in members]
    return executor.map(_task_fitness, members)


def next_generation(store: KnowledgeStore, population, fitness: Sequence[float],
                    params: EvolutionParams, rng: np.random.Generator,
                    executor: Executor | None = None) -> Population:
    """Crossover offspring, then mutated reproductions, then the elite.

    Parents are drawn serially from ``rng``; each variation task receives a
    seed drawn from ``rng`` in slot order and may run in any process.
    Crossover offspring are never mutated.
    """
    members = population.members if isinstance(population, Population) else list(population)
    t = population.t if isinstance(population, Population) else 0
    if len(fitness) != len(members):
        raise ValueError("fitness table is not aligned with the population")
    n_cross, n_repro, n_elite = generation_plan(params.size_pop, params.prob_rec)

    tasks = []
    for _ in range(n_cross // 2):
        i = select_index(fitness, params.size_tourn, params.prob_win, rng)
        j = select_index(fitness, params.size_tourn, params.prob_win, rng)
        tasks.append(["crossover", (members[i], members[j])])
    for _ in range(n_repro):
        i = select_index(fitness, params.size_tourn, params.prob_win, rng)
        tasks.append(["reproduce", (members[i],)])
    seeds = rng.integers(0, 2**63, size=len(tasks))
    jobs = [(kind, parents, int(s)) for (kind, parents), s in zip(tasks, seeds)]

    if executor is None:
        ctx = _Context(store, None, params, DEFAULT_WEIGHTS, EXHAUSTIVE_CUTOFF)
        results = [_task_offspring(ctx, job) for job in jobs]
    else:
        results = executor.map(_task_offspring, jobs)

    new_members, operators = [], []
    for offspring, op, detail in results:
        new_members.extend(offspring)
        operators.extend([op] * len(offspring))
        if detail:
            logger.debug("t=%d %s: %s", t, op, detail)
    new_members.append(members[best_index(fitness)])
    operators.append("elite")
    composition = (n_cross, n_repro, n_elite)
    if len(new_members) != params.size_pop:
        raise AssertionError(f"generation size {len(new_members)} != {params.size_pop}")
    logger.info("t=%d composition crossover=%d reproduced=%d elite=%d", t + 1, *composition)
    return Population(new_members, t + 1, composition, operators)


def plateaued(history: Sequence[GenerationStats], window: int | None, epsilon: float) -> bool:
    """Best fitness has not moved by more than ``epsilon`` over ``window`` generations."""
    if window is None or len(history) <= window:
        return False
    return history[-1].best_fitness - history[-1 - window].best_fitness <= epsilon


def plateau_generation(series: Sequence[float], window: int, epsilon: float) -> int | None:
    """First generation at which the plateau rule fires on a best-fitness series."""
    for t in range(window, len(series)):
        if series[t] - series[t - window] <= epsilon:
            return t
    return None


@dataclass
class RunResult:
    best: SemanticNetwork
    mapping: AnalogyMapping
    history: list[GenerationStats]
    population: Population
    fitness: list[float]
    stopped_by: str


class CSVStatsSink:
    """Writes one CSV row per generation."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "w", encoding="utf-8", newline="\n")
        self._fh.write(GenerationStats.CSV_HEADER + "\n")

    def __call__(self, stats: GenerationStats):
        self._fh.write(stats.csv_row() + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()


def save_checkpoint(path, population: Population, history: Sequence[GenerationStats],
                    params: EvolutionParams) -> None:
    rng = derive_rng(params.master_seed, "generation", population.t)
    doc = {
        "t": population.t,
        "params": params.to_dict(),
        "rng_state": rng.bit_generator.state,
        "history": [asdict(h) for h in history],
        "population": [network_to_dict(m) for m in population.members],
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_checkpoint(path):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    population = Population([network_from_dict(m) for m in doc["population"]], doc["t"])
    history = [GenerationStats(**h) for h in doc["history"]]
    return population, history, doc


def run(store: KnowledgeStore, base: SemanticNetwork, params: EvolutionParams,
        weights: SMEWeights = DEFAULT_WEIGHTS, sinks: Iterable[Callable] = (),
        workers: int = 1, exhaustive_cutoff: int = EXHAUSTIVE_CUTOFF,
        checkpoint_every: int | None = None, checkpoint_path=None, resume_from=None) -> RunResult:
    """Evolve networks analogous to ``base`` until ``max_generations`` or a
    fitness plateau, reporting :class:`GenerationStats` to every sink."""
    sinks = list(sinks)
    ctx = _Context(store, base, params, weights, exhaustive_cutoff)
    with Executor(ctx, workers) as ex:
        if resume_from is not None:
            population, history, doc = load_checkpoint(resume_from)
            rng_state = doc["rng_state"]
            for h in history:
                for sink in sinks:
                    sink(h)
        else:
            population = Population(ex.map(_task_init, range(params.size_pop)), 0)
            history, rng_state = [], None
        while True:
            fit = ex.map(_task_fitness, population.members)
            stats = generation_stats(population.t, population.members, fit)
            history.append(stats)
            for sink in sinks:
                sink(stats)
            logger.info("t=%d best=%.4f avg=%.4f size=%d", stats.t, stats.best_fitness,
                        stats.avg_fitness, stats.best_size)
            if population.t >= params.max_generations:
                stopped_by = "max_generations"
                break
            if plateaued(history, params.plateau_window, params.plateau_epsilon):
                stopped_by = "plateau"
                break
            rng = derive_rng(params.master_seed, "generation", population.t)
            if rng_state is not None:
                rng.bit_generator.state = rng_state
                rng_state = None
            population = next_generation(store, population, fit, params, rng, ex)
            if checkpoint_every and checkpoint_path and population.t % checkpoint_every == 0:
                save_checkpoint(checkpoint_path, population, history, params)
    i = best_index(fit)
    best = population.members[i]
    mapping = best_mapping(base, best, weights, exhaustive_cutoff)
    return RunResult(best, mapping, history, population, list(fit), stopped_by)
