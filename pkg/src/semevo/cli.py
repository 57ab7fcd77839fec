"""Command-line interface.

::

    semevo ingest DUMP.tsv [...] [--out store.pkl] [--score-min N]
    semevo evolve --config run.json [--seed N] [--workers N] [--out-dir DIR]
    semevo score BASE.json TARGET.json [--csv FILE]
    semevo generate-random (--store store.pkl | --assertions DUMP.tsv ...) [--size N]

Exit status is 0 on success, 2 for configuration errors and 3 for data
errors (unreadable or malformed inputs, empty stores).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .evolution import CSVStatsSink, EvolutionParams, run
from .exceptions import (ConfigError, EmptyStoreError, ExhaustedStoreError, NoSuchConceptError,
                         ParseError)
from .generation import GenerationBudget, random_network
from .io import network_to_dict, read_network, to_dot, write_network
from .knowledge import KnowledgeStore, ingest, load_store
from .sme import EXHAUSTIVE_CUTOFF, SMEWeights, best_mapping, correspondence_csv, correspondence_table
from .utils import derive_rng

logger = logging.getLogger("semevo")

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3
DATA_ERRORS = (ParseError, EmptyStoreError, ExhaustedStoreError, NoSuchConceptError, OSError)


@dataclass
class RunConfig:
    """Everything an ``evolve`` run depends on.

    Stored as JSON::

        {"assertions": ["kb.tsv"], "base": "base.json", "out_dir": "run",
         "evolution": {"size_pop": 200, ...},
         "weights": {"base_weight": 0.3, "trickle_factor": 0.1},
         "exhaustive_cutoff": 16, "workers": 1,
         "export": {"dot": false, "csv": true, "correspondence": true}}

    Relative paths resolve against the directory of the config file.
    """

    assertions: list[str]
    base: str
    out_dir: str = "run"
    evolution: EvolutionParams = field(default_factory=EvolutionParams)
    weights: SMEWeights = field(default_factory=SMEWeights)
    exhaustive_cutoff: int = EXHAUSTIVE_CUTOFF
    workers: int = 1
    export: dict = field(default_factory=lambda: {"dot": False, "csv": True, "correspondence": True})

    KEYS = ("assertions", "base", "out_dir", "evolution", "weights", "exhaustive_cutoff",
            "workers", "export")

    @classmethod
    def from_dict(cls, doc: dict, root: Path | None = None) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(doc) - set(cls.KEYS) - {"run"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("assertions", "base"):
            if key not in doc:
                raise ConfigError(f"config lacks {key!r}")

        def resolve(p):
            if not isinstance(p, str):
                raise ConfigError(f"path expected, got {p!r}")
            path = Path(p)
            if root is not None and not path.is_absolute():
                path = root / path
            return str(path.resolve())

        assertions = doc["assertions"]
        if isinstance(assertions, str):
            assertions = [assertions]
        weights = doc.get("weights", {})
        unknown_w = set(weights) - {"base_weight", "trickle_factor"}
        if unknown_w:
            raise ConfigError(f"unknown weight keys: {sorted(unknown_w)}")
        export = {"dot": False, "csv": True, "correspondence": True}
        unknown_e = set(doc.get("export", {})) - set(export)
        if unknown_e:
            raise ConfigError(f"unknown export keys: {sorted(unknown_e)}")
        export.update(doc.get("export", {}))
        try:
            return cls(
                assertions=[resolve(p) for p in assertions],
                base=resolve(doc["base"]),
                out_dir=resolve(doc.get("out_dir", "run")),
                evolution=EvolutionParams.from_dict(doc.get("evolution", {})),
                weights=SMEWeights(**weights),
                exhaustive_cutoff=int(doc.get("exhaustive_cutoff", EXHAUSTIVE_CUTOFF)),
                workers=int(doc.get("workers", 1)),
                export={k: bool(v) for k, v in export.items()},
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(str(e)) from None

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}:{e.lineno}: invalid JSON: {e.msg}") from None
        return cls.from_dict(doc, path.parent)

    def to_dict(self) -> dict:
        return {
            "assertions": list(self.assertions),
            "base": self.base,
            "out_dir": self.out_dir,
            "evolution": self.evolution.to_dict(),
            "weights": {"base_weight": self.weights.base_weight,
                        "trickle_factor": self.weights.trickle_factor},
            "exhaustive_cutoff": self.exhaustive_cutoff,
            "workers": self.workers,
            "export": dict(self.export),
        }

    def check_inputs(self) -> None:
        """Fail before the run when an input is missing."""
        for p in [*self.assertions, self.base]:
            if not Path(p).is_file():
                raise ConfigError(f"input file not found: {p}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


def _override(cfg: RunConfig, args) -> RunConfig:
    evo = cfg.evolution.to_dict()
    if args.seed is not None:
        evo["master_seed"] = args.seed
    if args.generations is not None:
        evo["max_generations"] = args.generations
    if args.score_min is not None:
        evo["score_min"] = args.score_min
    cfg.evolution = EvolutionParams.from_dict(evo)
    if args.workers is not None:
        cfg.workers = args.workers
    if args.out_dir is not None:
        cfg.out_dir = args.out_dir
    return cfg


# -- commands -------------------------------------------------------------------

def _config(args) -> RunConfig | None:
    return RunConfig.load(args.config) if getattr(args, "config", None) else None


def cmd_ingest(args) -> int:
    cfg = _config(args)
    dumps = args.dumps or (cfg.assertions if cfg else [])
    if not dumps:
        raise ConfigError("ingest needs at least one dump file")
    score_min = args.score_min
    if score_min is None and cfg is not None:
        score_min = cfg.evolution.score_min
    store = ingest(dumps, score_min)
    summary = store.summary()
    print(f"assertions: {summary['assertions']}")
    print(f"concepts: {summary['concepts']}")
    for origin, n in summary["by_origin"].items():
        print(f"  {origin}: {n}")
    out = Path(args.out)
    if args.out_dir:
        out = Path(args.out_dir) / out
    out.parent.mkdir(parents=True, exist_ok=True)
    store.save(out)
    print(f"snapshot: {out}")
    return EXIT_OK


def cmd_evolve(args) -> int:
    cfg = _config(args)
    if cfg is None:
        if not args.assertions or not args.base:
            raise ConfigError("evolve needs --config, or both --assertions and --base")
        cfg = RunConfig(assertions=list(args.assertions), base=args.base)
    cfg = _override(cfg, args)
    cfg.check_inputs()
    base = read_network(cfg.base)
    params = cfg.evolution
    store = load_store(cfg.assertions, params.score_min, args.cache_dir)

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sinks = []
    stats_sink = CSVStatsSink(out / "stats.csv") if cfg.export.get("csv", True) else None
    if stats_sink is not None:
        sinks.append(stats_sink)
    started = time.perf_counter()
    try:
        result = run(store, base, params, cfg.weights, sinks=sinks, workers=cfg.workers,
                     exhaustive_cutoff=cfg.exhaustive_cutoff)
    finally:
        if stats_sink is not None:
            stats_sink.close()
    wall = time.perf_counter() - started

    write_network(result.best, out / "best_network.json")
    if cfg.export.get("correspondence", True):
        (out / "correspondence.txt").write_text(correspondence_table(result.mapping, base), encoding="utf-8")
        (out / "correspondence.csv").write_text(correspondence_csv(result.mapping, base), encoding="utf-8")
    if cfg.export.get("dot", False):
        (out / "base.dot").write_text(to_dot(base, "base"), encoding="utf-8")
        (out / "best_network.dot").write_text(to_dot(result.best, "best"), encoding="utf-8")
    manifest = cfg.to_dict()
    manifest["run"] = {
        "version": __version__,
        "generations": result.population.t,
        "stopped_by": result.stopped_by,
        "best_fitness": result.mapping.score,
        "wall_time_s": round(wall, 3),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"generations: {result.population.t} ({result.stopped_by})")
    print(f"best fitness: {result.mapping.score:.6g}")
    print(f"output: {out}")
    return EXIT_OK


def cmd_score(args) -> int:
    cfg = _config(args)
    weights = cfg.weights if cfg is not None else SMEWeights()
    weights = SMEWeights(
        weights.base_weight if args.base_weight is None else args.base_weight,
        weights.trickle_factor if args.trickle_factor is None else args.trickle_factor,
    )
    cutoff = args.exhaustive_cutoff
    if cutoff is None:
        cutoff = cfg.exhaustive_cutoff if cfg is not None else EXHAUSTIVE_CUTOFF
    base = read_network(args.base)
    target = read_network(args.target)
    mapping = best_mapping(base, target, weights, cutoff)
    sys.stdout.write(correspondence_table(mapping, base))
    if args.csv:
        Path(args.csv).write_text(correspondence_csv(mapping, base), encoding="utf-8")
    return EXIT_OK


def cmd_generate_random(args) -> int:
    cfg = _config(args)
    evo = cfg.evolution if cfg is not None else EvolutionParams()
    score_min = evo.score_min if args.score_min is None else args.score_min
    if args.store:
        store = KnowledgeStore.load(args.store)
    elif args.assertions or cfg is not None:
        store = ingest(args.assertions or cfg.assertions, score_min)
    else:
        raise ConfigError("generate-random needs --store, --assertions or --config")
    budget = GenerationBudget(
        evo.size_network if args.size is None else args.size,
        evo.count_timeout if args.count_timeout is None else args.count_timeout,
    )
    seed = evo.master_seed if args.seed is None else args.seed
    net = random_network(store, budget, score_min, derive_rng(seed, "generate-random"))
    if args.out:
        out = Path(args.out)
        if args.out_dir:
            out = Path(args.out_dir) / out
        out.parent.mkdir(parents=True, exist_ok=True)
        write_network(net, out)
        print(f"concepts: {net.n_concepts} relations: {net.n_relations}")
    else:
        print(json.dumps(network_to_dict(net), indent=2))
        print(f"concepts: {net.n_concepts} relations: {net.n_relations}", file=sys.stderr)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--workers", type=int, help="worker processes for evaluation and variation")
    common.add_argument("--out-dir", help="output directory")
    common.add_argument("--score-min", type=int, help="minimum assertion score")
    common.add_argument("--generations", type=int, help="maximum number of generations")
    common.add_argument("--config", help="JSON run configuration; flags override it")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="semevo", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"semevo {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", parents=[common], help="index assertion dumps into a store snapshot")
    s.add_argument("dumps", nargs="*")
    s.add_argument("--out", default="store.pkl")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("evolve", parents=[common], help="run the evolutionary search")
    s.add_argument("--assertions", nargs="+", help="assertion dumps (without --config)")
    s.add_argument("--base", help="base network JSON (without --config)")
    s.add_argument("--cache-dir", help="reuse store snapshots keyed by dump content")
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("score", parents=[common], help="map a base network onto a target")
    s.add_argument("base")
    s.add_argument("target")
    s.add_argument("--csv", help="also write the correspondences as CSV")
    s.add_argument("--base-weight", type=float)
    s.add_argument("--trickle-factor", type=float)
    s.add_argument("--exhaustive-cutoff", type=int)
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("generate-random", parents=[common], help="grow one random network")
    s.add_argument("--store", help="store snapshot written by ingest")
    s.add_argument("--assertions", nargs="+", help="assertion dumps to ingest instead")
    s.add_argument("--size", type=int, help="target number of concepts (default 5)")
    s.add_argument("--count-timeout", type=int)
    s.add_argument("--out", help="network JSON to write (default: stdout)")
    s.set_defaults(func=cmd_generate_random)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"semevo: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DATA_ERRORS as e:
        print(f"semevo: data error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
