"""Command line entry point: ``fspclust {mine,cluster,eval,map,generate}``.

Runs are driven by a flat TOML config::

    log_path = "log.csv"
    sample_path = "sample.txt"
    output_dir = "out"
    phi_s = 0.6
    k = 10
    seed = 0

Relative paths resolve against the config file's directory. Exit codes:
0 success, 2 config error, 3 data error, 4 infeasible thresholds,
5 resource limit. ``FSPCLUST_LOG_LEVEL`` sets log verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .cluster import DEFAULT_RECALL_FLOOR, Cluster, search_thresholds, write_cluster
from .corpus import (
    DEFAULT_SEPARATOR,
    EventLog,
    Labeler,
    RowError,
    build_traces,
    filter_log,
    parse_event_csv,
    read_case_ids,
    write_event_csv,
)
from .errors import ConfigError, DataError, NoFeasibleThresholds, ResourceLimitError
from .evaluation import GroundTruth, SyntheticSpec, generate_synthetic, metrics, sample_truth, write_ids
from .fsp import BUNDLE_FILES, DEFAULT_MAX_FRONTIER, as_min_support, read_bundle, read_patterns, select_bundle, write_bundle
from .matcher import default_workers, score_log, write_scores
from .pipeline import mine_training, prepare_sample
from .procmap import build_map, to_dot

logger = logging.getLogger("fspclust")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INFEASIBLE, EXIT_RESOURCE = 0, 2, 3, 4, 5


@dataclass
class RunConfig:
    log_path: Path
    sample_path: Path
    output_dir: Path
    phi_s: Fraction
    k: int = 10
    seed: int = 0
    labeler: str = "activity+diag"
    separator: str = DEFAULT_SEPARATOR
    recall_floor: Fraction = DEFAULT_RECALL_FLOOR
    max_frontier: int | None = DEFAULT_MAX_FRONTIER
    max_pattern_length: int | None = None
    delimiter: str = ","
    year: int | None = None
    threads: int | None = None

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            raw = tomllib.loads(path.read_text(encoding="utf-8"))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_mapping(raw, base=path.parent)

    @classmethod
    def from_mapping(cls, raw: dict, base=Path(".")) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        for key in ("log_path", "sample_path", "output_dir", "phi_s"):
            if key not in raw:
                raise ConfigError(f"config is missing {key!r}")
        vals = dict(raw)
        for key in ("log_path", "sample_path", "output_dir"):
            p = Path(vals[key])
            vals[key] = p if p.is_absolute() else Path(base) / p
        vals["phi_s"] = as_min_support(vals["phi_s"])
        floor = vals.get("recall_floor", DEFAULT_RECALL_FLOOR)
        vals["recall_floor"] = Fraction(repr(floor)) if isinstance(floor, float) else Fraction(floor)
        # TOML has no null: 0 means unbounded
        for key in ("max_frontier", "max_pattern_length"):
            if vals.get(key) == 0:
                vals[key] = None
        cfg = cls(**vals)
        if not isinstance(cfg.k, int) or cfg.k < 1:
            raise ConfigError("k must be a positive integer")
        if cfg.labeler not in Labeler.MODES:
            raise ConfigError(f"labeler must be one of {Labeler.MODES}")
        return cfg

    def check_paths(self):
        for p in (self.log_path, self.sample_path):
            if not p.exists():
                raise ConfigError(f"path does not exist: {p}")

    @property
    def make_labeler(self) -> Labeler:
        return Labeler(self.labeler, self.separator)

    @property
    def workers(self) -> int:
        return self.threads or default_workers()


def load_log(cfg: RunConfig) -> EventLog:
    errors: list[RowError] = []
    events = parse_event_csv(cfg.log_path, delimiter=cfg.delimiter, errors=errors)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    if errors:
        report = cfg.output_dir / "ingest_errors.txt"
        report.write_text("".join(f"{e}\n" for e in errors), encoding="utf-8")
        logger.warning("%d malformed row(s) skipped; see %s", len(errors), report)
    log = build_traces(events, cfg.make_labeler)
    if cfg.year is not None:
        log = filter_log(log, lambda e: e.timestamp.year == cfg.year)
    logger.info("loaded %d traces, %d events", len(log), log.n_events)
    return log


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def _sample(cfg, log):
    sample, missing = prepare_sample(log, read_case_ids(cfg.sample_path), cfg.k, cfg.seed)
    if missing:
        logger.warning("sample id(s) not found in log: %s", ", ".join(missing))
    return sample, missing


def cmd_mine(cfg: RunConfig, log: EventLog | None = None) -> dict[str, Path]:
    cfg.check_paths()
    log = log if log is not None else load_log(cfg)
    sample, missing = _sample(cfg, log)
    t0 = time.perf_counter()
    ps = mine_training(log, sample, cfg.phi_s, cfg.make_labeler, cfg.max_pattern_length, cfg.max_frontier)
    bundle = select_bundle(ps)
    elapsed = time.perf_counter() - t0
    paths = write_bundle(bundle, cfg.output_dir)
    _write_json(cfg.output_dir / "sample_split.json",
                {"all_ids": sorted(sample.all_ids), "train_ids": sorted(sample.train_ids)})
    report = {
        "phi_s": str(cfg.phi_s),
        "k": cfg.k,
        "n_frequent": len(ps),
        "sp1": len(bundle.sp1),
        "sp2": len(bundle.sp2),
        "sp_clo": len(bundle.sp_clo),
        "truncated": ps.truncated,
        "missing_sample_ids": list(missing),
        "seconds": round(elapsed, 4),
    }
    paths["report"] = cfg.output_dir / "mining_report.json"
    _write_json(paths["report"], report)
    logger.info("mined %d patterns: sp1=%d sp2=%d sp_clo=%d", len(ps), *bundle.counts())
    return paths


def cmd_cluster(cfg: RunConfig, log: EventLog | None = None) -> dict[str, Path]:
    cfg.check_paths()
    log = log if log is not None else load_log(cfg)
    if not all((cfg.output_dir / name).exists() for name in BUNDLE_FILES.values()):
        cmd_mine(cfg, log)
    bundle = read_bundle(cfg.output_dir)
    sample, _ = _sample(cfg, log)
    scores = score_log(log, cfg.make_labeler, bundle, workers=cfg.workers)
    out = {"scores": cfg.output_dir / "scores.csv",
           "thresholds": cfg.output_dir / "thresholds.json",
           "cluster": cfg.output_dir / "cluster.txt"}
    write_scores(scores, out["scores"])
    try:
        t, cluster = search_thresholds(scores, sample, cfg.recall_floor)
    except NoFeasibleThresholds as exc:
        _write_json(out["thresholds"], _thresholds_obj(exc.best, feasible=False))
        raise
    _write_json(out["thresholds"], _thresholds_obj(cluster, feasible=True))
    write_cluster(cluster, out["cluster"])
    logger.info("thresholds %s -> cluster of %d (est. recall %s)", t.as_tuple(), len(cluster), cluster.est_recall)
    return out


def _thresholds_obj(cluster: Cluster, feasible: bool) -> dict:
    t = cluster.thresholds
    return {
        "phi1": t.phi1,
        "phi2": t.phi2,
        "phi_clo": t.phi_clo,
        "est_recall": str(cluster.est_recall),
        "cluster_size": len(cluster),
        "feasible": feasible,
    }


def cmd_eval(cluster_path, truth_path, out_path=None) -> str:
    c = read_case_ids(cluster_path)
    truth = read_case_ids(truth_path)
    if not truth:
        raise DataError(f"ground truth {truth_path} is empty")
    report = metrics(c, GroundTruth(frozenset(truth))).to_json()
    if out_path is not None:
        Path(out_path).write_text(report + "\n", encoding="utf-8")
    return report


def cmd_map(bundle_path, out_path, label_supports=True, transitive=False) -> str:
    bundle_path = Path(bundle_path)
    sp_clo_path = bundle_path / BUNDLE_FILES["sp_clo"] if bundle_path.is_dir() else bundle_path
    if not sp_clo_path.exists():
        raise DataError(f"closed-pattern file not found: {sp_clo_path}")
    pm = build_map(read_patterns(sp_clo_path), transitive=transitive)
    dot = to_dot(pm, label_supports=label_supports)
    out_path = Path(out_path)
    out_path.write_text(dot, encoding="utf-8")
    out_path.with_suffix(".json").write_text(pm.to_json() + "\n", encoding="utf-8")
    logger.info("process map: %d nodes, %d edges -> %s", len(pm.nodes), len(pm.edges), out_path)
    return dot


def cmd_generate(out_dir, spec: SyntheticSpec, sample_size=30, k=10, phi_s="3/5") -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    log, truth, sigs = generate_synthetic(spec)
    paths = {"log": out_dir / "log.csv", "truth": out_dir / "truth.txt",
             "sample": out_dir / "sample.txt", "config": out_dir / "config.toml"}
    write_event_csv(log, paths["log"])
    write_ids(truth.case_ids, paths["truth"])
    write_ids(sample_truth(truth, sample_size, spec.seed), paths["sample"])
    with open(out_dir / "signatures.jsonl", "w", encoding="utf-8") as fh:
        for s in sigs:
            fh.write(json.dumps(list(s), ensure_ascii=False) + "\n")
    paths["config"].write_text(
        f'log_path = "log.csv"\nsample_path = "sample.txt"\noutput_dir = "out"\n'
        f'phi_s = "{phi_s}"\nk = {k}\nseed = {spec.seed}\n',
        encoding="utf-8",
    )
    return paths


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fspclust", description="Partial trace clustering from a small sample of a target cohort.")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, help_ in (("mine", "mine the pattern bundle of the training sample"),
                        ("cluster", "score all cases and extract the cluster")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("-c", "--config", required=True, type=Path)
        p.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")

    p = sub.add_parser("eval", help="recall/precision/F1 of a cluster file against ground truth")
    p.add_argument("cluster_path", type=Path)
    p.add_argument("truth_path", type=Path)
    p.add_argument("-o", "--output", type=Path, default=None)

    p = sub.add_parser("map", help="render the closed patterns as a DOT process map")
    p.add_argument("bundle_path", type=Path, help="bundle directory or sp_clo.jsonl")
    p.add_argument("-o", "--output", type=Path, default=Path("map.dot"))
    p.add_argument("--no-supports", action="store_true", help="omit support annotations")
    p.add_argument("--transitive", action="store_true", help="add edges for all ordered pattern pairs")

    p = sub.add_parser("generate", help="write a synthetic planted-cluster log with truth and sample")
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--n-cases", type=int, default=10_000)
    p.add_argument("--alphabet-size", type=int, default=200)
    p.add_argument("--cluster-size", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-size", type=int, default=30)
    return ap


def _configure_logging() -> None:
    # own handler on the package logger, rebound to the current stderr on every call
    for h in list(logger.handlers):
        if getattr(h, "_fspclust", False):
            logger.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler._fspclust = True
    logger.addHandler(handler)
    try:
        logger.setLevel(os.environ.get("FSPCLUST_LOG_LEVEL", "WARNING").upper())
    except ValueError:
        logger.setLevel(logging.WARNING)
    logger.propagate = False


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("mine", "cluster"):
            cfg = RunConfig.load(args.config)
            if args.threads is not None:
                cfg.threads = args.threads
            (cmd_mine if args.command == "mine" else cmd_cluster)(cfg)
        elif args.command == "eval":
            report = cmd_eval(args.cluster_path, args.truth_path, args.output)
            if args.output is None:
                print(report)
        elif args.command == "map":
            cmd_map(args.bundle_path, args.output, not args.no_supports, args.transitive)
        elif args.command == "generate":
            spec = SyntheticSpec(n_cases=args.n_cases, alphabet_size=args.alphabet_size,
                                 cluster_size=args.cluster_size, seed=args.seed)
            cmd_generate(args.output, spec, sample_size=args.sample_size)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoFeasibleThresholds as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
