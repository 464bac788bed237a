"""End-to-end partial clustering of one group: mine, score, cluster."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

from .cluster import DEFAULT_RECALL_FLOOR, Cluster, SampleSet, Thresholds, search_thresholds
from .corpus import EventLog, Labeler, simplify
from .errors import ConfigError, DataError
from .evaluation import split_sample
from .fsp import DEFAULT_MAX_FRONTIER, PatternBundle, PatternSet, mine_frequent, select_bundle
from .matcher import ScoreTriple, score_log


@dataclass
class PipelineResult:
    sample: SampleSet
    patterns: PatternSet
    bundle: PatternBundle
    scores: dict[str, ScoreTriple]
    thresholds: Thresholds
    cluster: Cluster
    missing_sample_ids: tuple[str, ...] = ()
    timings: dict[str, float] = field(default_factory=dict)


def prepare_sample(log: EventLog, sample_ids: Iterable[str], k: int, seed: int) -> tuple[SampleSet, tuple[str, ...]]:
    """Split the expert sample; training ids are drawn from cases present in ``log``.

    Returns the split and the sample ids absent from the log. Absent ids
    stay in the sample, so they count against the estimated recall.
    """
    p = frozenset(sample_ids)
    if not p:
        raise DataError("sample is empty")
    missing = tuple(sorted(c for c in p if c not in log))
    present = p.difference(missing)
    if not present:
        raise DataError("no sample id occurs in the log: " + ", ".join(missing))
    if k > len(present):
        raise ConfigError(f"k = {k} exceeds the {len(present)} sample ids present in the log")
    train = split_sample(present, k, seed).train_ids
    return SampleSet(p, train), missing


def mine_training(
    log: EventLog,
    sample: SampleSet,
    phi_s,
    labeler: Labeler | None = None,
    max_pattern_length: int | None = None,
    max_frontier: int | None = DEFAULT_MAX_FRONTIER,
    truncate: bool = False,
) -> PatternSet:
    labeler = labeler or log.labeler
    seqs = [simplify(log[c], labeler) for c in sorted(sample.train_ids)]
    return mine_frequent(seqs, phi_s, max_pattern_length=max_pattern_length,
                         max_frontier=max_frontier, truncate=truncate)


def run_pipeline(
    log: EventLog,
    sample_ids: Iterable[str],
    k: int,
    phi_s,
    seed: int = 0,
    recall_floor=DEFAULT_RECALL_FLOOR,
    labeler: Labeler | None = None,
    max_pattern_length: int | None = None,
    max_frontier: int | None = DEFAULT_MAX_FRONTIER,
    workers: int = 1,
) -> PipelineResult:
    timings = {}
    t0 = time.perf_counter()
    sample, missing = prepare_sample(log, sample_ids, k, seed)
    patterns = mine_training(log, sample, phi_s, labeler, max_pattern_length, max_frontier)
    bundle = select_bundle(patterns)
    t1 = time.perf_counter()
    timings["mine"] = t1 - t0
    scores = score_log(log, labeler, bundle, workers=workers)
    t2 = time.perf_counter()
    timings["score"] = t2 - t1
    thresholds, cluster = search_thresholds(scores, sample, recall_floor)
    timings["search"] = time.perf_counter() - t2
    return PipelineResult(sample, patterns, bundle, scores, thresholds, cluster, missing, timings)
