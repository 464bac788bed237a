"""Partial trace clustering of large event logs from small expert samples.

Frequent sequence patterns mined on a handful of sample cases become the
behavioral criteria of a group; every case is scored against them and a
threshold search turns the scores into a cluster.
"""

from .cluster import Cluster, SampleSet, Thresholds, apply_thresholds, estimate_recall, search_thresholds
from .corpus import (
    Event,
    EventLog,
    Labeler,
    LabelSequence,
    Trace,
    build_traces,
    filter_log,
    parse_event_csv,
    simplify,
)
from .evaluation import GroundTruth, Metrics, SyntheticSpec, generate_synthetic, metrics, split_sample
from .fsp import (
    PatternBundle,
    PatternSet,
    SequencePattern,
    extract_closed,
    mine_frequent,
    select_bundle,
    support,
)
from .matcher import ScoreTriple, is_subsequence, score_log, score_trace
from .pipeline import run_pipeline
from .procmap import ProcessMap, build_map, to_dot

__version__ = "0.1.0"
