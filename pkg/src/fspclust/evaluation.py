"""Sample splitting, cluster quality metrics, and a planted-cluster log generator."""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta
from fractions import Fraction
from typing import Iterable

import numpy as np

from .cluster import SampleSet
from .corpus import DEFAULT_SEPARATOR, Event, EventLog, Labeler, Trace
from .errors import ConfigError, DataError


@dataclass(frozen=True)
class GroundTruth:
    case_ids: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "case_ids", frozenset(self.case_ids))
        if not self.case_ids:
            raise DataError("ground truth cluster is empty")

    def __len__(self):
        return len(self.case_ids)


@dataclass(frozen=True)
class Metrics:
    recall: Fraction
    precision: Fraction
    f1: Fraction
    cluster_size: int
    truth_size: int
    intersection: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "recall": float(self.recall),
                "precision": float(self.precision),
                "f1": float(self.f1),
                "cluster_size": self.cluster_size,
                "truth_size": self.truth_size,
                "intersection": self.intersection,
            },
            sort_keys=True,
        )


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def split_sample(p: Iterable[str], k: int, seed: int) -> SampleSet:
    """Draw a uniform ``k``-subset of the sample as the training set."""
    ids = sorted(set(p))
    if not 1 <= k <= len(ids):
        raise ConfigError(f"k must lie in [1, {len(ids)}], got {k}")
    rng = _stream(seed, 0)
    pick = rng.choice(len(ids), size=k, replace=False)
    return SampleSet(frozenset(ids), frozenset(ids[i] for i in pick))


def metrics(c: Iterable[str], truth: GroundTruth | Iterable[str]) -> Metrics:
    """Recall, precision and F1 of cluster ``c`` against ``truth``.

    Precision (and therefore F1) is 0 for an empty cluster.
    """
    truth_ids = truth.case_ids if isinstance(truth, GroundTruth) else GroundTruth(frozenset(truth)).case_ids
    c = frozenset(c)
    inter = len(c & truth_ids)
    recall = Fraction(inter, len(truth_ids))
    precision = Fraction(inter, len(c)) if c else Fraction(0)
    if precision + recall == 0:
        f1 = Fraction(0)
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return Metrics(recall, precision, f1, len(c), len(truth_ids), inter)


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a planted-cluster event log.

    Background cases are uniform random label sequences. Each cluster member
    embeds every signature with probability ``embed_prob`` at random
    increasing positions; each remaining position of the member holds a
    uniform random label with probability ``noise_label_rate`` and is left
    out otherwise.
    """

    n_cases: int = 10_000
    alphabet_size: int = 200
    trace_len_range: tuple[int, int] = (20, 60)
    cluster_size: int = 300
    n_signature_patterns: int = 5
    signature_len_range: tuple[int, int] = (3, 5)
    embed_prob: float = 0.9
    noise_label_rate: float = 0.3
    seed: int = 0
    n_diag_codes: int = 8

    def validate(self):
        lo, hi = self.trace_len_range
        slo, shi = self.signature_len_range
        if self.n_cases < 1 or not 1 <= self.cluster_size <= self.n_cases:
            raise ConfigError("need 1 <= cluster_size <= n_cases")
        if not 1 <= lo <= hi:
            raise ConfigError(f"bad trace_len_range {self.trace_len_range}")
        if not 1 <= slo <= shi:
            raise ConfigError(f"bad signature_len_range {self.signature_len_range}")
        if shi > hi:
            raise ConfigError(f"signatures up to length {shi} cannot fit traces of at most {hi} events")
        if not 0 < self.embed_prob <= 1:
            raise ConfigError("embed_prob must lie in (0, 1]")
        if not 0 <= self.noise_label_rate <= 1:
            raise ConfigError("noise_label_rate must lie in [0, 1]")
        if self.n_signature_patterns < 0:
            raise ConfigError("n_signature_patterns must be >= 0")
        if self.n_signature_patterns * shi > self.alphabet_size:
            raise ConfigError("alphabet too small for disjoint signatures")


_BASE_TIME = datetime(2017, 1, 1)


def synthetic_label_parts(j: int, n_diag: int) -> tuple[str, str]:
    return f"act{j // n_diag:03d}", f"dgc{j % n_diag}"


def generate_synthetic(spec: SyntheticSpec) -> tuple[EventLog, GroundTruth, list[tuple[str, ...]]]:
    """Generate a log with one planted cluster.

    Returns the log (labeled ``activity‖diag``), the member ids, and the
    signature patterns as label tuples. Output depends only on ``spec``:
    every case draws from its own PCG64 stream keyed by its index.
    """
    spec.validate()
    lo, hi = spec.trace_len_range
    slo, shi = spec.signature_len_range
    nd = max(1, spec.n_diag_codes)
    parts = [synthetic_label_parts(j, nd) for j in range(spec.alphabet_size)]

    g = _stream(spec.seed, 0)
    sig_lens = g.integers(slo, shi + 1, size=spec.n_signature_patterns)
    sig_labels = g.choice(spec.alphabet_size, size=int(sig_lens.sum()), replace=False)
    signatures: list[np.ndarray] = []
    off = 0
    for length in sig_lens:
        signatures.append(sig_labels[off:off + length])
        off += length
    members = np.sort(g.choice(spec.n_cases, size=spec.cluster_size, replace=False))
    is_member = np.zeros(spec.n_cases, dtype=bool)
    is_member[members] = True

    width = len(str(spec.n_cases - 1))
    traces = []
    truth = []
    eid = 0
    for i in range(spec.n_cases):
        rng = _stream(spec.seed, 1, i)
        length = int(rng.integers(lo, hi + 1))
        if is_member[i]:
            seq = _member_sequence(rng, length, signatures, spec)
        else:
            seq = rng.integers(0, spec.alphabet_size, size=length)
        case_id = f"case{i:0{width}d}"
        start = _BASE_TIME + timedelta(days=int(rng.integers(0, 365)))
        steps = np.cumsum(rng.integers(1, 600, size=len(seq)))
        evs = []
        for j, (lab, minutes) in enumerate(zip(seq.tolist(), steps.tolist())):
            act, diag = parts[lab]
            evs.append(Event(f"e{eid}", case_id, act, start + timedelta(minutes=minutes), diag))
            eid += 1
        if evs:
            traces.append(Trace(case_id, tuple(evs)))
        if is_member[i]:
            truth.append(case_id)

    labeler = Labeler("activity+diag", DEFAULT_SEPARATOR)
    sig_tuples = [tuple(f"{parts[j][0]}{DEFAULT_SEPARATOR}{parts[j][1]}" for j in s.tolist()) for s in signatures]
    return EventLog(traces, labeler), GroundTruth(frozenset(truth)), sig_tuples


def _member_sequence(rng, length, signatures, spec) -> np.ndarray:
    embedded = [s for s in signatures if rng.random() < spec.embed_prob]
    total = sum(len(s) for s in embedded)
    length = max(length, total)
    # random interleaving preserving each signature's internal order
    owner = np.concatenate([np.full(len(s), k) for k, s in enumerate(embedded)]) if embedded else np.empty(0, int)
    rng.shuffle(owner)
    slots = np.zeros(length, dtype=bool)
    if total:
        slots[rng.choice(length, size=total, replace=False)] = True
    noise_keep = rng.random(length) < spec.noise_label_rate
    noise = rng.integers(0, spec.alphabet_size, size=length)
    cursor = [0] * len(embedded)
    out = []
    k = 0
    for pos in range(length):
        if slots[pos]:
            who = owner[k]
            out.append(embedded[who][cursor[who]])
            cursor[who] += 1
            k += 1
        elif noise_keep[pos]:
            out.append(noise[pos])
    return np.asarray(out, dtype=np.int64)


def sample_truth(truth: GroundTruth, size: int, seed: int) -> frozenset[str]:
    """Draw the expert sample uniformly from the ground truth."""
    ids = sorted(truth.case_ids)
    if not 1 <= size <= len(ids):
        raise ConfigError(f"sample size must lie in [1, {len(ids)}]")
    rng = _stream(seed, 2)
    return frozenset(ids[i] for i in rng.choice(len(ids), size=size, replace=False))


def write_ids(ids: Iterable[str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in sorted(ids):
            fh.write(c + "\n")
