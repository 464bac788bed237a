"""Subsequence matching and per-case score triples.

A trace's score triple counts how many patterns of each bundle subset
(length-1, length-2, closed) it contains as a subsequence. Patterns are
indexed by their first label and pre-filtered by label multiplicities, so
traces sharing no label with the bundle cost one pass over their labels.
"""

from __future__ import annotations

import csv
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .corpus import EventLog, Labeler, LabelSequence, simplify

if TYPE_CHECKING:
    from .fsp import PatternBundle


def is_subsequence(pattern: Sequence[str], seq) -> bool:
    """True iff ``pattern`` embeds into ``seq`` at strictly increasing positions.

    ``seq`` may be a :class:`LabelSequence` or any label sequence. The empty
    pattern is rejected: no sequence pattern is empty.
    """
    if not pattern:
        raise ValueError("pattern must be non-empty")
    labels = seq.labels if isinstance(seq, LabelSequence) else seq
    it = iter(labels)
    # `in` on an iterator consumes up to and including the match
    return all(label in it for label in pattern)


@dataclass(frozen=True, slots=True)
class ScoreTriple:
    case_id: str
    s1: int
    s2: int
    s_clo: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.s1, self.s2, self.s_clo)


class BundleMatcher:
    """Pre-indexed bundle for scoring many traces."""

    def __init__(self, bundle: PatternBundle):
        self.sp1_labels = frozenset(p.labels[0] for p in bundle.sp1)
        groups = (bundle.sp2, bundle.sp_clo)
        self.alphabet = set(self.sp1_labels)
        self._index: list[dict[str, list[tuple[tuple[str, ...], tuple[tuple[str, int], ...]]]]] = []
        for group in groups:
            by_first: dict[str, list] = {}
            for p in group:
                need = tuple(Counter(p.labels).items())
                by_first.setdefault(p.labels[0], []).append((p.labels, need))
                self.alphabet.update(p.labels)
            self._index.append(by_first)
        self.alphabet = frozenset(self.alphabet)

    def score(self, labels: Sequence[str]) -> tuple[int, int, int]:
        alphabet = self.alphabet
        relevant = [x for x in labels if x in alphabet]
        if not relevant:
            return (0, 0, 0)
        counts = Counter(relevant)
        s1 = sum(1 for x in counts if x in self.sp1_labels)
        out = [s1]
        for by_first in self._index:
            hits = 0
            for first in counts:
                for pat, need in by_first.get(first, ()):
                    for label, mult in need:
                        if counts.get(label, 0) < mult:
                            break
                    else:
                        it = iter(relevant)
                        if all(x in it for x in pat):
                            hits += 1
            out.append(hits)
        return (out[0], out[1], out[2])


@lru_cache(maxsize=8)
def _matcher_for(bundle: PatternBundle) -> BundleMatcher:
    return BundleMatcher(bundle)


def score_trace(seq: LabelSequence | Sequence[str], bundle: PatternBundle) -> ScoreTriple:
    """Score one trace; a bare label sequence gets an empty case id."""
    if isinstance(seq, LabelSequence):
        case_id, labels = seq.case_id, seq.labels
    else:
        case_id, labels = "", tuple(seq)
    s1, s2, s_clo = _matcher_for(bundle).score(labels)
    return ScoreTriple(case_id, s1, s2, s_clo)


_worker_matcher: BundleMatcher | None = None


def _init_worker(bundle):
    global _worker_matcher
    _worker_matcher = BundleMatcher(bundle)


def _score_chunk(chunk):
    return [_worker_matcher.score(labels) for labels in chunk]


def score_log(
    log: EventLog | Iterable[LabelSequence],
    labeler: Labeler | None,
    bundle: PatternBundle,
    workers: int = 1,
) -> dict[str, ScoreTriple]:
    """Score every case of ``log`` against ``bundle``.

    ``log`` is an :class:`EventLog` (labeled with ``labeler``, or the log's
    own labeler when None) or an iterable of already-labeled sequences. The
    returned dict is ordered by case id. ``workers > 1`` spreads the work
    over processes; the result does not depend on it.
    """
    if isinstance(log, EventLog):
        labeler = labeler or log.labeler
        seqs = [simplify(log[c], labeler) for c in sorted(log.traces)]
    else:
        seqs = sorted(log, key=lambda s: s.case_id)

    if workers > 1 and len(seqs) >= 20_000:
        size = -(-len(seqs) // (workers * 4))
        chunks = [[s.labels for s in seqs[i:i + size]] for i in range(0, len(seqs), size)]
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(bundle,)) as ex:
            triples = [t for part in ex.map(_score_chunk, chunks) for t in part]
    else:
        m = BundleMatcher(bundle)
        triples = [m.score(s.labels) for s in seqs]
    return {s.case_id: ScoreTriple(s.case_id, *t) for s, t in zip(seqs, triples)}


def default_workers() -> int:
    return os.cpu_count() or 1


def write_scores(scores: Mapping[str, ScoreTriple], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("case_id", "s1", "s2", "s_clo"))
        for case_id in sorted(scores):
            t = scores[case_id]
            w.writerow((case_id, t.s1, t.s2, t.s_clo))


def read_scores(path) -> dict[str, ScoreTriple]:
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != ["case_id", "s1", "s2", "s_clo"]:
            raise ValueError(f"unexpected score dump header {header}")
        return {row[0]: ScoreTriple(row[0], int(row[1]), int(row[2]), int(row[3])) for row in r if row}
