"""Frequent and closed sequence pattern mining.

The miner is a depth-first search over a vertical representation: each
pattern carries an id-list of ``(trace, end position)`` pairs, where the end
position is the earliest point at which the pattern can be completed in that
trace. Extending the pattern by a label needs only the next occurrence of
that label after the end position, found by bisection in the label's
position list. Support is counted exactly, with rationals.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import LabelSequence
from .errors import ConfigError, DataError, ResourceLimitError, TruncatedPatternSetError
from .matcher import is_subsequence

DEFAULT_MAX_FRONTIER = 100_000


def as_min_support(phi_s) -> Fraction:
    """Coerce a minimum support to an exact rational in (0, 1].

    Floats are read through their shortest repr, so ``0.6`` becomes ``3/5``
    rather than the nearest binary fraction.
    """
    if isinstance(phi_s, float):
        value = Fraction(repr(phi_s))
    elif isinstance(phi_s, (Rational, str)):
        value = Fraction(phi_s)
    else:
        raise ConfigError(f"minimum support must be a number, got {phi_s!r}")
    if not 0 < value <= 1:
        raise ConfigError(f"minimum support must lie in (0, 1], got {value}")
    return value


def min_support_count(phi_s, n: int) -> int:
    """Smallest trace count whose support over ``n`` traces reaches ``phi_s``."""
    phi = as_min_support(phi_s)
    return max(1, math.ceil(phi * n))


@dataclass(frozen=True, slots=True)
class SequencePattern:
    labels: tuple[str, ...]
    match_count: int
    source_size: int

    def __post_init__(self):
        if not self.labels:
            raise ValueError("a sequence pattern must be non-empty")

    @property
    def support(self) -> Fraction:
        return Fraction(self.match_count, self.source_size)

    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return f"<{','.join(self.labels)}>@{self.match_count}/{self.source_size}"


def canonical_key(p: SequencePattern):
    return (len(p.labels), p.labels)


@dataclass(frozen=True)
class PatternSet:
    patterns: tuple[SequencePattern, ...]
    phi_s: Fraction
    source_size: int
    truncated: bool = False

    def __iter__(self):
        return iter(self.patterns)

    def __len__(self):
        return len(self.patterns)

    def as_dict(self) -> dict[tuple[str, ...], SequencePattern]:
        return {p.labels: p for p in self.patterns}


@dataclass(frozen=True)
class PatternBundle:
    sp1: tuple[SequencePattern, ...]
    sp2: tuple[SequencePattern, ...]
    sp_clo: tuple[SequencePattern, ...]
    phi_s: Fraction | None = None
    source_size: int | None = None

    def counts(self) -> tuple[int, int, int]:
        return (len(self.sp1), len(self.sp2), len(self.sp_clo))


def _labels_of(seq) -> tuple[str, ...]:
    return seq.labels if isinstance(seq, LabelSequence) else tuple(seq)


def support(pattern: Sequence[str], collection: Sequence) -> Fraction:
    """Fraction of sequences in ``collection`` that contain ``pattern``."""
    if len(collection) == 0:
        raise DataError("support is undefined over an empty collection")
    hits = sum(1 for s in collection if is_subsequence(pattern, _labels_of(s)))
    return Fraction(hits, len(collection))


def mine_frequent(
    collection: Sequence,
    phi_s,
    max_pattern_length: int | None = None,
    max_frontier: int | None = DEFAULT_MAX_FRONTIER,
    truncate: bool = False,
) -> PatternSet:
    """Mine every sequence pattern with support at least ``phi_s``.

    Parameters
    ----------
    collection : sequence of LabelSequence or label sequences
    phi_s : minimum support, coerced by :func:`as_min_support`
    max_pattern_length : longest pattern to emit; None for no bound
    max_frontier : cap on patterns held by the search (emitted plus
        pending); None for no bound
    truncate : when the frontier cap is hit, stop and flag the result as
        truncated instead of raising :class:`ResourceLimitError`

    Returns
    -------
    PatternSet
        Patterns in canonical order (length, then labels). ``truncated`` is
        set when a limit cut off at least one frequent pattern.
    """
    phi = as_min_support(phi_s)
    seqs = [_labels_of(s) for s in collection]
    n = len(seqs)
    if n == 0:
        raise DataError("cannot mine an empty collection")
    min_count = min_support_count(phi, n)
    if max_pattern_length is not None and max_pattern_length < 1:
        raise ConfigError("max_pattern_length must be >= 1")

    # per trace: label -> sorted positions
    positions: list[dict[str, list[int]]] = []
    doc_freq: dict[str, int] = {}
    for seq in seqs:
        pos: dict[str, list[int]] = {}
        for i, x in enumerate(seq):
            pos.setdefault(x, []).append(i)
        positions.append(pos)
        for x in pos:
            doc_freq[x] = doc_freq.get(x, 0) + 1
    items = sorted(x for x, c in doc_freq.items() if c >= min_count)
    last = [{x: pl[-1] for x, pl in pos.items() if x in doc_freq and doc_freq[x] >= min_count}
            for pos in positions]

    found: list[SequencePattern] = []
    truncated = False
    # stack entries: (labels, id-list of (trace index, end position))
    stack: list[tuple[tuple[str, ...], list[tuple[int, int]]]] = []
    for x in reversed(items):
        stack.append(((x,), [(t, positions[t][x][0]) for t in range(n) if x in positions[t]]))

    def over_budget():
        return max_frontier is not None and len(found) + len(stack) > max_frontier

    while stack:
        if over_budget():
            if not truncate:
                raise ResourceLimitError(
                    f"frontier exceeded {max_frontier} patterns; raise max_frontier, "
                    "bound max_pattern_length, or increase phi_s"
                )
            truncated = True
            room = max(0, max_frontier - len(found))
            del stack[: len(stack) - room]
            if not stack:
                break
        labels, idlist = stack.pop()
        found.append(SequencePattern(labels, len(idlist), n))
        at_cap = max_pattern_length is not None and len(labels) >= max_pattern_length
        children = []
        for x in items:
            ext = []
            misses_left = len(idlist) - min_count
            for t, p in idlist:
                if last[t].get(x, -1) > p:
                    pl = positions[t][x]
                    ext.append((t, pl[bisect_right(pl, p)]))
                else:
                    misses_left -= 1
                    if misses_left < 0:
                        break
            if len(ext) >= min_count:
                if at_cap:
                    truncated = True
                    break
                children.append((labels + (x,), ext))
        stack.extend(reversed(children))

    found.sort(key=canonical_key)
    return PatternSet(tuple(found), phi, n, truncated)


def extract_closed(ps: PatternSet) -> tuple[SequencePattern, ...]:
    """Patterns of ``ps`` whose every proper supersequence in ``ps`` has lower support.

    Only one-label-longer supersequences need checking: a longer one with
    equal support forces an intermediate pattern of equal support as well.
    """
    if ps.truncated:
        raise TruncatedPatternSetError("pattern set was truncated; closedness cannot be certified")
    count = {p.labels: p.match_count for p in ps}
    absorbed: set[tuple[str, ...]] = set()
    for p in ps:
        labels = p.labels
        if len(labels) < 2:
            continue
        for i in range(len(labels)):
            sub = labels[:i] + labels[i + 1:]
            if count.get(sub) == p.match_count:
                absorbed.add(sub)
    return tuple(p for p in ps if p.labels not in absorbed)


def select_bundle(ps: PatternSet) -> PatternBundle:
    sp1 = tuple(p for p in ps if len(p) == 1)
    sp2 = tuple(p for p in ps if len(p) == 2)
    return PatternBundle(sp1, sp2, extract_closed(ps), ps.phi_s, ps.source_size)


# -- pattern files -----------------------------------------------------------

BUNDLE_FILES = {"sp1": "sp1.jsonl", "sp2": "sp2.jsonl", "sp_clo": "sp_clo.jsonl"}


def pattern_to_json(p: SequencePattern) -> str:
    return json.dumps(
        {"labels": list(p.labels), "support": f"{p.match_count}/{p.source_size}", "count": p.match_count},
        ensure_ascii=False,
    )


def pattern_from_json(line: str) -> SequencePattern:
    obj = json.loads(line)
    count = int(obj["count"])
    supp = str(obj["support"])
    num, _, den = supp.partition("/")
    if den and int(num) == count:
        n = int(den)
    else:
        n = Fraction(count) / Fraction(supp)
        if n.denominator != 1:
            raise ValueError(f"support {supp} is inconsistent with count {count}")
        n = int(n)
    return SequencePattern(tuple(obj["labels"]), count, n)


def write_patterns(patterns: Iterable[SequencePattern], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in sorted(patterns, key=canonical_key):
            fh.write(pattern_to_json(p) + "\n")


def read_patterns(path) -> tuple[SequencePattern, ...]:
    with open(path, encoding="utf-8") as fh:
        pats = [pattern_from_json(line) for line in fh if line.strip()]
    return tuple(sorted(pats, key=canonical_key))


def write_bundle(bundle: PatternBundle, directory) -> dict[str, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {}
    for key, name in BUNDLE_FILES.items():
        paths[key] = directory / name
        write_patterns(getattr(bundle, key), paths[key])
    meta = {
        "phi_s": None if bundle.phi_s is None else str(bundle.phi_s),
        "source_size": bundle.source_size,
    }
    (directory / "bundle.json").write_text(json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8")
    return paths


def read_bundle(directory) -> PatternBundle:
    directory = Path(directory)
    parts = {key: read_patterns(directory / name) for key, name in BUNDLE_FILES.items()}
    phi_s = source_size = None
    meta_path = directory / "bundle.json"
    if meta_path.exists():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        phi_s = None if meta.get("phi_s") is None else Fraction(meta["phi_s"])
        source_size = meta.get("source_size")
    return PatternBundle(parts["sp1"], parts["sp2"], parts["sp_clo"], phi_s, source_size)
