"""Slow, obviously-correct reference implementations used only by the tests."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np


def embeds(pattern, seq) -> bool:
    """Dynamic-programming subsequence test (independent of the greedy scan)."""
    m = len(pattern)
    # reach[j]: pattern[:j] embeds into the prefix scanned so far
    reach = [True] + [False] * m
    for x in seq:
        for j in range(m, 0, -1):
            if reach[j - 1] and pattern[j - 1] == x:
                reach[j] = True
    return reach[m]


def all_subsequences(seq) -> set[tuple]:
    out = set()
    for r in range(1, len(seq) + 1):
        for idx in combinations(range(len(seq)), r):
            out.add(tuple(seq[i] for i in idx))
    return out


def brute_force_frequent(collection, phi_s) -> dict[tuple, Fraction]:
    """Every distinct subsequence of every trace, kept when its support reaches ``phi_s``."""
    n = len(collection)
    counts: dict[tuple, int] = {}
    for seq in collection:
        for sub in all_subsequences(tuple(seq)):
            counts[sub] = counts.get(sub, 0) + 1
    phi = Fraction(phi_s)
    return {p: Fraction(c, n) for p, c in counts.items() if Fraction(c, n) >= phi}


def brute_force_closed(frequent: dict[tuple, Fraction]) -> set[tuple]:
    """Closed patterns by pairwise comparison against every frequent pattern."""
    closed = set()
    for p, sp in frequent.items():
        if not any(q != p and sq == sp and embeds(p, q) for q, sq in frequent.items()):
            closed.add(p)
    return closed


def naive_scores(seq, sp1, sp2, sp_clo) -> tuple[int, int, int]:
    return tuple(sum(1 for p in group if embeds(p, seq)) for group in (sp1, sp2, sp_clo))


def full_grid(triples: np.ndarray):
    """Every threshold point of the full search grid, with max+1 upper bounds."""
    m = triples.max(axis=0) if len(triples) else np.zeros(3, int)
    for a in range(1, int(m[0]) + 2):
        for b in range(0, int(m[1]) + 2):
            for c in range(0, int(m[2]) + 2):
                yield a, b, c


def exhaustive_best_objective(triples: np.ndarray, in_p: np.ndarray, n_p: int, floor=Fraction(4, 5)):
    """Max of recall**2/|C| over the full grid by direct evaluation of every point.

    Returns ``(best objective, set of optimal points)``; objective None when
    no point is feasible.
    """
    best, points = None, set()
    s1, s2, s3 = triples[:, 0], triples[:, 1], triples[:, 2]
    for a in range(1, int(s1.max()) + 2):
        ma = s1 >= a
        for b in range(0, int(s2.max()) + 2):
            mab = ma & (s2 >= b)
            if not mab.any():
                continue
            for c in range(0, int(s3.max()) + 2):
                mask = mab & (s3 >= c)
                size = int(mask.sum())
                if size == 0:
                    continue
                recall = Fraction(int((mask & in_p).sum()), n_p)
                if recall < floor:
                    continue
                obj = recall * recall / size
                if best is None or obj > best:
                    best, points = obj, {(a, b, c)}
                elif obj == best:
                    points.add((a, b, c))
    return best, points


def grid_f1_max(triples: np.ndarray, in_truth: np.ndarray, n_truth: int) -> float:
    """Best F1 over the full threshold grid.

    For each (phi1, phi2) the passing cases are sorted by their closed score,
    so one cumulative sum yields |C| and |C & truth| for every phi_clo.
    """
    best = 0.0
    s1, s2, s3 = triples[:, 0], triples[:, 1], triples[:, 2]
    for a in range(1, int(s1.max()) + 2):
        ma = s1 >= a
        if not ma.any():
            break
        for b in range(0, int(s2.max()) + 2):
            mask = ma & (s2 >= b)
            if not mask.any():
                break
            v = np.sort(s3[mask])[::-1]
            t = in_truth[mask][np.argsort(s3[mask], kind="stable")[::-1]]
            size = np.arange(1, len(v) + 1)
            inter = np.cumsum(t)
            # only prefixes ending at a value boundary are reachable clusters
            boundary = np.r_[v[1:] != v[:-1], True]
            f1 = 2 * inter[boundary] / (size[boundary] + n_truth)
            best = max(best, float(f1.max()))
    return best
