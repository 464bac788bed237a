"""Threshold selection and cluster extraction.

A case joins the cluster when each component of its score triple reaches
the matching threshold. Thresholds are chosen to maximize
``est_recall**2 / |C|`` subject to ``est_recall >= recall_floor``, where the
estimated recall is measured on the expert sample.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigError, DataError, NoFeasibleThresholds
from .matcher import ScoreTriple

DEFAULT_RECALL_FLOOR = Fraction(4, 5)


@dataclass(frozen=True)
class SampleSet:
    all_ids: frozenset[str]
    train_ids: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "all_ids", frozenset(self.all_ids))
        object.__setattr__(self, "train_ids", frozenset(self.train_ids))
        if not self.train_ids:
            raise ConfigError("training sample must contain at least one case")
        if not self.train_ids <= self.all_ids:
            raise ConfigError("training ids must be drawn from the sample")

    @property
    def k(self) -> int:
        return len(self.train_ids)


@dataclass(frozen=True, order=True)
class Thresholds:
    phi1: int = 1
    phi2: int = 0
    phi_clo: int = 0

    def __post_init__(self):
        if self.phi1 < 1 or self.phi2 < 0 or self.phi_clo < 0:
            raise ConfigError(f"invalid thresholds {self.as_tuple()}: need phi1 >= 1, phi2 >= 0, phi_clo >= 0")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.phi1, self.phi2, self.phi_clo)


@dataclass(frozen=True)
class Cluster:
    case_ids: frozenset[str]
    thresholds: Thresholds
    est_recall: Fraction

    def __len__(self):
        return len(self.case_ids)

    @property
    def objective(self) -> Fraction | None:
        """``est_recall**2 / |C|``; None for an empty cluster."""
        return self.est_recall ** 2 / len(self.case_ids) if self.case_ids else None


def _triple(s) -> tuple[int, int, int]:
    return s.as_tuple() if isinstance(s, ScoreTriple) else tuple(s)


def apply_thresholds(scores: Mapping[str, ScoreTriple], t: Thresholds) -> frozenset[str]:
    out = []
    for case_id, s in scores.items():
        s1, s2, s3 = _triple(s)
        if s1 >= t.phi1 and s2 >= t.phi2 and s3 >= t.phi_clo:
            out.append(case_id)
    return frozenset(out)


def estimate_recall(cluster: Iterable[str], sample: SampleSet | Iterable[str]) -> Fraction:
    """Share of the sample captured by ``cluster``, as an exact rational."""
    p = sample.all_ids if isinstance(sample, SampleSet) else frozenset(sample)
    if not p:
        raise DataError("estimated recall needs a non-empty sample")
    cluster = cluster if isinstance(cluster, (set, frozenset)) else set(cluster)
    return Fraction(len(p & cluster), len(p))


def _better(a, b) -> bool:
    """Total order on candidate points ``(m, c, thresholds)``: objective m**2/c, then thresholds."""
    (ma, ca, ta), (mb, cb, tb) = a, b
    lhs, rhs = ma * ma * cb, mb * mb * ca
    if lhs != rhs:
        return lhs > rhs
    return ta > tb


def search_thresholds(
    scores: Mapping[str, ScoreTriple],
    sample: SampleSet,
    recall_floor=DEFAULT_RECALL_FLOOR,
) -> tuple[Thresholds, Cluster]:
    """Pick the threshold triple maximizing ``est_recall**2 / |C|``.

    Only points with ``est_recall >= recall_floor`` and a non-empty cluster
    compete. Ties go to the lexicographically largest ``(phi1, phi2,
    phi_clo)``. The result equals an exhaustive scan of
    ``phi1 in 1..max(s1)+1``, ``phi2 in 0..max(s2)+1``,
    ``phi_clo in 0..max(s_clo)+1``: the cluster only changes at observed
    score values, and the largest threshold of every constant stretch is an
    observed value, so scanning observed values loses neither the optimum
    nor the tie-break.

    Raises
    ------
    NoFeasibleThresholds
        When no point meets the floor. ``exc.best`` is the non-empty-cluster
        point of highest estimated recall (then objective), or ``(1, 0, 0)``
        when every cluster is empty.
    """
    floor = Fraction(repr(recall_floor)) if isinstance(recall_floor, float) else Fraction(recall_floor)
    if not 0 <= floor <= 1:
        raise ConfigError(f"recall floor must lie in [0, 1], got {floor}")
    p_ids = sample.all_ids
    n_p = len(p_ids)
    if n_p == 0:
        raise DataError("sample is empty")

    ids = list(scores)
    trip = np.array([_triple(scores[c]) for c in ids], dtype=np.int64).reshape(-1, 3)
    in_p = np.fromiter((c in p_ids for c in ids), dtype=bool, count=len(ids))

    c1 = np.unique(trip[:, 0][trip[:, 0] >= 1])
    c2 = np.unique(trip[:, 1])
    c3 = np.unique(trip[:, 2])

    # largest candidate index each case still passes, per axis (-1: none)
    i1 = np.searchsorted(c1, trip[:, 0], side="right") - 1
    i2 = np.searchsorted(c2, trip[:, 1], side="right") - 1
    i3 = np.searchsorted(c3, trip[:, 2], side="right") - 1

    # feasibility: m / n_p >= floor  <=>  m * den >= num * n_p
    need = floor.numerator * n_p
    den = floor.denominator

    best = None  # (m, c, thresholds tuple)
    best_infeasible = None  # (m, objective key..., thresholds)
    for j1 in range(len(c1) - 1, -1, -1):
        sel = i1 >= j1
        if not sel.any():
            continue
        shape = (len(c2), len(c3))
        flat = i2[sel] * len(c3) + i3[sel]
        size = np.bincount(flat, minlength=shape[0] * shape[1]).reshape(shape)
        hit = np.bincount(flat[in_p[sel]], minlength=shape[0] * shape[1]).reshape(shape)
        # reverse cumulative sums: count of cases with index >= (j2, j3)
        size = size[::-1, ::-1].cumsum(0).cumsum(1)[::-1, ::-1]
        hit = hit[::-1, ::-1].cumsum(0).cumsum(1)[::-1, ::-1]
        nonempty = size > 0
        feasible = nonempty & (hit * den >= need)
        phi1 = int(c1[j1])

        if feasible.any():
            obj = np.where(feasible, hit.astype(float) ** 2 / np.maximum(size, 1), -1.0)
            top = obj.max()
            for j2, j3 in zip(*np.nonzero(obj >= top * (1 - 1e-9))):
                cand = (int(hit[j2, j3]), int(size[j2, j3]), (phi1, int(c2[j2]), int(c3[j3])))
                if best is None or _better(cand, best):
                    best = cand
        elif best is None and nonempty.any():
            m = np.where(nonempty, hit, -1)
            top = m.max()
            for j2, j3 in zip(*np.nonzero(m == top)):
                cand = (int(hit[j2, j3]), int(size[j2, j3]), (phi1, int(c2[j2]), int(c3[j3])))
                if best_infeasible is None or cand[0] > best_infeasible[0] or (
                    cand[0] == best_infeasible[0] and _better(cand, best_infeasible)
                ):
                    best_infeasible = cand

    if best is None:
        if best_infeasible is None:
            t = Thresholds(1, 0, 0)
        else:
            t = Thresholds(*best_infeasible[2])
        members = apply_thresholds(scores, t)
        diag = Cluster(members, t, estimate_recall(members, sample))
        raise NoFeasibleThresholds(
            f"no thresholds reach estimated recall {floor} (best: {t.as_tuple()} "
            f"with recall {diag.est_recall}, cluster size {len(members)})",
            best=diag,
        )

    t = Thresholds(*best[2])
    members = apply_thresholds(scores, t)
    return t, Cluster(members, t, Fraction(best[0], n_p))


def write_cluster(cluster: Cluster, path) -> None:
    """Write a JSON header line followed by one case id per line."""
    t = cluster.thresholds
    header = {
        "phi1": t.phi1,
        "phi2": t.phi2,
        "phi_clo": t.phi_clo,
        "est_recall": f"{cluster.est_recall.numerator}/{cluster.est_recall.denominator}",
        "cluster_size": len(cluster.case_ids),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for case_id in sorted(cluster.case_ids):
            fh.write(case_id + "\n")


def read_cluster(path) -> Cluster:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        ids = frozenset(line.strip() for line in fh if line.strip())
    t = Thresholds(header["phi1"], header["phi2"], header["phi_clo"])
    return Cluster(ids, t, Fraction(header["est_recall"]))
