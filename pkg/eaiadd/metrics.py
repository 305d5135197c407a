# -*- coding: utf-8 -*-
""" Detection metrics (EER, min t-DCF) and the change-magnitude diagnostic.

Convention for every threshold sweep: a trial is accepted as bonafide when
its score is >= the threshold, so

    P_miss(thr) = fraction of bonafide scores <  thr
    P_fa(thr)   = fraction of spoof scores    >= thr

Candidate thresholds are -inf, the midpoints between adjacent distinct
sorted scores, and +inf.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .classes import ValidationError


@dataclass
class ScoreSet:
    """Parallel lists of bundle ids, scores and labels."""
    ids: List[str]
    scores: List[float]
    labels: List[str]

    def __post_init__(self):
        if not len(self.ids) == len(self.scores) == len(self.labels):
            raise ValidationError("score set columns differ in length")
        if not np.all(np.isfinite(np.asarray(self.scores, dtype=float))):
            raise ValidationError("score set contains non-finite scores")

    @classmethod
    def from_arrays(cls, bonafide_scores, spoof_scores):
        bonafide_scores = list(map(float, bonafide_scores))
        spoof_scores = list(map(float, spoof_scores))
        n_b = len(bonafide_scores)
        return cls(["b%d" % i for i in range(n_b)]
                   + ["s%d" % i for i in range(len(spoof_scores))],
                   bonafide_scores + spoof_scores,
                   ["bonafide"] * n_b + ["spoof"] * len(spoof_scores))

    def split(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        labels = np.asarray(self.labels)
        bonafide = scores[labels == "bonafide"]
        spoof = scores[labels == "spoof"]
        if bonafide.size == 0 or spoof.size == 0:
            raise ValidationError(
                "score set needs both classes (bonafide: %d, spoof: %d)"
                % (bonafide.size, spoof.size))
        return bonafide, spoof


@dataclass(frozen=True)
class TdcfParams:
    p_target: float
    p_nontarget: float
    p_spoof: float
    c_miss_asv: float
    c_fa_asv: float
    c_miss_cm: float
    c_fa_cm: float
    p_fa_asv: float
    p_miss_asv: float
    p_miss_spoof_asv: float

    def __post_init__(self):
        priors = (self.p_target, self.p_nontarget, self.p_spoof)
        if min(priors) < 0 or abs(sum(priors) - 1.0) > 1e-9:
            raise ValidationError("t-DCF priors must be >= 0 and sum to 1")
        if min(self.c_miss_asv, self.c_fa_asv,
               self.c_miss_cm, self.c_fa_cm) <= 0:
            raise ValidationError("t-DCF costs must be > 0")
        for rate in (self.p_fa_asv, self.p_miss_asv, self.p_miss_spoof_asv):
            if not 0.0 <= rate <= 1.0:
                raise ValidationError("ASV error rates must be in [0, 1]")

    def constants(self):
        c1 = (self.p_target * (self.c_miss_cm
                               - self.c_miss_asv * self.p_miss_asv)
              - self.p_nontarget * self.c_fa_asv * self.p_fa_asv)
        c2 = self.c_fa_cm * self.p_spoof * (1.0 - self.p_miss_spoof_asv)
        return c1, c2


def candidate_thresholds(bonafide, spoof):
    unique = np.unique(np.concatenate((bonafide, spoof)))
    midpoints = (unique[:-1] + unique[1:]) / 2.0
    return np.concatenate(([-np.inf], midpoints, [np.inf]))


def error_rates(bonafide, spoof, thresholds):
    """(P_miss, P_fa) at every threshold, by counting on sorted scores."""
    bonafide = np.sort(bonafide)
    spoof = np.sort(spoof)
    n_miss = np.searchsorted(bonafide, thresholds, side="left")
    n_fa = spoof.size - np.searchsorted(spoof, thresholds, side="left")
    return n_miss / bonafide.size, n_fa / spoof.size


def _crossing(p_miss, p_fa, thresholds):
    """EER and threshold where P_miss - P_fa changes sign; the lowest
    threshold wins ties."""
    diff = p_miss - p_fa
    exact = np.flatnonzero(diff == 0)
    upper = np.flatnonzero(diff > 0)[0]
    if exact.size and exact[0] < upper:
        i = exact[0]
        return float(p_miss[i]), float(thresholds[i])
    lower = upper - 1
    w = -diff[lower] / (diff[upper] - diff[lower])
    eer = p_miss[lower] + w * (p_miss[upper] - p_miss[lower])
    thr = thresholds[lower] if np.isfinite(thresholds[lower]) \
        else thresholds[upper]
    return float(eer), float(thr)


def compute_eer(scores):
    """Returns (eer, threshold)."""
    bonafide, spoof = scores.split()
    thresholds = candidate_thresholds(bonafide, spoof)
    p_miss, p_fa = error_rates(bonafide, spoof, thresholds)
    eer, thr = _crossing(p_miss, p_fa, thresholds)
    if not np.isfinite(thr):
        # single distinct score: every midpoint is missing
        thr = float(bonafide[0])
    return eer, thr


def compute_min_tdcf(scores, params):
    """Minimum normalized tandem detection cost over the threshold sweep."""
    bonafide, spoof = scores.split()
    c1, c2 = params.constants()
    if c1 < 0 or c2 < 0:
        raise ValidationError("t-DCF constants must be >= 0 (C1=%g, C2=%g)"
                              % (c1, c2))
    if min(c1, c2) == 0:
        raise ValidationError("degenerate t-DCF params: min(C1, C2) = 0")
    thresholds = candidate_thresholds(bonafide, spoof)
    p_miss, p_fa = error_rates(bonafide, spoof, thresholds)
    tdcf_norm = (c1 * p_miss + c2 * p_fa) / min(c1, c2)
    return float(np.min(tdcf_norm))


def change_magnitudes(frames):
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2 or frames.shape[0] < 2:
        raise ValidationError("change magnitudes need T >= 2 frames")
    return np.linalg.norm(np.diff(frames, axis=0), axis=1)


def change_magnitude_curve(frames):
    """L2 change magnitudes between consecutive frames, min-max scaled to
    [0, 1]; a constant curve maps to all zeros."""
    m = change_magnitudes(frames)
    span = m.max() - m.min()
    if span == 0:
        return np.zeros_like(m)
    return (m - m.min()) / span


def pearson(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValidationError("pearson needs two equal-length vectors, n >= 2")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = np.dot(xc, xc)
    syy = np.dot(yc, yc)
    if sxx == 0 or syy == 0:
        raise ValidationError("undefined correlation: constant input")
    r = np.dot(xc, yc) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def bundle_correlation(bundle):
    """Pearson r between emotion and acoustic change curves, or None when
    either curve is constant."""
    emo = change_magnitude_curve(bundle.emo_frames)
    acu = change_magnitude_curve(bundle.acu_frames)
    try:
        return pearson(emo, acu)
    except ValidationError:
        return None


@dataclass
class LabelStats:
    n: int
    n_skipped: int
    mean: Optional[float]
    std: Optional[float]

    def to_dict(self):
        return {"n": self.n, "n_skipped": self.n_skipped,
                "mean": self.mean, "std": self.std}


def corpus_inconsistency_report(bundles):
    """Per-label mean / std of emotion-acoustic change correlation.
    A label with no usable bundle maps to None."""
    per_label = {"bonafide": [], "spoof": []}
    skipped = {"bonafide": 0, "spoof": 0}
    for bundle in bundles:
        r = bundle_correlation(bundle)
        if r is None:
            skipped[bundle.label] += 1
        else:
            per_label[bundle.label].append(r)
    report = {}
    for label, values in per_label.items():
        if not values and not skipped[label]:
            report[label] = None
            continue
        values = np.asarray(values)
        report[label] = LabelStats(
            n=int(values.size), n_skipped=skipped[label],
            mean=float(values.mean()) if values.size else None,
            std=float(values.std()) if values.size else None)
    return report

