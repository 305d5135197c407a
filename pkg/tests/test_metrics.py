import math

import numpy as np
import pytest

from eaiadd.classes import ValidationError
from eaiadd.feature_store import FeatureBundle
from eaiadd.metrics import (ScoreSet, TdcfParams, change_magnitude_curve,
                            compute_eer, compute_min_tdcf,
                            corpus_inconsistency_report, pearson)
from eaiadd.synthgen import SynthConfig, gen_bundles

from conftest import random_bundle

ASVSPOOF_2019 = dict(p_target=0.9405, p_nontarget=0.0095, p_spoof=0.05,
                     c_miss_asv=1, c_fa_asv=10, c_miss_cm=1, c_fa_cm=10,
                     p_fa_asv=0.01, p_miss_asv=0.01, p_miss_spoof_asv=0.3)


def sweep_oracle(bonafide, spoof):
    """EER by direct counting at every candidate threshold."""
    values = sorted(set(bonafide) | set(spoof))
    thresholds = [-math.inf] + [(a + b) / 2 for a, b in
                                zip(values, values[1:])] + [math.inf]
    p_miss = [np.sum(bonafide < t) / bonafide.size for t in thresholds]
    p_fa = [np.sum(spoof >= t) / spoof.size for t in thresholds]
    for i, t in enumerate(thresholds):
        diff = p_miss[i] - p_fa[i]
        if diff == 0:
            return p_miss[i], t
        if diff > 0:
            d_lo = p_miss[i - 1] - p_fa[i - 1]
            w = -d_lo / (diff - d_lo)
            eer = p_miss[i - 1] + w * (p_miss[i] - p_miss[i - 1])
            lower = thresholds[i - 1]
            thr = lower if math.isfinite(lower) else t
            return eer, (thr if math.isfinite(thr) else bonafide[0])
    raise AssertionError("no crossing")


def test_eer_example():
    scores = ScoreSet.from_arrays([0.8, 0.4], [0.6, 0.2])
    eer, thr = compute_eer(scores)
    assert eer == 0.5
    assert thr == pytest.approx(0.5)


def test_eer_perfect_separation():
    eer, thr = compute_eer(ScoreSet.from_arrays([3.0, 4.0], [1.0, 2.0]))
    assert eer == 0.0
    assert 2.0 < thr < 3.0


def test_eer_fully_inverted():
    eer, _ = compute_eer(ScoreSet.from_arrays([1.0, 2.0], [3.0, 4.0]))
    assert eer == 1.0


def test_eer_single_distinct_score():
    eer, thr = compute_eer(ScoreSet.from_arrays([1.0, 1.0], [1.0]))
    assert eer == 0.5
    assert thr == 1.0


def test_eer_needs_both_classes():
    with pytest.raises(ValidationError, match="both classes"):
        compute_eer(ScoreSet.from_arrays([0.1, 0.2], []))


def test_score_set_rejects_non_finite():
    with pytest.raises(ValidationError):
        ScoreSet.from_arrays([np.nan], [0.0])


def test_eer_matches_exhaustive_sweep():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n_b, n_s = rng.integers(1, 50, size=2)
        # coarse rounding produces ties within and across classes
        bonafide = np.round(rng.normal(0.5, 1, size=n_b), 1)
        spoof = np.round(rng.normal(0, 1, size=n_s), 1)
        eer, thr = compute_eer(ScoreSet.from_arrays(bonafide, spoof))
        expected_eer, expected_thr = sweep_oracle(bonafide, spoof)
        assert eer == expected_eer
        assert thr == expected_thr
        assert 0.0 <= eer <= 1.0


def test_eer_invariant_under_monotone_transform():
    rng = np.random.default_rng(1)
    bonafide, spoof = rng.normal(1, 1, 40), rng.normal(0, 1, 30)
    eer, _ = compute_eer(ScoreSet.from_arrays(bonafide, spoof))
    for f in (np.exp, lambda x: 3 * x + 1, np.arctan):
        transformed = ScoreSet.from_arrays(f(bonafide), f(spoof))
        assert compute_eer(transformed)[0] == eer


def test_tdcf_constants():
    c1, c2 = TdcfParams(**ASVSPOOF_2019).constants()
    assert c1 == pytest.approx(0.9405 * 0.99 - 0.0095 * 10 * 0.01)
    assert c2 == pytest.approx(10 * 0.05 * 0.7)


@pytest.mark.parametrize("change", [
    {"p_target": 0.5},
    {"c_fa_cm": 0},
    {"p_fa_asv": 1.5},
])
def test_tdcf_params_invariants(change):
    with pytest.raises(ValidationError):
        TdcfParams(**dict(ASVSPOOF_2019, **change))


def test_min_tdcf_perfect_separation():
    scores = ScoreSet.from_arrays([2.0, 3.0], [0.0, 1.0])
    assert compute_min_tdcf(scores, TdcfParams(**ASVSPOOF_2019)) == 0.0


def test_min_tdcf_matches_enumeration():
    bonafide = np.array([0.9, 0.35, 0.6])
    spoof = np.array([0.4, 0.1, 0.7])
    params = TdcfParams(**ASVSPOOF_2019)
    c1, c2 = params.constants()
    best = min((c1 * np.mean(bonafide < t) + c2 * np.mean(spoof >= t))
               / min(c1, c2)
               for t in list(bonafide) + list(spoof) + [np.inf])
    scores = ScoreSet.from_arrays(bonafide, spoof)
    assert compute_min_tdcf(scores, params) == pytest.approx(best, abs=1e-12)


def test_min_tdcf_with_equal_constants_is_min_total_error():
    params = TdcfParams(p_target=0.5, p_nontarget=0.0, p_spoof=0.5,
                        c_miss_asv=1, c_fa_asv=1, c_miss_cm=1, c_fa_cm=1,
                        p_fa_asv=0.0, p_miss_asv=0.0, p_miss_spoof_asv=0.0)
    assert params.constants() == (0.5, 0.5)
    rng = np.random.default_rng(2)
    bonafide, spoof = rng.normal(1, 1, 25), rng.normal(0, 1, 25)
    best = min(np.mean(bonafide < t) + np.mean(spoof >= t)
               for t in list(bonafide) + list(spoof) + [np.inf])
    scores = ScoreSet.from_arrays(bonafide, spoof)
    assert compute_min_tdcf(scores, params) == pytest.approx(best)


def test_min_tdcf_degenerate_params():
    params = TdcfParams(**dict(ASVSPOOF_2019, p_miss_spoof_asv=1.0))
    with pytest.raises(ValidationError, match="degenerate"):
        compute_min_tdcf(ScoreSet.from_arrays([1.0], [0.0]), params)


def test_change_magnitude_curve():
    curve = change_magnitude_curve([[0], [1], [3], [4]])
    np.testing.assert_allclose(curve, [0, 1, 0])
    assert np.all(change_magnitude_curve(np.ones((5, 3))) == 0)
    curve = change_magnitude_curve(np.random.default_rng(0).normal(
        size=(10, 3)))
    assert curve.min() == 0.0 and curve.max() == 1.0
    with pytest.raises(ValidationError):
        change_magnitude_curve([[1.0, 2.0]])


def test_pearson():
    x = np.array([1.0, 2.0, 3.0])
    assert pearson(x, x) == pytest.approx(1.0)
    assert pearson(x, -x) == pytest.approx(-1.0)
    y = np.array([1.0, 2.0, 4.0])
    assert pearson(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1],
                                          abs=1e-12)
    assert pearson(x, y) == pytest.approx(3 / math.sqrt(2 * 42 / 9))


def test_pearson_affine_invariance():
    rng = np.random.default_rng(4)
    x, y = rng.normal(size=20), rng.normal(size=20)
    r = pearson(x, y)
    assert pearson(2.5 * x - 7, y) == pytest.approx(r, abs=1e-12)
    assert pearson(x, 0.1 * y + 3) == pytest.approx(r, abs=1e-12)


def test_pearson_constant_input():
    with pytest.raises(ValidationError, match="undefined correlation"):
        pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


def test_report_without_spoof():
    report = corpus_inconsistency_report([random_bundle(i) for i in range(3)])
    assert report["spoof"] is None
    assert report["bonafide"].n == 3


def test_report_single_bundle_has_zero_spread():
    report = corpus_inconsistency_report([random_bundle(0, label="spoof")])
    assert report["spoof"].std == 0.0
    assert report["spoof"].to_dict()["n"] == 1


def test_report_counts_degenerate_bundles():
    flat = FeatureBundle("flat", np.ones((4, 2)), np.ones(2), np.ones((4, 2)),
                        "bonafide")
    report = corpus_inconsistency_report([flat, random_bundle(1)])
    assert report["bonafide"].n == 1
    assert report["bonafide"].n_skipped == 1


def test_synthetic_bonafide_streams_are_more_consistent():
    bundles = gen_bundles(SynthConfig(seed=1), 20, 20)
    report = corpus_inconsistency_report(bundles)
    assert report["bonafide"].mean - report["spoof"].mean >= 0.2
