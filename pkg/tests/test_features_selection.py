"""Feature selection: both modes, Mann-Whitney oracle, BH null behavior."""

import numpy as np
import pytest
import scipy.stats

from homevitals.errors import LabelMissing
from homevitals.features import (
    FeatureMatrix,
    FeatureVector,
    benjamini_hochberg,
    mann_whitney_u,
    select_features,
)


def labeled_matrix(X, y, subjects=None):
    names = tuple(f"f{i}" for i in range(X.shape[1]))
    rows = [
        FeatureVector(subjects[i] if subjects else f"S{i % 5}", str(i), names, X[i])
        for i in range(X.shape[0])
    ]
    return FeatureMatrix(rows, labels=y)


class TestMannWhitney:
    def test_matches_scipy_asymptotic(self, rng):
        for _ in range(40):
            n1 = int(rng.integers(5, 30))
            n2 = int(rng.integers(5, 30))
            a = np.round(rng.normal(size=n1), 1)  # rounding forces ties
            b = np.round(rng.normal(0.3, 1.0, size=n2), 1)
            u, p = mann_whitney_u(a, b)
            ref = scipy.stats.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic")
            assert u == pytest.approx(ref.statistic)
            assert p == pytest.approx(ref.pvalue, rel=1e-9)

    def test_identical_groups_p_one(self):
        _, p = mann_whitney_u(np.ones(10), np.ones(12))
        assert p == 1.0


class TestBenjaminiHochberg:
    def test_rejects_strong_signal_keeps_null(self):
        p = np.array([1e-6, 2e-6, 0.8, 0.9, 0.5])
        keep = benjamini_hochberg(p, alpha=0.05)
        assert list(keep) == [True, True, False, False, False]

    def test_step_up_property(self):
        # Classic BH: a marginal p-value survives because a later one passes.
        p = np.array([0.01, 0.039, 0.041])
        keep = benjamini_hochberg(p, alpha=0.06)
        assert list(keep) == [True, True, True]


class TestSelectFeatures:
    def test_separating_column_ranks_first_both_modes(self, rng):
        n = 120
        y = rng.integers(0, 2, size=n)
        X = rng.normal(size=(n, 6))
        X[:, 2] = y * 4.0 + 0.1 * rng.normal(size=n)  # near-perfect separator
        m = labeled_matrix(X, y)
        for mode, kwargs in (("rank_topk", {"k": 3}), ("significance", {})):
            result = select_features(m, mode=mode, seed=1, **kwargs)
            assert result.ranked_names[0] == "f2", mode
            assert "f2" in result.selected

    def test_k_equals_column_count_selects_all(self, rng):
        y = rng.integers(0, 2, size=60)
        X = rng.normal(size=(60, 4))
        X[:, 0] += y
        m = labeled_matrix(X, y)
        result = select_features(m, k=4, mode="rank_topk", seed=0)
        assert set(result.selected) == set(m.names)

    def test_null_matrix_selects_nothing_mostly(self):
        empties = 0
        trials = 20
        for seed in range(trials):
            rng = np.random.default_rng(seed)
            y = rng.integers(0, 2, size=80)
            X = rng.normal(size=(80, 12))  # labels independent of features
            result = select_features(labeled_matrix(X, y), mode="significance")
            empties += len(result.selected) == 0
        assert empties >= 0.9 * trials

    def test_significance_invariant_under_monotone_rescaling(self, rng):
        y = rng.integers(0, 2, size=70)
        X = rng.normal(size=(70, 5))
        X[:, 1] += 0.8 * y
        X[:, 4] -= 0.5 * y
        m = labeled_matrix(X, y)
        base = select_features(m, mode="significance")
        X2 = X.copy()
        X2[:, 1] = np.exp(X2[:, 1])  # strictly monotone per-feature maps
        X2[:, 4] = X2[:, 4] ** 3
        X2[:, 0] = 10 * X2[:, 0] - 3
        rescaled = select_features(labeled_matrix(X2, y), mode="significance")
        assert base.ranked_names == rescaled.ranked_names
        assert base.selected == rescaled.selected
        assert np.allclose(base.scores, rescaled.scores)

    def test_scores_non_increasing(self, rng):
        y = rng.integers(0, 2, size=90)
        X = rng.normal(size=(90, 8))
        X[:, 3] += y
        result = select_features(labeled_matrix(X, y), k=5, mode="rank_topk", seed=2)
        assert all(a >= b for a, b in zip(result.scores, result.scores[1:]))

    def test_labels_required(self, rng):
        X = rng.normal(size=(30, 3))
        rows = [
            FeatureVector("S0", str(i), ("a", "b", "c"), X[i]) for i in range(30)
        ]
        with pytest.raises(LabelMissing):
            select_features(FeatureMatrix(rows), mode="significance")
