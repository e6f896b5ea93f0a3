"""AdaBoost.R2: degenerate cases, weight positivity, benchmark vs single tree."""

import numpy as np
import pytest

from homevitals.models import AdaBoostR2, DecisionTreeRegressor


def noisy_sine(n, seed, noise=0.4):
    rng = np.random.default_rng(seed)
    X = rng.uniform(0, 6, size=(n, 1))
    y = np.sin(X[:, 0]) * 3.0 + noise * rng.normal(size=n)
    return X, y


class TestAdaBoostR2:
    def test_single_estimator_equals_base(self, rng):
        X = rng.normal(size=(80, 2))
        y = X[:, 0] ** 2 + X[:, 1]
        boost = AdaBoostR2(base_kind="dt", n_estimators=1, seed=5).fit(X, y)
        base_model, _ = boost.members[0]
        probe = rng.normal(size=(30, 2))
        assert np.allclose(boost.predict(probe), base_model.predict(probe), atol=1e-12)

    def test_perfect_base_stops_after_first_round(self, rng):
        # A memorizing tree has zero training error, so boosting ends at one member.
        X = rng.normal(size=(50, 1))
        y = (X[:, 0] > 0).astype(float)
        boost = AdaBoostR2(
            base_kind="dt",
            n_estimators=25,
            seed=1,
            base_params={"max_depth": None, "min_samples_leaf": 1},
        ).fit(X, y)
        assert len(boost.members) == 1

    def test_member_weights_positive(self):
        X, y = noisy_sine(150, seed=3)
        boost = AdaBoostR2(base_kind="dt", n_estimators=20, seed=3).fit(X, y)
        assert len(boost.members) >= 2
        assert all(w > 0 for w in boost.member_weights)

    def test_beats_single_tree_across_seeds(self):
        wins = 0
        for seed in range(10):
            X, y = noisy_sine(240, seed=seed)
            X_test, y_test = noisy_sine(120, seed=1000 + seed, noise=0.0)
            params = {"max_depth": 6, "min_samples_leaf": 3}
            tree = DecisionTreeRegressor(seed=seed, **params).fit(X, y)
            boost = AdaBoostR2(
                base_kind="dt", n_estimators=25, seed=seed, base_params=params
            ).fit(X, y)
            mae_tree = np.mean(np.abs(tree.predict(X_test) - y_test))
            mae_boost = np.mean(np.abs(boost.predict(X_test) - y_test))
            wins += mae_boost <= mae_tree
        assert wins >= 8

    def test_mlp_base_supported(self, rng):
        X = rng.uniform(-1, 1, size=(60, 1))
        y = 2.0 * X[:, 0]
        boost = AdaBoostR2(
            base_kind="mlp",
            n_estimators=3,
            seed=2,
            base_params={"hidden": 8, "epochs": 40},
        ).fit(X, y)
        pred = boost.predict(X)
        assert np.mean(np.abs(pred - y)) < 0.5

    def test_weighted_median_prediction(self, rng):
        X, y = noisy_sine(100, seed=7)
        boost = AdaBoostR2(base_kind="dt", n_estimators=10, seed=7).fit(X, y)
        probe = rng.uniform(0, 6, size=(5, 1))
        member_preds = np.vstack([m.predict(probe) for m, _ in boost.members]).T
        weights = np.asarray(boost.member_weights)
        for i, expected in enumerate(boost.predict(probe)):
            order = np.argsort(member_preds[i])
            cdf = np.cumsum(weights[order])
            j = int(np.argmax(cdf >= 0.5 * cdf[-1]))
            assert expected == member_preds[i][order[j]]

    def test_round_trip_serialization(self):
        X, y = noisy_sine(90, seed=11)
        boost = AdaBoostR2(base_kind="dt", n_estimators=8, seed=11).fit(X, y)
        clone = AdaBoostR2.from_dict(boost.to_dict())
        probe = np.linspace(0, 6, 25).reshape(-1, 1)
        assert np.array_equal(boost.predict(probe), clone.predict(probe))

    def test_deterministic_under_seed(self):
        X, y = noisy_sine(90, seed=13)
        a = AdaBoostR2(base_kind="dt", n_estimators=6, seed=4).fit(X, y)
        b = AdaBoostR2(base_kind="dt", n_estimators=6, seed=4).fit(X, y)
        assert a.to_dict() == b.to_dict()
