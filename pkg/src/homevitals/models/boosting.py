"""AdaBoost.R2 for regression: linear loss, weighted bootstrap resampling for
the base learner, weighted-median aggregation.

Per round: fit the base on a weight-proportional resample, compute absolute
errors normalized by their maximum, average them under the current weights
(the round loss L), stop if L >= 0.5, otherwise keep the member with weight
ln(1/beta) where beta = L / (1 - L) and reweight toward the hard rows.
"""

from __future__ import annotations

import logging

import numpy as np

from ..errors import InputError
from .mlp import MlpRegressor
from .tree import DecisionTreeRegressor, _validate_xy

log = logging.getLogger(__name__)

_MIN_BETA = 1e-10

BASE_KINDS = ("dt", "mlp")


def _make_base(kind: str, seed: int, base_params: dict | None):
    params = dict(base_params or {})
    if kind == "dt":
        params.setdefault("max_depth", 8)
        params.setdefault("min_samples_leaf", 3)
        return DecisionTreeRegressor(seed=seed, **params)
    if kind == "mlp":
        params.setdefault("hidden", 32)
        params.setdefault("epochs", 60)
        return MlpRegressor(seed=seed, **params)
    raise InputError(f"base_kind must be one of {BASE_KINDS}, got {kind!r}")


class AdaBoostR2:
    def __init__(
        self,
        base_kind: str = "dt",
        n_estimators: int = 50,
        seed: int = 0,
        base_params: dict | None = None,
    ):
        if base_kind not in BASE_KINDS:
            raise InputError(f"base_kind must be one of {BASE_KINDS}, got {base_kind!r}")
        if n_estimators < 1:
            raise InputError("n_estimators must be >= 1")
        self.base_kind = base_kind
        self.n_estimators = n_estimators
        self.seed = seed
        self.base_params = dict(base_params or {})
        self.members: list[tuple[object, float]] = []

    def fit(self, X, y) -> "AdaBoostR2":
        X, y = _validate_xy(X, y)
        y = y.astype(np.float64)
        n = X.shape[0]
        if n == 0:
            raise InputError("empty training set")
        rng = np.random.default_rng(self.seed)
        weights = np.full(n, 1.0 / n)
        self.members = []
        for round_idx in range(self.n_estimators):
            boot = rng.choice(n, size=n, replace=True, p=weights)
            base = _make_base(self.base_kind, int(rng.integers(0, 2**31 - 1)), self.base_params)
            base.fit(X[boot], y[boot])
            errors = np.abs(base.predict(X) - y)
            max_error = errors.max()
            if max_error > 0:
                errors = errors / max_error
            avg_loss = float(np.sum(weights * errors))
            if avg_loss <= 0.0:
                # Perfect fit: keep the member and stop boosting.
                self.members.append((base, float(np.log(1.0 / _MIN_BETA))))
                break
            if avg_loss >= 0.5:
                if not self.members:
                    # Degenerate first round: a single member ensemble whose
                    # weight is irrelevant to the weighted median; fixed at 1.
                    log.warning(
                        "AdaBoost.R2 first-round average loss %.3f >= 0.5; "
                        "returning single-member ensemble",
                        avg_loss,
                    )
                    self.members.append((base, 1.0))
                break
            beta = avg_loss / (1.0 - avg_loss)
            self.members.append((base, float(np.log(1.0 / beta))))
            if round_idx < self.n_estimators - 1:
                weights = weights * np.power(beta, 1.0 - errors)
                total = weights.sum()
                if total <= 0:
                    break
                weights = weights / total
        return self

    def predict(self, X) -> np.ndarray:
        if not self.members:
            raise InputError("ensemble is not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        preds = np.vstack([m.predict(X) for m, _ in self.members]).T  # (n, members)
        member_weights = np.asarray([w for _, w in self.members])
        order = np.argsort(preds, axis=1)
        sorted_weights = member_weights[order]
        cdf = np.cumsum(sorted_weights, axis=1)
        median_pos = np.argmax(cdf >= 0.5 * cdf[:, -1][:, None], axis=1)
        rows = np.arange(preds.shape[0])
        return preds[rows, order[rows, median_pos]]

    @property
    def member_weights(self) -> list[float]:
        return [w for _, w in self.members]

    def to_dict(self) -> dict:
        return {
            "base_kind": self.base_kind,
            "n_estimators": self.n_estimators,
            "seed": self.seed,
            "base_params": self.base_params,
            "members": [
                {"weight": w, "model": m.to_dict()} for m, w in self.members
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "AdaBoostR2":
        ensemble = cls(
            base_kind=doc["base_kind"],
            n_estimators=doc["n_estimators"],
            seed=doc["seed"],
            base_params=doc.get("base_params") or {},
        )
        loader = DecisionTreeRegressor if doc["base_kind"] == "dt" else MlpRegressor
        ensemble.members = [
            (loader.from_dict(m["model"]), float(m["weight"])) for m in doc["members"]
        ]
        return ensemble
