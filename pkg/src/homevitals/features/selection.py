"""Supervised feature selection over a labeled matrix.

Two modes:
  rank_topk     — impurity-importance ranking from a random forest fit on the
                  matrix; the top k names are selected.
  significance  — per-feature two-sided Mann-Whitney U between the classes,
                  Benjamini-Hochberg corrected at alpha; every surviving
                  feature is selected, ranked by p-value.

The U test is rank-based, so the significance ranking is invariant under any
strictly monotone per-feature rescaling.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InputError, LabelMissing
from ..models.forest import RandomForestClassifier
from .vectors import FeatureMatrix, SelectionResult

BH_ALPHA = 0.05

MODES = ("rank_topk", "significance")


def _average_ranks(values: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Midranks (1-based) plus tie-group sizes for the variance correction."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    tie_sizes: list[int] = []
    i = 0
    sorted_vals = values[order]
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        tie_sizes.append(j - i + 1)
        i = j + 1
    return ranks, tie_sizes


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def mann_whitney_u(group_a: np.ndarray, group_b: np.ndarray) -> tuple[float, float]:
    """Two-sided U test via the normal approximation with tie correction.

    Returns (U statistic of group_a, p-value). Matches the asymptotic method
    with continuity correction.
    """
    a = np.asarray(group_a, dtype=np.float64)
    b = np.asarray(group_b, dtype=np.float64)
    n1, n2 = a.size, b.size
    if n1 == 0 or n2 == 0:
        raise InputError("both groups must be non-empty")
    combined = np.concatenate([a, b])
    ranks, tie_sizes = _average_ranks(combined)
    r1 = float(ranks[:n1].sum())
    u1 = r1 - n1 * (n1 + 1) / 2.0
    n = n1 + n2
    tie_term = sum(t**3 - t for t in tie_sizes)
    variance = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0:  # all values identical
        return u1, 1.0
    mean = n1 * n2 / 2.0
    u_big = max(u1, n1 * n2 - u1)
    z = (u_big - mean - 0.5) / math.sqrt(variance)
    return u1, min(1.0, 2.0 * _normal_sf(z))


def benjamini_hochberg(p_values: np.ndarray, alpha: float = BH_ALPHA) -> np.ndarray:
    """Boolean mask of discoveries at false-discovery rate alpha."""
    p = np.asarray(p_values, dtype=np.float64)
    m = p.size
    order = np.argsort(p, kind="stable")
    keep = np.zeros(m, dtype=bool)
    max_i = -1
    for rank, idx in enumerate(order, start=1):
        if p[idx] <= rank / m * alpha:
            max_i = rank
    if max_i >= 0:
        keep[order[:max_i]] = True
    return keep


def select_features(
    matrix: FeatureMatrix,
    k: int | None = None,
    mode: str = "significance",
    alpha: float = BH_ALPHA,
    seed: int = 0,
    n_trees: int = 60,
) -> SelectionResult:
    if matrix.labels is None:
        raise LabelMissing("feature selection needs a labeled matrix")
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}, got {mode!r}")
    X = matrix.X
    y = matrix.labels.astype(np.int64)
    names = matrix.names

    if mode == "rank_topk":
        if k is None:
            raise InputError("rank_topk mode needs k")
        if k > len(names):
            raise InputError(f"k={k} exceeds {len(names)} features")
        forest = RandomForestClassifier(n_trees=n_trees, seed=seed)
        forest.fit(X, y)
        scores = forest.feature_importances_
        order = np.argsort(-scores, kind="stable")
        ranked = tuple(names[i] for i in order)
        return SelectionResult(
            ranked_names=ranked,
            scores=tuple(float(scores[i]) for i in order),
            selected=ranked[:k],
        )

    mask0 = y == 0
    mask1 = y == 1
    if not mask0.any() or not mask1.any():
        raise LabelMissing("significance mode needs both classes present")
    p_values = np.array(
        [mann_whitney_u(X[mask1, j], X[mask0, j])[1] for j in range(len(names))]
    )
    keep = benjamini_hochberg(p_values, alpha)
    order = np.argsort(p_values, kind="stable")
    ranked = tuple(names[i] for i in order)
    scores = tuple(float(1.0 - p_values[i]) for i in order)
    selected = tuple(names[i] for i in order if keep[i])
    if k is not None:
        selected = selected[: min(k, len(selected))]
    return SelectionResult(ranked_names=ranked, scores=scores, selected=selected)
