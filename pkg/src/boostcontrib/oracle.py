"""Independent brute-force checkers used by tests and the verify command.

Nothing here calls the traversal code in :mod:`boostcontrib.cart` or
:mod:`boostcontrib.contrib`; trees are walked by direct recursive descent
so the two implementations can be compared against each other. Summation
order (tree-major, path-minor) deliberately matches the contribution
module, making equality exact instead of tolerance-based. The module
favors obvious correctness over speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boosting import Ensemble
from .cart import Tree


@dataclass(frozen=True)
class RegionBox:
    """Axis-aligned box with open lower and closed upper bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(self.lower < x) and np.all(x <= self.upper))


def naive_contributions(ens: Ensemble, x) -> tuple[float, np.ndarray]:
    """Recompute (bias, per-feature contributions) by recursive descent."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (ens.n_features,):
        raise ValueError(
            f"expected a vector of {ens.n_features} features, got shape {x.shape}"
        )
    contributions = np.zeros(ens.n_features, dtype=np.float64)

    def descend(tree: Tree, node_id: int) -> None:
        node = tree.nodes[node_id]
        if node.split is None:
            return
        if x[node.split.feature] <= node.split.threshold:
            child_id = node.left
        else:
            child_id = node.right
        child = tree.nodes[child_id]
        contributions[node.split.feature] += ens.learning_rate * (
            child.value - node.value
        )
        descend(tree, child_id)

    bias = ens.f0
    for tree in ens.trees:
        bias += ens.learning_rate * tree.nodes[tree.root].value
        descend(tree, tree.root)
    return bias, contributions


def enumerate_leaf_regions(tree: Tree) -> list[tuple[RegionBox, float]]:
    """One (box, leaf value) pair per leaf, intersecting splits root-to-leaf."""
    regions = []

    def descend(node_id: int, lower: np.ndarray, upper: np.ndarray) -> None:
        node = tree.nodes[node_id]
        if node.split is None:
            regions.append((RegionBox(lower=lower, upper=upper), node.value))
            return
        feat, th = node.split.feature, node.split.threshold
        left_upper = upper.copy()
        left_upper[feat] = min(left_upper[feat], th)
        descend(node.left, lower.copy(), left_upper)
        right_lower = lower.copy()
        right_lower[feat] = max(right_lower[feat], th)
        descend(node.right, right_lower, upper.copy())

    descend(
        tree.root,
        np.full(tree.n_features, -np.inf),
        np.full(tree.n_features, np.inf),
    )
    return regions


def count_containing_regions(regions, probes) -> np.ndarray:
    """How many regions contain each probe; exhaustive, no tree traversal."""
    probes = np.asarray(probes, dtype=np.float64)
    if probes.ndim != 2:
        raise ValueError(f"probes must be (n, d), got shape {probes.shape}")
    if not regions:
        return np.zeros(probes.shape[0], dtype=np.int64)
    lower = np.stack([box.lower for box, _value in regions])
    upper = np.stack([box.upper for box, _value in regions])
    inside = (lower[None, :, :] < probes[:, None, :]) & (
        probes[:, None, :] <= upper[None, :, :]
    )
    return inside.all(axis=2).sum(axis=1)


def check_partition(regions, probes) -> bool:
    """True iff every probe lies in exactly one region."""
    return bool(np.all(count_containing_regions(regions, probes) == 1))


def sample_probes(X, n_probes: int, seed: int) -> np.ndarray:
    """Uniform probes over the data bounding box inflated by one range-width
    per side, so unbounded intervals get exercised too."""
    X = np.asarray(X, dtype=np.float64)
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    span = hi - lo
    rng = np.random.default_rng(seed)
    return rng.uniform(lo - span, hi + span, size=(n_probes, X.shape[1]))
