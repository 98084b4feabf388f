"""Decompose ensemble predictions into per-decision and per-feature parts.

Every path edge parent -> child contributes the residue
child.value - parent.value, attributed to the feature tested at the
PARENT (the decision that selected the child), and the edge into the leaf
is included. Each tree's root value is not caused by any decision, so it
is folded into the explanation bias together with f0. Under this
convention the additive identity

    prediction = bias + sum over features of contributions

holds exactly, because the residues along one path telescope to the leaf
value.

Summation order is fixed and part of the contract: trees in ensemble
order, edges in path order. The independent checker in
:mod:`boostcontrib.oracle` reproduces the same order so the two can be
compared for bit-level equality rather than with tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boosting import Ensemble, gbdt_predict, _check_vector
from .cart import decision_path
from .data import Dataset


@dataclass(frozen=True)
class DecisionRecord:
    """One traversed path edge.

    `feature`/`threshold`/`direction` describe the parent's split;
    `residue` is child value minus parent value, and `scaled_residue` the
    same times the learning rate (prediction units).
    """

    tree_index: int
    step: int
    feature: int
    threshold: float
    direction: str
    residue: float
    scaled_residue: float


@dataclass(frozen=True)
class Explanation:
    """Additive decomposition of one prediction.

    bias + sum(contributions.values()) equals `prediction` up to float
    associativity; features untouched by every traversed split map to
    exactly 0.0.
    """

    bias: float
    contributions: dict[str, float]
    prediction: float
    records: tuple[DecisionRecord, ...]


@dataclass(frozen=True)
class DecisionSpace:
    """Per-feature interval (lower, upper], intersected over all trees.

    Lower bounds are open and upper bounds closed, mirroring the
    equality-routes-left split convention. Unconstrained features report
    (-inf, +inf).
    """

    intervals: dict[str, tuple[float, float]]


def decision_contributions(ens: Ensemble, x) -> list[DecisionRecord]:
    """All path-edge residues for x, ordered by (tree_index, step)."""
    x = _check_vector(ens, x)
    records = []
    for tree_index, tree in enumerate(ens.trees):
        path = decision_path(tree, x)
        for step in range(len(path) - 1):
            parent = tree.nodes[path[step]]
            child = tree.nodes[path[step + 1]]
            residue = child.value - parent.value
            records.append(
                DecisionRecord(
                    tree_index=tree_index,
                    step=step,
                    feature=parent.split.feature,
                    threshold=parent.split.threshold,
                    direction="left" if path[step + 1] == parent.left else "right",
                    residue=residue,
                    scaled_residue=ens.learning_rate * residue,
                )
            )
    return records


def feature_contributions(ens: Ensemble, x) -> Explanation:
    """Aggregate scaled residues per feature name (tree-major, path-minor)."""
    x = _check_vector(ens, x)
    records = decision_contributions(ens, x)
    bias = ens.f0
    for tree in ens.trees:
        bias += ens.learning_rate * tree.nodes[tree.root].value
    contributions = {name: 0.0 for name in ens.feature_names}
    for record in records:
        contributions[ens.feature_names[record.feature]] += record.scaled_residue
    return Explanation(
        bias=bias,
        contributions=contributions,
        prediction=gbdt_predict(ens, x),
        records=tuple(records),
    )


def decision_space(ens: Ensemble, x) -> DecisionSpace:
    """Intersect the half-lines implied by every traversed decision.

    A left branch caps the feature's upper bound at the threshold; a
    right branch raises its lower bound. Intersection runs across all
    trees of the ensemble.
    """
    x = _check_vector(ens, x)
    lower = np.full(ens.n_features, -np.inf)
    upper = np.full(ens.n_features, np.inf)
    for record in decision_contributions(ens, x):
        if record.direction == "left":
            upper[record.feature] = min(upper[record.feature], record.threshold)
        else:
            lower[record.feature] = max(lower[record.feature], record.threshold)
    intervals = {
        name: (float(lower[i]), float(upper[i]))
        for i, name in enumerate(ens.feature_names)
    }
    return DecisionSpace(intervals=intervals)


def batch_explain(ens: Ensemble, data) -> list[Explanation]:
    """feature_contributions for every row of a Dataset or (n, d) array."""
    X = data.features if isinstance(data, Dataset) else np.asarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != ens.n_features:
        raise ValueError(
            f"expected shape (n, {ens.n_features}), got {X.shape}"
        )
    return [feature_contributions(ens, row) for row in X]
