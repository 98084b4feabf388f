"""Binary regression trees with conditional-mean node values.

Every node stores the mean of the training targets routed to it, so a
prediction can be read either as the leaf value or as the root value plus
the chain of child-minus-parent differences along the decision path. The
contribution machinery in :mod:`boostcontrib.contrib` relies on that
equivalence, which makes the conventions here load-bearing:

* a sample goes LEFT iff x[feature] <= threshold (equality routes left);
* candidate thresholds are midpoints between consecutive distinct sorted
  feature values;
* split quality is the absolute SSE reduction
  SSE(parent) - SSE(left) - SSE(right);
* gains tying the maximum within 1e-12 relative are broken uniformly at
  random using the caller-supplied generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RELATIVE_TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SplitDecision:
    """Feature/threshold test; left means x[feature] <= threshold."""

    feature: int
    threshold: float


@dataclass
class TreeNode:
    """One arena entry.

    `sse` is the sum of squared target deviations around `value`, known
    only for trees produced by fitting; deserialized trees carry None.
    A node is a leaf iff `split` is None iff both children are None.
    """

    value: float
    n_samples: int
    sse: float | None
    split: SplitDecision | None = None
    left: int | None = None
    right: int | None = None

    def is_leaf(self) -> bool:
        return self.split is None


@dataclass(frozen=True)
class CartParams:
    """Stopping rules for tree growth.

    min_samples_leaf and min_samples_split are enforced independently;
    min_gain uses a strict > comparison, so pure nodes never split.
    """

    max_depth: int
    min_samples_leaf: int = 1
    min_samples_split: int = 2
    min_gain: float = 0.0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_gain < 0:
            raise ValueError("min_gain must be >= 0")


@dataclass
class Tree:
    """Arena of nodes; `root` indexes into `nodes` (always 0 after fitting)."""

    nodes: list[TreeNode] = field(default_factory=list)
    root: int = 0
    n_features: int = 0

    def node(self, node_id: int) -> TreeNode:
        return self.nodes[node_id]


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    rng: np.random.Generator,
    *,
    min_samples_leaf: int = 1,
    min_gain: float = 0.0,
) -> tuple[int, float, float] | None:
    """Exhaustive search for the (feature, threshold) with maximal SSE gain.

    Returns (feature, threshold, gain) or None when no candidate clears
    min_gain. Candidates are midpoints between consecutive distinct sorted
    values per feature; splits leaving fewer than min_samples_leaf rows on
    either side are excluded. Ties within 1e-12 relative of the maximum
    are resolved uniformly at random; rng is consulted only when two or
    more candidates tie, keeping single-winner searches draw-free.
    """
    n = y.shape[0]
    if n < 2:
        return None
    if np.all(y == y[0]):
        return None

    total = float(y.sum())
    total_sq = float((y * y).sum())
    parent_sse = total_sq - total * total / n

    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    ys = y[order]

    left_sum = np.cumsum(ys, axis=0)[:-1]
    left_sq = np.cumsum(ys * ys, axis=0)[:-1]
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left

    sse_left = left_sq - left_sum * left_sum / n_left
    right_sum = total - left_sum
    right_sq = total_sq - left_sq
    sse_right = right_sq - right_sum * right_sum / n_right

    gain = parent_sse - sse_left - sse_right
    valid = xs[:-1] != xs[1:]
    valid &= (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)
    gain = np.where(valid, gain, -np.inf)

    best_gain = float(gain.max())
    if not best_gain > min_gain:
        return None

    tie_floor = best_gain - RELATIVE_TIE_TOLERANCE * abs(best_gain)
    tie_rows, tie_cols = np.nonzero(gain >= tie_floor)
    pick = 0 if tie_rows.shape[0] == 1 else int(rng.integers(tie_rows.shape[0]))
    i, feat = int(tie_rows[pick]), int(tie_cols[pick])
    threshold = float((xs[i, feat] + xs[i + 1, feat]) / 2.0)
    return feat, threshold, float(gain[i, feat])


def fit_cart(
    X: np.ndarray,
    y: np.ndarray,
    params: CartParams,
    rng: np.random.Generator,
) -> Tree:
    """Grow a tree by recursive best-split partitioning of (X, y).

    The root holds the mean of all targets; recursion stops at max_depth,
    when a node has fewer than min_samples_split rows, or when best_split
    finds nothing. Node ids are assigned in preorder (left subtree first),
    so identical inputs and generator state reproduce the tree node by node.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be (n, d) and y (n,) with matching n")
    if y.shape[0] < 1:
        raise ValueError("need at least one sample")

    tree = Tree(nodes=[], root=0, n_features=X.shape[1])

    def build(X_node: np.ndarray, y_node: np.ndarray, depth: int) -> int:
        value = float(np.mean(y_node))
        sse = float(((y_node - value) ** 2).sum())
        node_id = len(tree.nodes)
        tree.nodes.append(TreeNode(value=value, n_samples=y_node.shape[0], sse=sse))
        if depth >= params.max_depth or y_node.shape[0] < params.min_samples_split:
            return node_id
        found = best_split(
            X_node,
            y_node,
            rng,
            min_samples_leaf=params.min_samples_leaf,
            min_gain=params.min_gain,
        )
        if found is None:
            return node_id
        feature, threshold, _gain = found
        mask = X_node[:, feature] <= threshold
        left_id = build(X_node[mask], y_node[mask], depth + 1)
        right_id = build(X_node[~mask], y_node[~mask], depth + 1)
        node = tree.nodes[node_id]
        node.split = SplitDecision(feature=feature, threshold=threshold)
        node.left = left_id
        node.right = right_id
        return node_id

    build(X, y, 0)
    return tree


def _check_vector(tree: Tree, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (tree.n_features,):
        raise ValueError(
            f"expected a vector of {tree.n_features} features, got shape {x.shape}"
        )
    return x


def decision_path(tree: Tree, x) -> list[int]:
    """Node ids from root to the leaf reached by x, in traversal order."""
    x = _check_vector(tree, x)
    path = [tree.root]
    node = tree.nodes[tree.root]
    while node.split is not None:
        if x[node.split.feature] <= node.split.threshold:
            next_id = node.left
        else:
            next_id = node.right
        path.append(next_id)
        node = tree.nodes[next_id]
    return path


def tree_predict(tree: Tree, x) -> float:
    """Value of the leaf reached by routing x from the root."""
    return tree.nodes[decision_path(tree, x)[-1]].value
