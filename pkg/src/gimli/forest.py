"""Multi-label random forests: one forest per domain label (binary relevance).

Trees split on Shannon-entropy information gain, thresholds are midpoints
between consecutive distinct feature values, and every random choice
(bootstrap rows, candidate features) comes from a per-tree SplitMix64 stream
seeded as ``seed XOR hash(label, tree_index)``, so training is bit-for-bit
reproducible: identical inputs and seed give identical model bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import DegenerateLabel, DimensionMismatch, SchemaViolation, VersionMismatch
from .rng import SplitMix64, derive_seed
from .tfidf import FeatureVector

FOREST_SCHEMA_VERSION = 1

# dense-cache budget: small training matrices are densified once up front,
# large ones stay sparse and are densified per node over candidate features
_DENSE_CELL_BUDGET = 4_000_000

_LEAF = -1


@dataclass(frozen=True)
class ForestHyperparams:
    n_estimators: int = 50
    max_depth: int = 50
    min_samples_split: int = 3
    min_samples_leaf: int = 1
    criterion: str = "entropy"
    features_per_split: int | None = None  # None -> ceil(sqrt(d))
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if min(self.n_estimators, self.max_depth, self.min_samples_split, self.min_samples_leaf) < 1:
            raise ValueError("all counts must be positive")
        if self.criterion != "entropy":
            raise ValueError(f"unsupported criterion {self.criterion!r}")

    def resolved_features_per_split(self, dim: int) -> int:
        if self.features_per_split is not None:
            return min(self.features_per_split, dim)
        return min(math.ceil(math.sqrt(dim)), dim) if dim else 0

    def to_dict(self) -> dict:
        return {
            "n_estimators": self.n_estimators,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "min_samples_leaf": self.min_samples_leaf,
            "criterion": self.criterion,
            "features_per_split": self.features_per_split,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
        }


@dataclass
class DecisionTree:
    """Flat node array: internal nodes are [feature, threshold, left, right],
    leaves are [-1, positive_fraction, sample_count]."""

    nodes: list[list]

    def predict_one(self, x: np.ndarray) -> float:
        i = 0
        while True:
            node = self.nodes[i]
            if node[0] == _LEAF:
                return node[1]
            i = node[2] if x[node[0]] <= node[1] else node[3]

    def depth(self) -> int:
        def walk(i: int) -> int:
            node = self.nodes[i]
            if node[0] == _LEAF:
                return 0
            return 1 + max(walk(node[2]), walk(node[3]))

        return walk(0)

    def leaves(self) -> list[list]:
        return [n for n in self.nodes if n[0] == _LEAF]


@dataclass
class ForestModel:
    label_universe: tuple[str, ...]
    per_label_forests: dict[str, list[DecisionTree]]
    hyperparams: ForestHyperparams
    feature_dim: int


@dataclass(frozen=True)
class LabelPrediction:
    scores: dict[str, float]
    labels: frozenset[str]


def entropy_bits(positives: int, total: int) -> float:
    """Shannon entropy of a binary node with the given counts, in bits.

    Computed from integer-count log2 values so that H(1, 2) is exactly 1.0
    and pure nodes are exactly 0.0; the same formula, applied to the same
    integers, is reproducible in any independent implementation.
    """
    if total == 0 or positives == 0 or positives == total:
        return 0.0
    negatives = total - positives
    return (
        math.log2(total)
        - (positives * math.log2(positives) + negatives * math.log2(negatives)) / total
    )


def _log2_table(n: int) -> np.ndarray:
    # table[0] is unused padding; entries come from math.log2 so scalar and
    # vectorized paths see bit-identical values (np.log2's SIMD path differs
    # from libm in the last ulp on some inputs)
    return np.array([0.0] + [math.log2(i) for i in range(1, n + 1)])


def _entropy_counts_vec(pos: np.ndarray, n: np.ndarray, table: np.ndarray) -> np.ndarray:
    neg = n - pos
    h = table[n] - (pos * table[pos] + neg * table[neg]) / n
    return np.where((pos == 0) | (neg == 0), 0.0, h)


def vectors_to_csr(vectors: list[FeatureVector]) -> sparse.csr_matrix:
    if not vectors:
        raise ValueError("no feature vectors")
    dim = vectors[0].dimension
    if any(v.dimension != dim for v in vectors):
        raise DimensionMismatch("feature vectors have inconsistent dimensions")
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for v in vectors:
        indices.extend(v.indices)
        data.extend(v.weights)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(vectors), dim),
    )


class _TrainMatrix:
    """Column access helper. Small matrices are cached dense; large ones are
    densified per node over the candidate features only."""

    def __init__(self, X: sparse.spmatrix):
        self.n, self.dim = X.shape
        self._csc = X.tocsc()
        self._dense = (
            np.asarray(self._csc.todense())
            if self.n * max(self.dim, 1) <= _DENSE_CELL_BUDGET
            else None
        )

    def columns(self, rows: np.ndarray, feats: list[int]) -> np.ndarray:
        if self._dense is not None:
            return self._dense[np.ix_(rows, feats)]
        return np.asarray(self._csc[:, feats].todense())[rows]


def _best_split_for_column(values: np.ndarray, y: np.ndarray, parent_entropy: float,
                           min_leaf: int, table: np.ndarray) -> tuple[float, float] | None:
    """Best (gain, threshold) for one feature over the node samples, or None.

    Thresholds are midpoints between consecutive distinct sorted values;
    among equal gains the lowest threshold wins.
    """
    order = np.argsort(values, kind="stable")
    sv = values[order]
    sy = y[order]
    n = len(sv)
    boundaries = np.nonzero(sv[1:] != sv[:-1])[0] + 1
    if boundaries.size == 0:
        return None
    prefix = np.cumsum(sy)
    total_pos = int(prefix[-1])
    n_left = boundaries
    pos_left = prefix[boundaries - 1]
    n_right = n - n_left
    pos_right = total_pos - pos_left
    legal = (n_left >= min_leaf) & (n_right >= min_leaf)
    if not legal.any():
        return None
    gains = (
        parent_entropy
        - (n_left / n) * _entropy_counts_vec(pos_left, n_left, table)
        - (n_right / n) * _entropy_counts_vec(pos_right, n_right, table)
    )
    gains[~legal] = -np.inf
    best = int(np.argmax(gains))  # first max -> lowest threshold
    gain = float(gains[best])
    lo = sv[boundaries[best] - 1]
    hi = sv[boundaries[best]]
    threshold = float(lo + (hi - lo) / 2.0)
    if threshold >= hi:  # float midpoint collapse; route on the lower value
        threshold = float(lo)
    return gain, threshold


def _build_tree(matrix: _TrainMatrix, y: np.ndarray, rows: np.ndarray,
                rng: SplitMix64, hp: ForestHyperparams, k_features: int,
                table: np.ndarray) -> DecisionTree:
    nodes: list[list] = []

    def grow(node_rows: np.ndarray, depth: int) -> int:
        index = len(nodes)
        nodes.append(None)  # reserve slot; children are appended after
        y_node = y[node_rows]
        n_node = len(node_rows)
        positives = int(y_node.sum())
        fraction = positives / n_node

        if (
            depth >= hp.max_depth
            or n_node < hp.min_samples_split
            or positives == 0
            or positives == n_node
        ):
            nodes[index] = [_LEAF, fraction, n_node]
            return index

        feats = sorted(rng.sample_without_replacement(matrix.dim, k_features))
        columns = matrix.columns(node_rows, feats)
        parent_entropy = entropy_bits(positives, n_node)

        best_gain = 0.0
        best_feat = -1
        best_threshold = 0.0
        best_col = -1
        for j, feat in enumerate(feats):
            found = _best_split_for_column(
                columns[:, j], y_node, parent_entropy, hp.min_samples_leaf, table
            )
            if found is None:
                continue
            gain, threshold = found
            if gain > best_gain:  # ties keep the earlier (lower) feature index
                best_gain, best_feat, best_threshold, best_col = gain, feat, threshold, j

        if best_feat == -1 or best_gain <= 0.0:
            nodes[index] = [_LEAF, fraction, n_node]
            return index

        mask = columns[:, best_col] <= best_threshold
        left = grow(node_rows[mask], depth + 1)
        right = grow(node_rows[~mask], depth + 1)
        nodes[index] = [best_feat, best_threshold, left, right]
        return index

    grow(rows, 0)
    return DecisionTree(nodes)


def train(
    X: list[FeatureVector] | sparse.spmatrix,
    Y: np.ndarray,
    label_universe: tuple[str, ...] | list[str],
    hp: ForestHyperparams | None = None,
) -> ForestModel:
    """Train one forest per label column of Y.

    Y is an n x L binary matrix aligned with label_universe. Columns that
    are all-0 or all-1 carry no signal and are rejected.
    """
    if hp is None:
        hp = ForestHyperparams()
    matrix = _TrainMatrix(X if sparse.issparse(X) else vectors_to_csr(X))
    Y = np.asarray(Y)
    if Y.ndim != 2:
        raise DimensionMismatch("Y must be a 2-D binary matrix")
    n, n_labels = Y.shape
    labels = tuple(label_universe)
    if n_labels != len(labels):
        raise DimensionMismatch(
            f"Y has {n_labels} columns but {len(labels)} labels were given"
        )
    if matrix.n != n:
        raise DimensionMismatch(f"X has {matrix.n} rows, Y has {n}")
    if n < 2:
        raise ValueError("need at least 2 training samples")

    for col, label in enumerate(labels):
        total = int(Y[:, col].sum())
        if total == 0:
            raise DegenerateLabel(label, "all-0")
        if total == n:
            raise DegenerateLabel(label, "all-1")

    k_features = hp.resolved_features_per_split(matrix.dim)
    table = _log2_table(n)
    all_rows = np.arange(n)
    forests: dict[str, list[DecisionTree]] = {}
    for col, label in enumerate(labels):
        y = Y[:, col].astype(np.int64)
        trees = []
        for t in range(hp.n_estimators):
            rng = SplitMix64(derive_seed(hp.seed, label, t))
            if hp.bootstrap:
                rows = np.array(rng.bootstrap_indices(n), dtype=np.int64)
            else:
                rows = all_rows
            trees.append(_build_tree(matrix, y, rows, rng, hp, k_features, table))
        forests[label] = trees
    return ForestModel(
        label_universe=labels,
        per_label_forests=forests,
        hyperparams=hp,
        feature_dim=matrix.dim,
    )


def _as_dense(x: FeatureVector | np.ndarray, dim: int) -> np.ndarray:
    if isinstance(x, FeatureVector):
        if x.dimension != dim:
            raise DimensionMismatch(f"vector has dimension {x.dimension}, model expects {dim}")
        dense = np.zeros(dim)
        if x.indices:
            dense[list(x.indices)] = x.weights
        return dense
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (dim,):
        raise DimensionMismatch(f"vector has shape {arr.shape}, model expects ({dim},)")
    return arr


def predict(model: ForestModel, x: FeatureVector | np.ndarray,
            threshold: float = 0.5) -> LabelPrediction:
    """Vote fractions per label; labels are those scoring >= threshold."""
    dense = _as_dense(x, model.feature_dim)
    scores = {}
    for label in model.label_universe:
        trees = model.per_label_forests[label]
        scores[label] = sum(t.predict_one(dense) for t in trees) / len(trees)
    labels = frozenset(l for l, s in scores.items() if s >= threshold)
    return LabelPrediction(scores=scores, labels=labels)


def predict_matrix(model: ForestModel, X: list[FeatureVector],
                   threshold: float = 0.5) -> np.ndarray:
    """Binary prediction matrix (n x L) aligned with label_universe."""
    out = np.zeros((len(X), len(model.label_universe)), dtype=np.int64)
    for i, x in enumerate(X):
        pred = predict(model, x, threshold)
        for j, label in enumerate(model.label_universe):
            out[i, j] = 1 if label in pred.labels else 0
    return out


# -- serialization -----------------------------------------------------------


def save_model(model: ForestModel) -> bytes:
    """Canonical JSON bytes: identical models serialize byte-identically."""
    doc = {
        "schema_version": FOREST_SCHEMA_VERSION,
        "hyperparams": model.hyperparams.to_dict(),
        "label_universe": list(model.label_universe),
        "feature_dim": model.feature_dim,
        "trees": {
            label: [tree.nodes for tree in trees]
            for label, trees in model.per_label_forests.items()
        },
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def load_model(raw: bytes) -> ForestModel:
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaViolation("", f"not a valid model document: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaViolation("", "model document must be a JSON object")
    version = doc.get("schema_version")
    if version != FOREST_SCHEMA_VERSION:
        raise VersionMismatch(version, FOREST_SCHEMA_VERSION)
    for key in ("hyperparams", "label_universe", "feature_dim", "trees"):
        if key not in doc:
            raise SchemaViolation(f"/{key}", "missing required field")
    hp = ForestHyperparams(**doc["hyperparams"])
    labels = tuple(doc["label_universe"])
    trees_doc = doc["trees"]
    if set(trees_doc) != set(labels):
        raise SchemaViolation("/trees", "tree labels do not match label_universe")
    forests = {}
    for label in labels:
        trees = [DecisionTree([list(n) for n in nodes]) for nodes in trees_doc[label]]
        if len(trees) != hp.n_estimators:
            raise SchemaViolation(
                f"/trees/{label}", f"expected {hp.n_estimators} trees, found {len(trees)}"
            )
        for tree in trees:
            _validate_nodes(tree, label)
        forests[label] = trees
    return ForestModel(
        label_universe=labels,
        per_label_forests=forests,
        hyperparams=hp,
        feature_dim=int(doc["feature_dim"]),
    )


def _validate_nodes(tree: DecisionTree, label: str) -> None:
    count = len(tree.nodes)
    if count == 0:
        raise SchemaViolation(f"/trees/{label}", "empty tree")
    for node in tree.nodes:
        if node[0] == _LEAF:
            if len(node) != 3 or not 0.0 <= node[1] <= 1.0:
                raise SchemaViolation(f"/trees/{label}", f"malformed leaf {node!r}")
        else:
            if len(node) != 4 or not (0 <= node[2] < count and 0 <= node[3] < count):
                raise SchemaViolation(f"/trees/{label}", f"malformed node {node!r}")
