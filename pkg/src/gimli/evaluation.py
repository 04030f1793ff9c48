"""ShuffleSplit cross-validation and multi-label metrics.

Folds are drawn independently (test sets may overlap across folds): each
fold Fisher-Yates-shuffles 0..n-1 with its own derived SplitMix64 stream and
takes the first round(test_fraction * n) indices as the test set. Metrics
are micro-averaged over all (sample, label) cells; macro averages ride
along in the JSON report for transparency.
"""

from __future__ import annotations

import logging
import statistics
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ShapeMismatch, TooFewSamples
from .forest import ForestHyperparams, predict_matrix, train
from .rng import SplitMix64, derive_seed
from .snapshot import ProjectRef
from .tfidf import fit_tfidf, transform

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FoldPlan:
    n_splits: int
    test_fraction: float
    seed: int
    folds: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]  # (train, test)


def shuffle_split(
    n: int, n_splits: int = 10, test_fraction: float = 0.1, seed: int = 0
) -> FoldPlan:
    """Independent random train/test partitions, deterministic given seed.

    Fold i shuffles [0, n) with SplitMix64 seeded ``seed XOR
    hash("fold", i)`` and takes the first ``round(test_fraction * n)``
    indices as test (banker's rounding); both index lists are sorted.
    """
    if n < 10:
        raise TooFewSamples(f"need at least 10 samples, got {n}")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    k = round(test_fraction * n)
    if k < 1 or k >= n:
        raise TooFewSamples(
            f"test_fraction {test_fraction} gives test size {k} of {n}"
        )
    folds = []
    for i in range(n_splits):
        rng = SplitMix64(derive_seed(seed, "fold", i))
        perm = list(range(n))
        rng.shuffle(perm)
        test = tuple(sorted(perm[:k]))
        train_idx = tuple(sorted(perm[k:]))
        folds.append((train_idx, test))
    return FoldPlan(n_splits=n_splits, test_fraction=test_fraction, seed=seed, folds=tuple(folds))


def _check_shapes(y_true: np.ndarray, y_pred: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or y_true.ndim != 2 or y_true.shape[1] < 1:
        raise ShapeMismatch(f"shapes {y_true.shape} and {y_pred.shape} do not match")
    return y_true, y_pred


def compute_metrics(y_true: np.ndarray, y_pred: np.ndarray) -> dict[str, float]:
    """Micro-averaged precision/recall/F and Hamming loss over all cells.

    Empty-denominator conventions: precision 1.0 when nothing predicted,
    recall 1.0 when nothing relevant, F 0.0 when P + R = 0.
    """
    y_true, y_pred = _check_shapes(y_true, y_pred)
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    n_cells = y_true.shape[0] * y_true.shape[1]
    disagreements = int(np.sum(y_true != y_pred))
    precision = tp / (tp + fp) if (tp + fp) > 0 else 1.0
    recall = tp / (tp + fn) if (tp + fn) > 0 else 1.0
    f_measure = (
        2 * precision * recall / (precision + recall) if (precision + recall) > 0 else 0.0
    )
    return {
        "precision": precision,
        "recall": recall,
        "f_measure": f_measure,
        "hamming_loss": disagreements / n_cells,
    }


def compute_macro_metrics(y_true: np.ndarray, y_pred: np.ndarray) -> dict[str, float]:
    """Per-label metrics averaged over labels (reported alongside micro)."""
    y_true, y_pred = _check_shapes(y_true, y_pred)
    precisions, recalls, fs = [], [], []
    for col in range(y_true.shape[1]):
        m = compute_metrics(y_true[:, col : col + 1], y_pred[:, col : col + 1])
        precisions.append(m["precision"])
        recalls.append(m["recall"])
        fs.append(m["f_measure"])
    return {
        "macro_precision": statistics.mean(precisions),
        "macro_recall": statistics.mean(recalls),
        "macro_f_measure": statistics.mean(fs),
    }


_METRIC_KEYS = ("precision", "recall", "f_measure", "hamming_loss")


@dataclass
class EvaluationReport:
    mode: str  # "one_project" | "multi_project"
    project: ProjectRef | None
    per_fold: list[dict[str, float]]
    macro_per_fold: list[dict[str, float]] = field(default_factory=list)
    pooled: dict[str, float] = field(default_factory=dict)
    dropped_labels: list[tuple[str, int]] = field(default_factory=list)
    used_labels: tuple[str, ...] = ()

    def mean(self, key: str) -> float:
        return statistics.mean(f[key] for f in self.per_fold)

    def std(self, key: str) -> float:
        values = [f[key] for f in self.per_fold]
        return statistics.stdev(values) if len(values) > 1 else 0.0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "project": self.project.display_label if self.project else None,
            "per_fold": self.per_fold,
            "macro_per_fold": self.macro_per_fold,
            "mean": {k: self.mean(k) for k in _METRIC_KEYS},
            "std": {k: self.std(k) for k in _METRIC_KEYS},
            "pooled": self.pooled,
            "dropped_labels": [
                {"label": l, "positives": c} for l, c in self.dropped_labels
            ],
            "used_labels": list(self.used_labels),
        }


def build_label_matrix(
    label_sets: list[frozenset[str]], labels: tuple[str, ...]
) -> np.ndarray:
    out = np.zeros((len(label_sets), len(labels)), dtype=np.int64)
    for i, present in enumerate(label_sets):
        for j, label in enumerate(labels):
            if label in present:
                out[i, j] = 1
    return out


def cross_validate(
    examples: list[tuple[list[str], frozenset[str]]],
    label_universe: tuple[str, ...],
    mode: str = "one_project",
    project: ProjectRef | None = None,
    hp: ForestHyperparams | None = None,
    n_splits: int = 10,
    test_fraction: float = 0.1,
    seed: int = 0,
    min_df: int = 2,
    threshold: float = 0.5,
    on_fold: Callable | None = None,
) -> EvaluationReport:
    """Per fold: fit TF-IDF on the training split only, train forests,
    predict the test split, and score.

    Labels with fewer than n_splits positive examples are dropped (their
    recall would be undefined in most folds) and reported. ``on_fold`` is
    an inspection hook called with (fold_index, tfidf_model, train_idx,
    test_idx) before scoring.
    """
    if hp is None:
        hp = ForestHyperparams(seed=seed)
    token_lists = [tokens for tokens, _ in examples]
    label_sets = [labels for _, labels in examples]

    positives = {
        label: sum(1 for s in label_sets if label in s) for label in label_universe
    }
    used = tuple(l for l in label_universe if positives[l] >= n_splits)
    dropped = [(l, positives[l]) for l in label_universe if positives[l] < n_splits]
    for label, count in dropped:
        log.warning(
            "dropping label %r: %d positive examples < %d splits", label, count, n_splits
        )
    if not used:
        raise TooFewSamples("no label has enough positive examples")

    Y = build_label_matrix(label_sets, used)
    plan = shuffle_split(len(examples), n_splits, test_fraction, seed)

    per_fold, macro_per_fold = [], []
    pool_true, pool_pred = [], []
    for fold_index, (train_idx, test_idx) in enumerate(plan.folds):
        tfidf = fit_tfidf([token_lists[i] for i in train_idx], min_df=min_df)
        X_train = [transform(tfidf, token_lists[i]) for i in train_idx]
        X_test = [transform(tfidf, token_lists[i]) for i in test_idx]
        model = train(X_train, Y[list(train_idx)], used, hp)
        if on_fold is not None:
            on_fold(fold_index, tfidf, train_idx, test_idx)
        y_pred = predict_matrix(model, X_test, threshold)
        y_true = Y[list(test_idx)]
        per_fold.append(compute_metrics(y_true, y_pred))
        macro_per_fold.append(compute_macro_metrics(y_true, y_pred))
        pool_true.append(y_true)
        pool_pred.append(y_pred)

    pooled = compute_metrics(np.vstack(pool_true), np.vstack(pool_pred))
    return EvaluationReport(
        mode=mode,
        project=project,
        per_fold=per_fold,
        macro_per_fold=macro_per_fold,
        pooled=pooled,
        dropped_labels=dropped,
        used_labels=used,
    )


def render_table(reports: list[EvaluationReport]) -> str:
    """Aligned text table: model, one/multi, precision, recall, F, Hla."""
    headers = ("Model", "One/Multi", "Precision", "Recall", "F-measure", "Hla")
    rows = [headers]
    for report in reports:
        scope = "O" if report.mode == "one_project" else "M"
        name = "RF TF-IDF"
        if report.project is not None:
            name = f"RF TF-IDF ({report.project.display_label})"
        rows.append(
            (
                name,
                scope,
                f"{report.mean('precision'):.3f}",
                f"{report.mean('recall'):.3f}",
                f"{report.mean('f_measure'):.3f}",
                f"{report.mean('hamming_loss'):.3f}",
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(headers))]
    lines = []
    for idx, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
