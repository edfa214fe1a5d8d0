"""Balance, train, and evaluate influential-change classifiers.

Implements SMOTE oversampling, Gaussian naive Bayes, a Gini random forest,
stratified k-fold cross-validation, and precision/recall/F reporting. The
positive label (1) is the influential class; prediction ties resolve to the
non-influential label. All stochastic steps are bit-deterministic given
(dataset, params, seed); per-unit seeds derive from the master seed.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import featurize
from .errors import DataError
from .featurize import CommitExample, FeatureSchema, FeatureVector, Vocabulary
from .seeds import derive_seed

REAL, SYNTHETIC = "real", "synthetic"

MODEL_FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# Dataset
# ---------------------------------------------------------------------------


@dataclass
class Dataset:
    """Labeled numeric rows aligned to a feature schema."""

    schema: FeatureSchema
    X: np.ndarray
    y: np.ndarray
    hashes: tuple[str, ...]
    provenance: tuple[str, ...]

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        n, p = self.X.shape
        if p != len(self.schema):
            raise ValueError("matrix width does not match schema")
        if len(self.y) != n or len(self.hashes) != n or len(self.provenance) != n:
            raise ValueError("row attributes must align with the matrix")
        if not set(np.unique(self.y)) <= {0, 1}:
            raise ValueError("labels must be 0/1")

    @classmethod
    def from_vectors(
        cls, schema: FeatureSchema, vectors: Sequence[FeatureVector]
    ) -> "Dataset":
        unlabeled = [v.commit_hash for v in vectors if v.label is None]
        if unlabeled:
            raise DataError(f"unlabeled rows in dataset: {unlabeled[:5]}")
        return cls(
            schema=schema,
            X=np.array([v.values for v in vectors], dtype=float),
            y=np.array([v.label for v in vectors], dtype=int),
            hashes=tuple(v.commit_hash for v in vectors),
            provenance=tuple(REAL for _ in vectors),
        )

    @property
    def n_rows(self) -> int:
        return len(self.y)

    def select_groups(self, groups: Iterable[str]) -> "Dataset":
        idx = self.schema.indices_for(groups)
        sub_schema = FeatureSchema(
            names=tuple(self.schema.names[i] for i in idx),
            groups=tuple(self.schema.groups[i] for i in idx),
        )
        return Dataset(
            schema=sub_schema,
            X=self.X[:, idx],
            y=self.y.copy(),
            hashes=self.hashes,
            provenance=self.provenance,
        )


@dataclass(frozen=True)
class SmoteParams:
    k_neighbors: int = 5
    target_ratio: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if not 0 < self.target_ratio <= 1:
            raise ValueError("target_ratio must be in (0, 1]")


def standardize_stats(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column means and scales (population std; zero-variance columns scale 1)."""
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale == 0, 1.0, scale)
    return mean, scale


def smote(dataset: Dataset, params: SmoteParams) -> Dataset:
    """Oversample the minority class with synthetic interpolated rows.

    Each synthetic row is x + u * (z - x) for a seeded random minority row x,
    one of its k nearest minority neighbors z (Euclidean distance on
    standardized copies), and u uniform in [0, 1]. Rows are synthesized until
    minority/majority >= target_ratio.
    """
    counts = np.bincount(dataset.y, minlength=2)
    minority_label = int(np.argmin(counts))
    majority_label = 1 - minority_label
    n_min, n_maj = int(counts[minority_label]), int(counts[majority_label])
    if n_min < 2:
        raise DataError("insufficient minority samples for SMOTE (need >= 2)")
    needed = max(0, math.ceil(params.target_ratio * n_maj) - n_min)
    if needed == 0:
        return dataset

    min_idx = np.flatnonzero(dataset.y == minority_label)
    X_min = dataset.X[min_idx]
    mean, scale = standardize_stats(dataset.X)
    Z = (X_min - mean) / scale

    # pairwise distances among minority rows on the standardized copies
    sq = ((Z[:, None, :] - Z[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(sq, np.inf)
    k = min(params.k_neighbors, n_min - 1)
    neighbor_lists = [
        np.argsort(sq[i], kind="stable")[:k] for i in range(n_min)
    ]

    rng = np.random.Generator(np.random.PCG64(params.seed))
    synth_rows = np.empty((needed, dataset.X.shape[1]))
    for row in range(needed):
        i = int(rng.integers(0, n_min))
        z = int(neighbor_lists[i][int(rng.integers(0, k))])
        u = rng.random()
        synth_rows[row] = X_min[i] + u * (X_min[z] - X_min[i])

    return Dataset(
        schema=dataset.schema,
        X=np.vstack([dataset.X, synth_rows]),
        y=np.concatenate([dataset.y, np.full(needed, minority_label, dtype=int)]),
        hashes=dataset.hashes + tuple(f"synthetic-{i}" for i in range(needed)),
        provenance=dataset.provenance + tuple(SYNTHETIC for _ in range(needed)),
    )


# ---------------------------------------------------------------------------
# Gaussian naive Bayes
# ---------------------------------------------------------------------------


@dataclass
class GaussianNBModel:
    priors: np.ndarray        # (2,)
    means: np.ndarray         # (2, p)
    variances: np.ndarray     # (2, p), smoothing included
    n_features: int


def train_nb(dataset: Dataset) -> GaussianNBModel:
    """Maximum-likelihood per-label Gaussians with variance smoothing."""
    counts = np.bincount(dataset.y, minlength=2)
    if counts.min() < 1:
        raise DataError("naive Bayes needs at least one row per label")
    p = dataset.X.shape[1]
    means = np.zeros((2, p))
    variances = np.zeros((2, p))
    for label in (0, 1):
        rows = dataset.X[dataset.y == label]
        means[label] = rows.mean(axis=0)
        variances[label] = rows.var(axis=0)
    max_var = float(dataset.X.var(axis=0).max()) if p else 0.0
    epsilon = 1e-9 * max_var if max_var > 0 else 1e-12
    variances += epsilon
    return GaussianNBModel(
        priors=counts / counts.sum(), means=means, variances=variances, n_features=p
    )


def _nb_posteriors(model: GaussianNBModel, x: np.ndarray) -> np.ndarray:
    log_joint = np.empty(2)
    for label in (0, 1):
        var = model.variances[label]
        log_density = -0.5 * (
            np.log(2.0 * np.pi * var) + (x - model.means[label]) ** 2 / var
        ).sum()
        log_joint[label] = math.log(model.priors[label]) + log_density
    log_joint -= log_joint.max()
    probs = np.exp(log_joint)
    return probs / probs.sum()


# ---------------------------------------------------------------------------
# Random forest
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int | None = None
    min_samples_leaf: int = 1
    features_per_split: int | None = None  # default: ceil(sqrt(p))
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1 or self.min_samples_leaf < 1:
            raise ValueError("invalid forest parameters")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 when set")


@dataclass
class RandomForestModel:
    trees: list[dict]
    params: ForestParams
    n_features: int


def _leaf(y: np.ndarray) -> dict:
    return {"leaf": [int((y == 0).sum()), int((y == 1).sum())]}


def _best_split(
    X: np.ndarray, y: np.ndarray, feature_ids: np.ndarray, min_leaf: int
) -> tuple[int, float] | None:
    """Lowest weighted Gini split over the candidate features.

    Thresholds are midpoints between consecutive distinct sorted values;
    deterministic tie-breaking keeps the first best split in feature-draw
    order and ascending threshold order.
    """
    n = len(y)
    best: tuple[float, int, float] | None = None
    total_ones = int(y.sum())
    for f in feature_ids:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ones = np.cumsum(y[order])
        # split after position i (0-based): left = i+1 rows
        idx = np.arange(n - 1)
        valid = xs[idx] < xs[idx + 1]
        left_n = idx + 1
        valid &= (left_n >= min_leaf) & (n - left_n >= min_leaf)
        if not valid.any():
            continue
        left_ones = ones[idx]
        right_ones = total_ones - left_ones
        right_n = n - left_n
        gini_left = 1.0 - (left_ones**2 + (left_n - left_ones) ** 2) / left_n**2
        gini_right = 1.0 - (right_ones**2 + (right_n - right_ones) ** 2) / right_n**2
        weighted = (left_n * gini_left + right_n * gini_right) / n
        weighted[~valid] = np.inf
        pos = int(np.argmin(weighted))
        if best is None or weighted[pos] < best[0]:
            threshold = (xs[pos] + xs[pos + 1]) / 2.0
            best = (float(weighted[pos]), int(f), threshold)
    if best is None:
        return None
    return best[1], best[2]


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    rng: np.random.Generator,
    m_features: int,
    max_depth: int | None,
    min_leaf: int,
    depth: int = 0,
) -> dict:
    if (
        len(np.unique(y)) == 1
        or len(y) < 2 * min_leaf
        or (max_depth is not None and depth >= max_depth)
    ):
        return _leaf(y)
    p = X.shape[1]
    feature_ids = rng.choice(p, size=min(m_features, p), replace=False)
    split = _best_split(X, y, feature_ids, min_leaf)
    if split is None:
        return _leaf(y)
    f, threshold = split
    mask = X[:, f] <= threshold
    return {
        "f": f,
        "t": threshold,
        "l": _grow_tree(X[mask], y[mask], rng, m_features, max_depth, min_leaf, depth + 1),
        "r": _grow_tree(X[~mask], y[~mask], rng, m_features, max_depth, min_leaf, depth + 1),
    }


def train_rf(dataset: Dataset, params: ForestParams) -> RandomForestModel:
    """Bootstrap-aggregated Gini decision trees with per-tree derived seeds."""
    counts = np.bincount(dataset.y, minlength=2)
    if counts.min() < 2:
        raise DataError("random forest needs at least two rows per label")
    n, p = dataset.X.shape
    m = params.features_per_split or math.ceil(math.sqrt(p))
    trees = []
    for t in range(params.n_trees):
        rng = np.random.Generator(np.random.PCG64(derive_seed(params.seed, "tree", t)))
        sample = rng.integers(0, n, size=n)
        trees.append(
            _grow_tree(
                dataset.X[sample],
                dataset.y[sample],
                rng,
                m,
                params.max_depth,
                params.min_samples_leaf,
            )
        )
    return RandomForestModel(trees=trees, params=params, n_features=p)


def _tree_vote(node: dict, x: np.ndarray) -> int:
    while "leaf" not in node:
        node = node["l"] if x[node["f"]] <= node["t"] else node["r"]
    n0, n1 = node["leaf"]
    return 1 if n1 > n0 else 0


# ---------------------------------------------------------------------------
# Prediction
# ---------------------------------------------------------------------------


def predict(
    model: GaussianNBModel | RandomForestModel, vector: np.ndarray
) -> tuple[int, float]:
    """(label, positive score); ties predict the non-influential label 0."""
    x = np.asarray(vector, dtype=float)
    if x.shape != (model.n_features,):
        raise DataError(
            f"feature vector of length {x.shape} does not match model "
            f"({model.n_features} features)"
        )
    if isinstance(model, GaussianNBModel):
        posteriors = _nb_posteriors(model, x)
        score = float(posteriors[1])
        return (1 if posteriors[1] > posteriors[0] else 0), score
    votes = sum(_tree_vote(tree, x) for tree in model.trees)
    score = votes / len(model.trees)
    return (1 if votes > len(model.trees) - votes else 0), float(score)


def predict_batch(
    model: GaussianNBModel | RandomForestModel, X: np.ndarray
) -> np.ndarray:
    return np.array([predict(model, row)[0] for row in np.asarray(X, dtype=float)])


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


@dataclass
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def swapped(self) -> "ConfusionMatrix":
        """The same counts with label 0 treated as the positive class."""
        return ConfusionMatrix(tp=self.tn, fp=self.fn, tn=self.tp, fn=self.fp)

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def prf_metrics(confusion: ConfusionMatrix) -> tuple[float, float, float]:
    """Precision, recall, and F-measure for the positive class; 0/0 -> 0."""
    tp, fp, fn = confusion.tp, confusion.fp, confusion.fn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f_measure = (
        2 * precision * recall / (precision + recall) if precision + recall else 0.0
    )
    return precision, recall, f_measure


def confusion_from_predictions(y_true: np.ndarray, y_pred: np.ndarray) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    return ConfusionMatrix(
        tp=int(((y_true == 1) & (y_pred == 1)).sum()),
        fp=int(((y_true == 0) & (y_pred == 1)).sum()),
        tn=int(((y_true == 0) & (y_pred == 0)).sum()),
        fn=int(((y_true == 1) & (y_pred == 0)).sum()),
    )


# ---------------------------------------------------------------------------
# Folds and cross-validation
# ---------------------------------------------------------------------------


def stratified_folds(dataset: Dataset, k: int = 10, seed: int = 0) -> np.ndarray:
    """Fold index per row: seeded shuffle within each label, round-robin spread.

    The effective fold count is min(k, count of the rarer label); a warning is
    emitted when reduced.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    counts = np.bincount(dataset.y, minlength=2)
    if counts.min() < 2:
        raise DataError("each label needs at least 2 rows for stratified folds")
    k_eff = min(k, int(counts.min()))
    if k_eff < k:
        warnings.warn(
            f"reducing folds from {k} to {k_eff} (rarer label has {counts.min()} rows)",
            UserWarning,
            stacklevel=2,
        )
    rng = np.random.Generator(np.random.PCG64(derive_seed(seed, "folds")))
    folds = np.empty(dataset.n_rows, dtype=int)
    for label in (0, 1):
        idx = np.flatnonzero(dataset.y == label)
        rng.shuffle(idx)
        folds[idx] = np.arange(len(idx)) % k_eff
    return folds


@dataclass
class EvalReport:
    """Cross-validation outcome for one algorithm and feature-group choice."""

    algorithm: str
    seed: int
    feature_groups: tuple[str, ...]
    fold_confusions: list[ConfusionMatrix]
    aggregate: ConfusionMatrix
    warnings: list[str] = field(default_factory=list)

    def metrics(self) -> dict:
        p1, r1, f1 = prf_metrics(self.aggregate)
        p0, r0, f0 = prf_metrics(self.aggregate.swapped())
        return {
            "influential": {"precision": p1, "recall": r1, "f_measure": f1},
            "non_influential": {"precision": p0, "recall": r0, "f_measure": f0},
            "macro_f": (f1 + f0) / 2.0,
        }

    def as_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "feature_groups": list(self.feature_groups),
            "folds": [c.as_dict() for c in self.fold_confusions],
            "aggregate": self.aggregate.as_dict(),
            "metrics": self.metrics(),
            "warnings": self.warnings,
        }


def _fit_predict_fold(
    X_train: np.ndarray,
    y_train: np.ndarray,
    X_test: np.ndarray,
    algorithm: str,
    fold_seed: int,
    smote_params: SmoteParams,
    forest_params: ForestParams,
    schema: FeatureSchema,
    train_hashes: tuple[str, ...],
) -> np.ndarray:
    mean, scale = standardize_stats(X_train)
    Xtr = (X_train - mean) / scale
    Xte = (X_test - mean) / scale
    train = Dataset(
        schema=schema,
        X=Xtr,
        y=y_train,
        hashes=train_hashes,
        provenance=tuple(REAL for _ in y_train),
    )
    counts = np.bincount(train.y, minlength=2)
    if counts.min() and counts.min() / counts.max() < smote_params.target_ratio:
        train = smote(train, replace(smote_params, seed=derive_seed(fold_seed, "smote")))
    if algorithm == "nb":
        model = train_nb(train)
    elif algorithm == "rf":
        model = train_rf(
            train, replace(forest_params, seed=derive_seed(fold_seed, "forest"))
        )
    else:
        raise ValueError(f"unknown algorithm {algorithm!r} (expected 'nb' or 'rf')")
    return predict_batch(model, Xte)


def cross_validate(
    dataset: Dataset,
    algorithm: str,
    feature_groups: Iterable[str] | None = None,
    k: int = 10,
    seed: int = 0,
    smote_params: SmoteParams | None = None,
    forest_params: ForestParams | None = None,
) -> EvalReport:
    """Stratified k-fold cross-validation on a fixed feature matrix.

    The standardizer and SMOTE are fit inside each training fold; rows with
    synthetic provenance are never evaluated. For per-fold vocabulary
    rebuilding use :func:`cross_validate_commits`.
    """
    smote_params = smote_params or SmoteParams()
    forest_params = forest_params or ForestParams()
    if feature_groups is not None:
        dataset = dataset.select_groups(feature_groups)
    groups = dataset.schema.enabled_groups
    caught: list[str] = []
    with warnings.catch_warnings(record=True) as caught_warnings:
        warnings.simplefilter("always")
        folds = stratified_folds(dataset, k=k, seed=seed)
    caught.extend(str(w.message) for w in caught_warnings)

    real = np.array([prov == REAL for prov in dataset.provenance])
    fold_confusions = []
    for fold in range(folds.max() + 1):
        test_mask = (folds == fold) & real
        train_mask = folds != fold
        y_pred = _fit_predict_fold(
            dataset.X[train_mask],
            dataset.y[train_mask],
            dataset.X[test_mask],
            algorithm,
            derive_seed(seed, "fold", fold),
            smote_params,
            forest_params,
            dataset.schema,
            tuple(h for h, m in zip(dataset.hashes, train_mask) if m),
        )
        fold_confusions.append(confusion_from_predictions(dataset.y[test_mask], y_pred))

    aggregate = ConfusionMatrix()
    for confusion in fold_confusions:
        aggregate = aggregate + confusion
    return EvalReport(
        algorithm=algorithm,
        seed=seed,
        feature_groups=groups,
        fold_confusions=fold_confusions,
        aggregate=aggregate,
        warnings=caught,
    )


def cross_validate_commits(
    examples: Sequence[CommitExample],
    algorithm: str,
    feature_groups: Iterable[str],
    k: int = 10,
    seed: int = 0,
    smote_params: SmoteParams | None = None,
    forest_params: ForestParams | None = None,
    min_df: int = 2,
    max_terms: int = 500,
) -> EvalReport:
    """Cross-validate from raw commit material, rebuilding the vocabulary,
    standardizer, and SMOTE inside every training fold (no test leakage)."""
    smote_params = smote_params or SmoteParams()
    forest_params = forest_params or ForestParams()
    groups = featurize.normalize_groups(feature_groups)
    labeled = [e for e in examples if e.label is not None]
    if not labeled:
        raise DataError("no labeled examples to cross-validate")
    y = np.array([e.label for e in labeled], dtype=int)

    # fold assignment over a label-only dataset (features do not matter here)
    shell = Dataset(
        schema=FeatureSchema(names=("si_n_files",), groups=("SI",)),
        X=np.zeros((len(labeled), 1)),
        y=y,
        hashes=tuple(e.commit_hash for e in labeled),
        provenance=tuple(REAL for _ in labeled),
    )
    caught: list[str] = []
    with warnings.catch_warnings(record=True) as caught_warnings:
        warnings.simplefilter("always")
        folds = stratified_folds(shell, k=k, seed=seed)
    caught.extend(str(w.message) for w in caught_warnings)

    fold_confusions = []
    for fold in range(folds.max() + 1):
        train_examples = [e for e, f in zip(labeled, folds) if f != fold]
        test_examples = [e for e, f in zip(labeled, folds) if f == fold]
        vocabulary = None
        if "NL" in groups:
            vocabulary = featurize.build_vocabulary(
                [e.message for e in train_examples], min_df=min_df, max_terms=max_terms
            )
        schema, train_vectors = featurize.assemble_examples(
            train_examples, groups, vocabulary
        )
        _, test_vectors = featurize.assemble_examples(test_examples, groups, vocabulary)
        y_pred = _fit_predict_fold(
            np.array([v.values for v in train_vectors]),
            np.array([v.label for v in train_vectors], dtype=int),
            np.array([v.values for v in test_vectors]),
            algorithm,
            derive_seed(seed, "fold", fold),
            smote_params,
            forest_params,
            schema,
            tuple(v.commit_hash for v in train_vectors),
        )
        fold_confusions.append(
            confusion_from_predictions(
                np.array([v.label for v in test_vectors], dtype=int), y_pred
            )
        )

    aggregate = ConfusionMatrix()
    for confusion in fold_confusions:
        aggregate = aggregate + confusion
    return EvalReport(
        algorithm=algorithm,
        seed=seed,
        feature_groups=groups,
        fold_confusions=fold_confusions,
        aggregate=aggregate,
        warnings=caught,
    )


def crossval_all_groups(
    examples: Sequence[CommitExample],
    algorithm: str,
    k: int = 10,
    seed: int = 0,
    combos: Sequence[tuple[str, ...]] | None = None,
    **kwargs,
) -> dict:
    """Evaluation payload with one row per feature-group combination."""
    combos = list(combos) if combos is not None else featurize.group_combinations()
    rows = [
        cross_validate_commits(examples, algorithm, combo, k=k, seed=seed, **kwargs).as_dict()
        for combo in combos
    ]
    return {
        "format_version": 1,
        "algorithm": algorithm,
        "seed": seed,
        "k": k,
        "rows": rows,
    }


# ---------------------------------------------------------------------------
# Trained pipeline model and persistence
# ---------------------------------------------------------------------------


@dataclass
class TrainedModel:
    """A classifier plus everything needed to featurize a new commit."""

    algorithm: str
    feature_groups: tuple[str, ...]
    schema: FeatureSchema
    vocabulary: Vocabulary | None
    standard_mean: np.ndarray
    standard_scale: np.ndarray
    model: GaussianNBModel | RandomForestModel
    seed: int


def train_pipeline(
    examples: Sequence[CommitExample],
    algorithm: str,
    feature_groups: Iterable[str],
    seed: int = 0,
    smote_params: SmoteParams | None = None,
    forest_params: ForestParams | None = None,
    min_df: int = 2,
    max_terms: int = 500,
) -> TrainedModel:
    """Standardize, balance, and train on every labeled example."""
    smote_params = smote_params or SmoteParams()
    forest_params = forest_params or ForestParams()
    groups = featurize.normalize_groups(feature_groups)
    labeled = [e for e in examples if e.label is not None]
    if not labeled:
        raise DataError("no labeled examples to train on")
    vocabulary = None
    if "NL" in groups:
        vocabulary = featurize.build_vocabulary(
            [e.message for e in labeled], min_df=min_df, max_terms=max_terms
        )
    schema, vectors = featurize.assemble_examples(labeled, groups, vocabulary)
    dataset = Dataset.from_vectors(schema, vectors)
    mean, scale = standardize_stats(dataset.X)
    dataset = Dataset(
        schema=schema,
        X=(dataset.X - mean) / scale,
        y=dataset.y,
        hashes=dataset.hashes,
        provenance=dataset.provenance,
    )
    counts = np.bincount(dataset.y, minlength=2)
    if counts.min() >= 2 and counts.min() / counts.max() < smote_params.target_ratio:
        dataset = smote(dataset, replace(smote_params, seed=derive_seed(seed, "smote")))
    if algorithm == "nb":
        model = train_nb(dataset)
    elif algorithm == "rf":
        model = train_rf(dataset, replace(forest_params, seed=derive_seed(seed, "forest")))
    else:
        raise ValueError(f"unknown algorithm {algorithm!r} (expected 'nb' or 'rf')")
    return TrainedModel(
        algorithm=algorithm,
        feature_groups=groups,
        schema=schema,
        vocabulary=vocabulary,
        standard_mean=mean,
        standard_scale=scale,
        model=model,
        seed=seed,
    )


def predict_example(trained: TrainedModel, example: CommitExample) -> tuple[int, float]:
    _, vectors = featurize.assemble_examples(
        [example], trained.feature_groups, trained.vocabulary
    )
    x = (vectors[0].values - trained.standard_mean) / trained.standard_scale
    return predict(trained.model, x)


def model_to_dict(trained: TrainedModel) -> dict:
    if isinstance(trained.model, GaussianNBModel):
        parameters = {
            "priors": trained.model.priors.tolist(),
            "means": trained.model.means.tolist(),
            "variances": trained.model.variances.tolist(),
        }
        params: dict = {}
    else:
        parameters = {"trees": trained.model.trees}
        params = {
            "n_trees": trained.model.params.n_trees,
            "max_depth": trained.model.params.max_depth,
            "min_samples_leaf": trained.model.params.min_samples_leaf,
            "features_per_split": trained.model.params.features_per_split,
        }
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "algorithm": trained.algorithm,
        "feature_groups": list(trained.feature_groups),
        "schema": {
            "names": list(trained.schema.names),
            "groups": list(trained.schema.groups),
        },
        "vocabulary": None
        if trained.vocabulary is None
        else {
            "terms": list(trained.vocabulary.terms),
            "document_frequency": trained.vocabulary.document_frequency,
            "built_from": trained.vocabulary.built_from,
        },
        "standardizer": {
            "mean": trained.standard_mean.tolist(),
            "scale": trained.standard_scale.tolist(),
        },
        "params": params,
        "parameters": parameters,
        "seed": trained.seed,
    }


def model_from_dict(payload: dict) -> TrainedModel:
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise DataError(f"unsupported model format {payload.get('format_version')!r}")
    schema = FeatureSchema(
        names=tuple(payload["schema"]["names"]),
        groups=tuple(payload["schema"]["groups"]),
    )
    vocabulary = None
    if payload.get("vocabulary") is not None:
        vocabulary = Vocabulary(
            terms=tuple(payload["vocabulary"]["terms"]),
            document_frequency={
                k: int(v) for k, v in payload["vocabulary"]["document_frequency"].items()
            },
            built_from=int(payload["vocabulary"]["built_from"]),
        )
    algorithm = payload["algorithm"]
    parameters = payload["parameters"]
    if algorithm == "nb":
        model: GaussianNBModel | RandomForestModel = GaussianNBModel(
            priors=np.array(parameters["priors"]),
            means=np.array(parameters["means"]),
            variances=np.array(parameters["variances"]),
            n_features=len(schema),
        )
    else:
        params = payload.get("params", {})
        model = RandomForestModel(
            trees=parameters["trees"],
            params=ForestParams(
                n_trees=params.get("n_trees", len(parameters["trees"])),
                max_depth=params.get("max_depth"),
                min_samples_leaf=params.get("min_samples_leaf", 1),
                features_per_split=params.get("features_per_split"),
                seed=payload.get("seed", 0),
            ),
            n_features=len(schema),
        )
    return TrainedModel(
        algorithm=algorithm,
        feature_groups=tuple(payload["feature_groups"]),
        schema=schema,
        vocabulary=vocabulary,
        standard_mean=np.array(payload["standardizer"]["mean"]),
        standard_scale=np.array(payload["standardizer"]["scale"]),
        model=model,
        seed=payload.get("seed", 0),
    )


def save_model(trained: TrainedModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(trained), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path: str | Path) -> TrainedModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------


def _combo_label(groups: Sequence[str]) -> str:
    if set(groups) == set(featurize.GROUP_ORDER):
        return "ALL"
    return " ".join(groups)


def render_report(payloads: Sequence[dict], names: Sequence[str] | None = None) -> str:
    """Plain-text evaluation table, one block per project payload.

    Columns give precision/recall/F per label group; a trailing section
    reports the per-project average F-measure for each feature combination,
    alongside the aggregate F of each block.
    """
    names = list(names) if names else [f"project-{i + 1}" for i in range(len(payloads))]
    lines: list[str] = []
    header = (
        f"{'Metrics':<10} "
        f"{'Precision':>9} {'Recall':>9} {'F-Measure':>9}   "
        f"{'Precision':>9} {'Recall':>9} {'F-Measure':>9}"
    )
    for name, payload in zip(names, payloads):
        lines.append(f"== {name} (algorithm={payload['algorithm']}, seed={payload['seed']})")
        lines.append(
            f"{'':<10} {'Influential Class':^29}   {'Non-Influential Class':^29}"
        )
        lines.append(header)
        for row in payload["rows"]:
            metrics = row["metrics"]
            label = _combo_label(row["feature_groups"])
            inf = metrics["influential"]
            non = metrics["non_influential"]
            lines.append(
                f"{label:<10} "
                f"{100 * inf['precision']:>9.1f} {100 * inf['recall']:>9.1f} "
                f"{100 * inf['f_measure']:>9.1f}   "
                f"{100 * non['precision']:>9.1f} {100 * non['recall']:>9.1f} "
                f"{100 * non['f_measure']:>9.1f}"
            )
        lines.append("")

    lines.append("== Per-project average F-measure (influential class)")
    combos: dict[str, list[float]] = {}
    for payload in payloads:
        for row in payload["rows"]:
            label = _combo_label(row["feature_groups"])
            combos.setdefault(label, []).append(
                row["metrics"]["influential"]["f_measure"]
            )
    for label, values in combos.items():
        lines.append(f"{label:<10} {100 * sum(values) / len(values):>9.1f}")
    lines.append("")
    return "\n".join(lines)
