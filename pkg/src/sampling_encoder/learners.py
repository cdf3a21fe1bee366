"""Minimal in-repo learners: ridge, logistic regression and a random forest.

These exist so end-to-end encoder experiments run without an external ML
stack.  The forest is a CART ensemble with Gini impurity, per-tree bootstrap
over the (augmented) training rows, a random feature subset per split and
impurity-decrease feature importances.  Split candidates are quantile bin
edges (up to ``max_bins`` per feature), which keeps split search vectorised.

All randomness flows through per-tree streams derived from ``master_seed``,
so training is deterministic for any tree-level parallelism.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .base import BaseEstimator, check_is_fitted, check_numeric_matrix, check_target, clone
from .encoder import SamplingBayesianEncoder, TargetMeanEncoder, predict_average


class RidgeRegressor(BaseEstimator):
    """Linear regression via normal equations with an L2 penalty on the
    coefficients (intercept unpenalised)."""

    def __init__(self, l2: float = 0.0):
        self.l2 = l2

    def fit(self, X, y):
        X = check_numeric_matrix(X)
        y = np.asarray(check_target(y, X.shape[0]), dtype=np.float64)
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")
        Z = np.hstack([np.ones((X.shape[0], 1)), X])
        penalty = np.eye(Z.shape[1]) * self.l2
        penalty[0, 0] = 0.0
        gram = Z.T @ Z + penalty
        try:
            coef = np.linalg.solve(gram, Z.T @ y)
        except np.linalg.LinAlgError:
            raise np.linalg.LinAlgError(
                "normal equations are singular (collinear features); "
                "set l2 > 0 to regularise"
            ) from None
        self.intercept_ = float(coef[0])
        self.coef_ = coef[1:]
        self.feature_stds_ = X.std(axis=0)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "coef_")
        X = check_numeric_matrix(X)
        return X @ self.coef_ + self.intercept_

    @property
    def feature_importances_(self) -> np.ndarray:
        """Normalised |standardised coefficient| proxy."""
        check_is_fitted(self, "coef_")
        raw = np.abs(self.coef_ * self.feature_stds_)
        total = raw.sum()
        return raw / total if total > 0 else raw


class LogisticClassifier(BaseEstimator):
    """Full-batch gradient-descent logistic regression.

    The loss is averaged per row, so duplicating the training set (as the
    sampling encoder's augmentation does) leaves the effective L2 strength
    unchanged.  Training stops when the gradient max-norm drops below 1e-6
    or after ``epochs`` passes.
    """

    _GRAD_TOL = 1e-6

    def __init__(self, learning_rate: float = 0.5, epochs: int = 2000, l2: float = 0.0):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2 = l2

    def fit(self, X, y):
        X = check_numeric_matrix(X)
        y = np.asarray(check_target(y, X.shape[0]), dtype=np.float64)
        if not np.isin(y, (0.0, 1.0)).all():
            raise ValueError("logistic regression needs a 0/1 target")
        n, p = X.shape
        w = np.zeros(p)
        b = 0.0
        for _ in range(self.epochs):
            z = X @ w + b
            prob = 1.0 / (1.0 + np.exp(-z))
            err = prob - y
            grad_w = X.T @ err / n + self.l2 * w
            grad_b = float(err.mean())
            if max(np.abs(grad_w).max(initial=0.0), abs(grad_b)) < self._GRAD_TOL:
                break
            w -= self.learning_rate * grad_w
            b -= self.learning_rate * grad_b
        self.coef_ = w
        self.intercept_ = b
        self.classes_ = np.array([0.0, 1.0])
        self.feature_stds_ = X.std(axis=0)
        return self

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, "coef_")
        X = check_numeric_matrix(X)
        p = 1.0 / (1.0 + np.exp(-(X @ self.coef_ + self.intercept_)))
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        return self.classes_[(self.predict_proba(X)[:, 1] >= 0.5).astype(int)]

    @property
    def feature_importances_(self) -> np.ndarray:
        check_is_fitted(self, "coef_")
        raw = np.abs(self.coef_ * self.feature_stds_)
        total = raw.sum()
        return raw / total if total > 0 else raw


@dataclass
class _Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    probs: np.ndarray  # (n_nodes, n_classes)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feats = self.feature[node]
            internal = feats >= 0
            if not internal.any():
                return self.probs[node]
            ii = np.nonzero(internal)[0]
            f = feats[internal]
            go_left = X[ii, f] <= self.threshold[node[ii]]
            node[ii] = np.where(go_left, self.left[node[ii]], self.right[node[ii]])


class RandomForestClassifier(BaseEstimator):
    """Small CART/Gini forest with bootstrap and per-split feature subsets."""

    def __init__(
        self,
        n_trees: int = 16,
        max_depth: int = 8,
        min_leaf: int = 5,
        features_per_split="sqrt",
        master_seed: int = 0,
        max_bins: int = 64,
        threads: int = 1,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.features_per_split = features_per_split
        self.master_seed = master_seed
        self.max_bins = max_bins
        self.threads = threads

    def _n_subset(self, p: int) -> int:
        if self.features_per_split is None:
            return p
        if self.features_per_split == "sqrt":
            return max(1, int(np.sqrt(p)))
        m = int(self.features_per_split)
        if not 1 <= m <= p:
            raise ValueError("features_per_split out of range")
        return m

    def fit(self, X, y):
        if self.n_trees < 1 or self.max_depth < 1 or self.min_leaf < 1:
            raise ValueError("n_trees, max_depth and min_leaf must be positive")
        X = check_numeric_matrix(X)
        y = check_target(y, X.shape[0])
        classes, y_codes = np.unique(np.asarray(y), return_inverse=True)
        if classes.shape[0] < 2:
            raise ValueError("training data contains a single class")
        self.classes_ = classes
        n, p = X.shape

        # Split candidates: deduplicated quantile edges per feature.
        edges = []
        order = np.sort(X, axis=0)
        for j in range(p):
            pos = np.ceil(np.arange(1, self.max_bins) * n / self.max_bins).astype(int) - 1
            e = np.unique(order[pos, j])
            e = e[e < order[-1, j]]
            edges.append(e)
        codes = np.empty((n, p), dtype=np.int16)
        for j in range(p):
            codes[:, j] = np.searchsorted(edges[j], X[:, j], side="left")
        self._edges = edges

        def build(t: int):
            return self._grow_tree(
                codes, y_codes.astype(np.int64), classes.shape[0], edges,
                int(rng.derive_key(self.master_seed, 0x7EE, t)),
            )

        if self.threads > 1 and self.n_trees > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                results = list(pool.map(build, range(self.n_trees)))
        else:
            results = [build(t) for t in range(self.n_trees)]
        self.trees_ = [r[0] for r in results]
        imp = np.mean([r[1] for r in results], axis=0)
        total = imp.sum()
        self.feature_importances_ = imp / total if total > 0 else imp
        return self

    def _grow_tree(self, codes, y_codes, n_classes, edges, key):
        stream = rng.RandomStream(key)
        n, p = codes.shape
        boot = stream.integers(n, n)
        bcodes = codes[boot]
        by = y_codes[boot]
        m_sub = self._n_subset(p)

        feature, threshold, left, right, probs = [], [], [], [], []
        importance = np.zeros(p)

        def new_node():
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            probs.append(None)
            return len(feature) - 1

        root = new_node()
        stack = [(root, np.arange(n), 0)]
        while stack:
            node, idx, depth = stack.pop()
            counts = np.bincount(by[idx], minlength=n_classes)
            n_node = idx.shape[0]
            probs[node] = counts / n_node
            node_gini_n = n_node - float(counts @ counts) / n_node  # n * gini
            if (
                depth >= self.max_depth
                or n_node < 2 * self.min_leaf
                or node_gini_n <= 0.0
            ):
                continue
            feats = np.sort(stream.subset(p, m_sub)) if m_sub < p else np.arange(p)
            best = (0.0, -1, -1)  # (n*gini decrease, feature, bin)
            for f in feats:
                nb = edges[f].shape[0] + 1
                if nb < 2:
                    continue
                cnt = np.bincount(
                    bcodes[idx, f].astype(np.int64) * n_classes + by[idx],
                    minlength=nb * n_classes,
                ).reshape(nb, n_classes)
                cum = np.cumsum(cnt, axis=0)[:-1]
                n_left = cum.sum(axis=1)
                valid = (n_left >= self.min_leaf) & (n_node - n_left >= self.min_leaf)
                if not valid.any():
                    continue
                n_right = n_node - n_left
                with np.errstate(invalid="ignore", divide="ignore"):
                    gini_sum = (
                        n_left
                        - np.einsum("bc,bc->b", cum, cum) / n_left
                        + n_right
                        - np.einsum("bc,bc->b", counts - cum, counts - cum) / n_right
                    )
                gini_sum = np.where(valid, gini_sum, np.inf)
                b = int(np.argmin(gini_sum))
                dec = node_gini_n - float(gini_sum[b])
                if dec > best[0] + 1e-12:
                    best = (dec, int(f), b)
            dec, f, b = best
            if f < 0 or dec <= 1e-12:
                continue
            go_left = bcodes[idx, f] <= b
            l_id, r_id = new_node(), new_node()
            feature[node] = f
            threshold[node] = float(edges[f][b])
            left[node] = l_id
            right[node] = r_id
            importance[f] += dec / n
            stack.append((r_id, idx[~go_left], depth + 1))
            stack.append((l_id, idx[go_left], depth + 1))

        tree = _Tree(
            feature=np.array(feature, dtype=np.int64),
            threshold=np.array(threshold, dtype=np.float64),
            left=np.array(left, dtype=np.int64),
            right=np.array(right, dtype=np.int64),
            probs=np.vstack(probs),
        )
        return tree, importance

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, "trees_")
        X = check_numeric_matrix(X)
        acc = np.zeros((X.shape[0], self.classes_.shape[0]))
        for tree in self.trees_:
            acc += tree.predict_proba(X)
        return acc / len(self.trees_)

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


# --- metrics, folds, cross-validation -----------------------------------------


def accuracy(y_true, y_pred) -> float:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    return float(np.mean(y_true == y_pred))


def r2_score(y_true, y_pred) -> float:
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0:
        return 0.0 if ss_res > 0 else 1.0
    return 1.0 - ss_res / ss_tot

METRICS = {"accuracy": accuracy, "r2": r2_score}


def make_folds(y, n_folds: int, seed: int, stratify: bool) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic (seeded) fold assignment; stratified folds interleave
    each class across folds after a seeded shuffle."""
    y = np.asarray(y)
    n = y.shape[0]
    if n_folds < 2:
        raise ValueError("need at least 2 folds")
    stream = rng.RandomStream(int(rng.derive_key(seed, 0xF01D)))
    assignment = np.empty(n, dtype=np.int64)
    if stratify:
        classes, codes = np.unique(y, return_inverse=True)
        smallest = np.bincount(codes).min()
        if smallest < n_folds:
            raise ValueError(
                f"smallest class has {smallest} rows, fewer than {n_folds} folds"
            )
        perm = stream.permutation(n)
        for c in range(classes.shape[0]):
            members = perm[codes[perm] == c]
            assignment[members] = np.arange(members.shape[0]) % n_folds
    else:
        perm = stream.permutation(n)
        assignment[perm] = np.arange(n) % n_folds
    folds = []
    for f in range(n_folds):
        test = np.nonzero(assignment == f)[0]
        train = np.nonzero(assignment != f)[0]
        folds.append((train, test))
    return folds


@dataclass
class CrossValidationResult:
    metric: str
    scores: np.ndarray
    encoder_documents: list[str] | None = None

    @property
    def mean(self) -> float:
        return float(self.scores.mean())

    @property
    def std(self) -> float:
        return float(self.scores.std())


def _fit_predict_fold(encoder, learner, X, y, train, test, threads):
    """Fit encoder+learner on the train rows only, predict the test rows."""
    enc = clone(encoder)
    model = clone(learner)
    Xtr, Xte = X[train], X[test]
    ytr = y[train]
    classifier = hasattr(model, "predict_proba")
    if isinstance(enc, SamplingBayesianEncoder):
        enc.fit(Xtr, ytr)
        encoded = enc.transform_augment(Xtr, ytr, threads=threads)
        model.fit(encoded.features, encoded.y)
        if classifier:
            probs = predict_average(enc, model.predict_proba, Xte, threads=threads)
            pred = model.classes_[np.argmax(probs, axis=1)]
        else:
            pred = predict_average(enc, model.predict, Xte, threads=threads)
    elif isinstance(enc, TargetMeanEncoder):
        F = enc.fit_transform(Xtr, ytr)
        model.fit(F, ytr)
        Fte = enc.transform(Xte)
        if classifier:
            pred = model.classes_[np.argmax(model.predict_proba(Fte), axis=1)]
        else:
            pred = model.predict(Fte)
    else:
        raise TypeError(f"unsupported encoder type {type(enc).__name__}")
    return enc, pred


def cross_validate(
    encoder,
    learner,
    X,
    y,
    folds=5,
    metric: str | None = None,
    seed: int = 0,
    threads: int = 1,
    collect_models: bool = False,
) -> CrossValidationResult:
    """K-fold evaluation of an encoder + learner pipeline.

    The encoder is fitted on each fold's training rows only, so held-out
    targets can never leak into the fold's encoding model.  ``folds`` is a
    fold count (classification folds are stratified, regression folds plain
    seeded splits) or an explicit list of (train_indices, test_indices)
    pairs.
    """
    X = np.asarray(X, dtype=object)
    y = np.asarray(y)
    classifier = hasattr(learner, "predict_proba")
    if metric is None:
        metric = "accuracy" if classifier else "r2"
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}")
    metric_fn = METRICS[metric]
    if isinstance(folds, int):
        fold_list = make_folds(y, folds, seed, stratify=classifier)
    else:
        fold_list = [(np.asarray(tr), np.asarray(te)) for tr, te in folds]
    scores = []
    documents = [] if collect_models else None
    for train, test in fold_list:
        enc, pred = _fit_predict_fold(encoder, learner, X, y, train, test, threads)
        scores.append(metric_fn(y[test], pred))
        if collect_models and isinstance(enc, SamplingBayesianEncoder):
            documents.append(enc.to_json())
    return CrossValidationResult(
        metric=metric, scores=np.array(scores), encoder_documents=documents
    )


# --- feature importance reporting ----------------------------------------------


def origin_feature(name: str) -> str:
    """Origin column of an encoded feature name (``col__suffix`` -> ``col``)."""
    return name.split("__", 1)[0]


@dataclass
class FeatureImportanceReport:
    feature_names: list[str]
    importances: np.ndarray
    grouped: dict[str, float]


def importance_report(model, feature_names: list[str]) -> FeatureImportanceReport:
    """Per-feature importances plus sums grouped by origin column."""
    imp = np.asarray(model.feature_importances_, dtype=np.float64)
    if imp.shape[0] != len(feature_names):
        raise ValueError("importance length does not match feature names")
    grouped: dict[str, float] = {}
    for name, v in zip(feature_names, imp):
        key = origin_feature(name)
        grouped[key] = grouped.get(key, 0.0) + float(v)
    return FeatureImportanceReport(
        feature_names=list(feature_names), importances=imp, grouped=grouped
    )
