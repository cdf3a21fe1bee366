"""Sampling Bayesian encoding of categorical features.

:class:`SamplingBayesianEncoder` fits one conjugate posterior per (column,
category) pair against a prior scaled from the global target statistics.
``transform`` draws ``k_draws`` independent posterior samples per row and
categorical column and stacks the resulting encoded copies, so N input rows
become K*N output rows (copy-major: output row k*N + n is draw k of input
row n).  Downstream models are trained on the augmented matrix and predictions
are averaged back over the K copies with :func:`predict_average`.

:class:`TargetMeanEncoder` is the deterministic baseline: classic conditional
target-mean encoding with optional leave-one-out fitting and multiplicative
Gaussian noise at train-transform time.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import conjugate as cj
from . import rng
from .base import (
    BaseEstimator,
    TransformerMixin,
    categorical_column,
    check_is_fitted,
    check_matrix,
    check_target,
    numeric_column,
)

MAPPINGS = ("mean_only", "mean_and_precision", "polynomial2", "weight_of_evidence")
UNSEEN_POLICIES = ("sample-from-prior", "prior-mean")
MODES = ("sample", "mean")

_WOE_EPS = 1e-12

MODEL_FORMAT = "sampling-bayes-encoder"
MODEL_VERSION = 1


@dataclass
class EncodedDataset:
    """K*N encoded rows plus their provenance.

    ``origin_row[i]`` is the input row the i-th output row was drawn for and
    ``draw_index[i]`` the copy number k; each input row appears exactly
    ``k_draws`` times.  ``y`` is the target copied from the origin rows when
    one was supplied.
    """

    features: np.ndarray
    feature_names: list[str]
    origin_row: np.ndarray
    draw_index: np.ndarray
    y: np.ndarray | None
    task: str


def _resolve_categorical(X: np.ndarray, categorical_features) -> list[int]:
    if categorical_features == "auto":
        return [j for j in range(X.shape[1]) if isinstance(X[0, j], str)]
    idx = sorted(int(j) for j in categorical_features)
    for j in idx:
        if not 0 <= j < X.shape[1]:
            raise ValueError(f"categorical feature index {j} out of range")
    return idx


def _mapping_names(col: str, mapping: str, task: str, n_classes: int | None) -> list[str]:
    if task == "binary":
        return {
            "mean_only": [f"{col}__p"],
            "mean_and_precision": [f"{col}__p", f"{col}__precision"],
            "polynomial2": [f"{col}__p", f"{col}__p2"],
            "weight_of_evidence": [f"{col}__woe"],
        }[mapping]
    if task == "regression":
        return {
            "mean_only": [f"{col}__mu"],
            "mean_and_precision": [f"{col}__mu", f"{col}__tau"],
            "polynomial2": [
                f"{col}__mu",
                f"{col}__tau",
                f"{col}__mu2",
                f"{col}__tau2",
                f"{col}__mutau",
            ],
        }[mapping]
    m = n_classes - 1  # last simplex component dropped to avoid collinearity
    base = [f"{col}__p{i}" for i in range(m)]
    if mapping == "mean_only":
        return base
    if mapping == "mean_and_precision":
        return base + [f"{col}__precision"]
    names = list(base)
    names += [f"{col}__p{i}2" for i in range(m)]
    names += [f"{col}__p{i}p{j}" for i in range(m) for j in range(i + 1, m)]
    return names


def _poly2(columns: list[np.ndarray]) -> list[np.ndarray]:
    """Degree-2 expansion: components, squares, pairwise products."""
    out = list(columns)
    out += [c * c for c in columns]
    out += [
        columns[i] * columns[j]
        for i in range(len(columns))
        for j in range(i + 1, len(columns))
    ]
    return out


def apply_mapping(
    mapping: str, draw: rng.PosteriorDraw, params: cj.ConjugateParams | None = None
) -> np.ndarray:
    """Map a single posterior draw to its feature vector.

    For ``mean_and_precision`` on binary and multiclass tasks the precision
    feature is the posterior pseudo-count (alpha+beta, or the total Dirichlet
    concentration), which is a property of the posterior rather than of the
    draw, so the posterior ``params`` must be supplied for those pairings.
    """
    if mapping not in MAPPINGS:
        raise ValueError(f"unknown mapping {mapping!r}")
    if draw.task == "binary":
        if mapping == "mean_only":
            return np.array([draw.p])
        if mapping == "polynomial2":
            return np.array([draw.p, draw.p**2])
        if mapping == "weight_of_evidence":
            p = np.clip(draw.p, _WOE_EPS, 1.0 - _WOE_EPS)
            return np.array([np.log(p / (1.0 - p))])
        if params is None:
            raise ValueError("binary mean_and_precision needs the posterior params")
        return np.array([draw.p, params.alpha + params.beta])
    if mapping == "weight_of_evidence":
        raise ValueError("weight_of_evidence is defined for binary tasks only")
    if draw.task == "regression":
        if mapping == "mean_only":
            return np.array([draw.mu])
        if mapping == "mean_and_precision":
            return np.array([draw.mu, draw.tau])
        return np.array(
            [draw.mu, draw.tau, draw.mu**2, draw.tau**2, draw.mu * draw.tau]
        )
    comps = [float(v) for v in np.asarray(draw.pi)[:-1]]
    if mapping == "mean_only":
        return np.array(comps)
    if mapping == "mean_and_precision":
        if params is None:
            raise ValueError("multiclass mean_and_precision needs the posterior params")
        return np.array(comps + [sum(params.alphas)])
    pairs = [
        comps[i] * comps[j] for i in range(len(comps)) for j in range(i + 1, len(comps))
    ]
    return np.array(comps + [c * c for c in comps] + pairs)


class SamplingBayesianEncoder(BaseEstimator, TransformerMixin):
    """Encode categorical columns by sampling per-category conjugate posteriors.

    Parameters
    ----------
    task : {"binary", "multiclass", "regression"}
        Target type; selects the conjugate family (Beta, Dirichlet,
        Normal-Gamma).
    categorical_features : "auto" or sequence of int
        Feature-matrix columns to encode; "auto" treats string-valued columns
        as categorical.  Remaining columns pass through unchanged.
    gamma : float
        Non-negative prior scaling.  0 gives the uninformative prior; larger
        values pull every category towards the global target statistics.
    k_draws : int
        Number of posterior samples per row; ``transform`` emits
        ``k_draws * n_rows`` rows.
    mapping : str
        Feature mapping applied to each draw: ``mean_only``,
        ``mean_and_precision``, ``polynomial2`` or ``weight_of_evidence``
        (binary only).  For binary tasks the precision feature is the
        draw-independent posterior pseudo-count alpha+beta.
    master_seed : int
        Seed of the counter-based draw streams; every (row, column, draw)
        cell has its own stream, so output is reproducible bit-for-bit for
        any thread count.
    unseen_policy : {"sample-from-prior", "prior-mean"}
        Treatment of categories never seen in fit.  Sampling from the
        regression prior repairs the improper prior for the draw only
        (nu -> 1; with gamma = 0 also (alpha, beta) -> (n/2, ssd/2), matching
        the global target precision).
    mode : {"sample", "mean"}
        "mean" replaces every draw by the posterior mean, reducing the
        encoder to deterministic Bayesian target encoding (output is then
        independent of ``k_draws``); intended for baselines and tests.
    """

    def __init__(
        self,
        task: str = "binary",
        categorical_features="auto",
        gamma: float = 0.0,
        k_draws: int = 4,
        mapping: str = "mean_only",
        master_seed: int = 0,
        unseen_policy: str = "sample-from-prior",
        mode: str = "sample",
    ):
        self.task = task
        self.categorical_features = categorical_features
        self.gamma = gamma
        self.k_draws = k_draws
        self.mapping = mapping
        self.master_seed = master_seed
        self.unseen_policy = unseen_policy
        self.mode = mode

    # -- fitting ---------------------------------------------------------

    def _validate_params(self):
        if self.task not in cj.TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.mapping not in MAPPINGS:
            raise ValueError(f"unknown mapping {self.mapping!r}")
        if self.mapping == "weight_of_evidence" and self.task != "binary":
            raise ValueError("weight_of_evidence is defined for binary tasks only")
        if self.unseen_policy not in UNSEEN_POLICIES:
            raise ValueError(f"unknown unseen_policy {self.unseen_policy!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.k_draws < 1:
            raise ValueError("k_draws must be at least 1")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")

    def fit(self, X, y, feature_names: list[str] | None = None):
        self._validate_params()
        X = check_matrix(X)
        y = check_target(y, X.shape[0])
        self.n_features_in_ = X.shape[1]
        self.feature_names_ = (
            list(feature_names)
            if feature_names is not None
            else [f"x{j}" for j in range(X.shape[1])]
        )
        if len(self.feature_names_) != X.shape[1]:
            raise ValueError("feature_names length does not match X")
        self.categorical_idx_ = _resolve_categorical(X, self.categorical_features)
        self.numeric_idx_ = [
            j for j in range(X.shape[1]) if j not in self.categorical_idx_
        ]
        for j in self.numeric_idx_:
            numeric_column(X[:, j], self.feature_names_[j])

        if self.task == "multiclass":
            self.class_order_ = cj.infer_class_order(y)
            if len(self.class_order_) < 2:
                raise ValueError("multiclass target needs at least two classes")
        else:
            self.class_order_ = None
        self.target_summary_ = cj.summarize_target(y, self.task, self.class_order_)
        self.prior_ = cj.scaled_prior(self.target_summary_, self.gamma)

        self.posteriors_ = {}
        self.categories_ = {}
        for j in self.categorical_idx_:
            name = self.feature_names_[j]
            col = categorical_column(X[:, j], name)
            stats = cj.group_category_stats(col, y, self.task, self.class_order_)
            self.posteriors_[name] = {
                v: cj.posterior_update(self.prior_, s) for v, s in stats.items()
            }
            self.categories_[name] = list(stats)
        return self

    # -- per-column draw kernels ------------------------------------------

    def _column_param_arrays(self, name: str):
        posts = self.posteriors_[name]
        cats = self.categories_[name]
        if self.task == "binary":
            alpha = np.array([posts[c].alpha for c in cats])
            beta = np.array([posts[c].beta for c in cats])
            return {"alpha": alpha, "beta": beta}
        if self.task == "regression":
            return {
                "mu0": np.array([posts[c].mu0 for c in cats]),
                "nu": np.array([posts[c].nu for c in cats]),
                "alpha": np.array([posts[c].alpha for c in cats]),
                "beta": np.array([posts[c].beta for c in cats]),
            }
        return {"alphas": np.array([posts[c].alphas for c in cats])}

    def _repaired_prior_regression(self) -> cj.NormalGammaParams:
        """Proper stand-in for the (possibly improper) regression prior."""
        prior = self.prior_
        nu = prior.nu if prior.nu > 0 else 1.0
        if prior.alpha > 0 and prior.beta > 0:
            return cj.NormalGammaParams(prior.mu0, nu, prior.alpha, prior.beta)
        s = self.target_summary_
        ssd = max(s.sum_sq_dev, 1e-12)
        return cj.NormalGammaParams(prior.mu0, nu, s.n / 2.0, ssd / 2.0)

    def _encode_column_block(self, name, col_idx, codes, ks, row_ids, sample, draw_seed):
        """Feature columns for one categorical column over the given cells.

        codes: per-cell category index (-1 for unseen); ks/row_ids: per-cell
        draw index and origin row; sample: False for mean mode.
        """
        params = self._column_param_arrays(name)
        unseen = codes < 0
        safe = np.where(unseen, 0, codes)
        use_prior_mean = unseen & (self.unseen_policy == "prior-mean")

        if self.task == "binary":
            alpha = params["alpha"][safe]
            beta = params["beta"][safe]
            alpha[unseen] = self.prior_.alpha
            beta[unseen] = self.prior_.beta
            if sample:
                keys = rng.derive_key(draw_seed, col_idx, row_ids, ks)
                ctrs = np.zeros(keys.shape, dtype=np.uint64)
                p = rng.beta_draws(keys, ctrs, alpha, beta)
            else:
                p = alpha / (alpha + beta)
            p = np.where(use_prior_mean, self.prior_.alpha / (self.prior_.alpha + self.prior_.beta), p)
            if self.mapping == "mean_only":
                return [p]
            if self.mapping == "mean_and_precision":
                return [p, alpha + beta]
            if self.mapping == "polynomial2":
                return [p, p * p]
            q = np.clip(p, _WOE_EPS, 1.0 - _WOE_EPS)
            return [np.log(q / (1.0 - q))]

        if self.task == "regression":
            mu0 = params["mu0"][safe]
            nu = params["nu"][safe]
            alpha = params["alpha"][safe]
            beta = params["beta"][safe]
            if unseen.any():
                rep = self._repaired_prior_regression()
                mu0[unseen] = rep.mu0
                nu[unseen] = rep.nu
                alpha[unseen] = rep.alpha
                beta[unseen] = rep.beta
            if sample:
                keys = rng.derive_key(draw_seed, col_idx, row_ids, ks)
                ctrs = np.zeros(keys.shape, dtype=np.uint64)
                mu, tau = rng.normal_gamma_draws(keys, ctrs, mu0, nu, alpha, beta)
            else:
                mu, tau = mu0, alpha / beta
            if use_prior_mean.any():
                prior = self.prior_
                s = self.target_summary_
                pm_tau = (
                    prior.alpha / prior.beta
                    if prior.alpha > 0 and prior.beta > 0
                    else s.n / max(s.sum_sq_dev, 1e-12)
                )
                mu = np.where(use_prior_mean, prior.mu0, mu)
                tau = np.where(use_prior_mean, pm_tau, tau)
            if self.mapping == "mean_only":
                return [mu]
            if self.mapping == "mean_and_precision":
                return [mu, tau]
            return _poly2([mu, tau])

        alphas = params["alphas"][safe]
        prior_alphas = np.asarray(self.prior_.alphas, dtype=np.float64)
        alphas[unseen] = prior_alphas
        if sample:
            keys = rng.derive_key(draw_seed, col_idx, row_ids, ks)
            ctrs = np.zeros(keys.shape, dtype=np.uint64)
            pi = rng.dirichlet_draws(keys, ctrs, alphas)
        else:
            pi = alphas / alphas.sum(axis=1, keepdims=True)
        if use_prior_mean.any():
            pi[use_prior_mean] = prior_alphas / prior_alphas.sum()
        comps = [pi[:, i] for i in range(len(self.class_order_) - 1)]
        if self.mapping == "mean_only":
            return comps
        if self.mapping == "mean_and_precision":
            return comps + [alphas.sum(axis=1)]
        return _poly2(comps)

    # -- transform ---------------------------------------------------------

    def get_feature_names_out(self) -> list[str]:
        check_is_fitted(self, "posteriors_")
        names = [self.feature_names_[j] for j in self.numeric_idx_]
        n_classes = len(self.class_order_) if self.class_order_ else None
        for j in self.categorical_idx_:
            names += _mapping_names(
                self.feature_names_[j], self.mapping, self.task, n_classes
            )
        return names

    def _codes_for(self, name: str, col: np.ndarray) -> np.ndarray:
        index = {v: i for i, v in enumerate(self.categories_[name])}
        return np.array([index.get(v, -1) for v in col], dtype=np.int64)

    def transform_augment(
        self, X, y=None, k_draws: int | None = None, seed: int | None = None, threads: int = 1
    ) -> EncodedDataset:
        """Encode X into K stacked copies with draw provenance."""
        check_is_fitted(self, "posteriors_")
        X = check_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} columns, the encoder was fitted on {self.n_features_in_}"
            )
        k = int(self.k_draws if k_draws is None else k_draws)
        if k < 1:
            raise ValueError("k_draws must be at least 1")
        n = X.shape[0]
        names = self.get_feature_names_out()
        out = np.empty((k * n, len(names)), dtype=np.float64)

        numeric_block = np.column_stack(
            [numeric_column(X[:, j], self.feature_names_[j]) for j in self.numeric_idx_]
        ) if self.numeric_idx_ else np.empty((n, 0))
        col_codes = {}
        for j in self.categorical_idx_:
            name = self.feature_names_[j]
            col = categorical_column(X[:, j], name)
            col_codes[j] = self._codes_for(name, col)

        sample = self.mode == "sample"
        draw_seed = self.master_seed if seed is None else int(seed)

        def encode_rows(lo: int, hi: int) -> None:
            rows = np.arange(lo, hi)
            m = hi - lo
            row_ids = np.tile(rows, k)
            ks = np.repeat(np.arange(k), m)
            blocks = [np.repeat(numeric_block[lo:hi][None, :, :], k, axis=0).reshape(k * m, -1)]
            for j in self.categorical_idx_:
                codes = np.tile(col_codes[j][lo:hi], k)
                cols = self._encode_column_block(
                    self.feature_names_[j], j, codes, ks, row_ids, sample, draw_seed
                )
                blocks.append(np.column_stack(cols))
            block = np.hstack(blocks)
            for kk in range(k):
                out[kk * n + lo : kk * n + hi] = block[kk * m : (kk + 1) * m]

        if threads <= 1 or n < 2 * threads:
            encode_rows(0, n)
        else:
            bounds = np.linspace(0, n, threads + 1).astype(int)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futs = [
                    pool.submit(encode_rows, int(a), int(b))
                    for a, b in zip(bounds[:-1], bounds[1:])
                    if a < b
                ]
                for f in futs:
                    f.result()

        origin = np.tile(np.arange(n), k)
        draws = np.repeat(np.arange(k), n)
        y_out = None
        if y is not None:
            y_arr = check_target(y, n)
            y_out = np.tile(y_arr, k)
        return EncodedDataset(
            features=out,
            feature_names=names,
            origin_row=origin,
            draw_index=draws,
            y=y_out,
            task=self.task,
        )

    def transform(self, X, k_draws: int | None = None, seed: int | None = None, threads: int = 1) -> np.ndarray:
        return self.transform_augment(X, None, k_draws, seed, threads).features

    def fit_transform(self, X, y, **kwargs):
        return self.fit(X, y).transform(X, **kwargs)

    # -- serialization ------------------------------------------------------

    def to_document(self) -> dict:
        check_is_fitted(self, "posteriors_")
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "task": self.task,
            "config": {
                "gamma": self.gamma,
                "k_draws": self.k_draws,
                "mapping": self.mapping,
                "master_seed": self.master_seed,
                "unseen_policy": self.unseen_policy,
                "mode": self.mode,
            },
            "schema": {
                "feature_names": self.feature_names_,
                "categorical_features": self.categorical_idx_,
            },
            "class_order": self.class_order_,
            "target_summary": _summary_doc(self.target_summary_),
            "prior": _params_doc(self.prior_),
            "columns": {
                name: {
                    "category_order": self.categories_[name],
                    "categories": {
                        v: _params_doc(p) for v, p in self.posteriors_[name].items()
                    },
                }
                for name in sorted(self.posteriors_)
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, indent=2) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def from_document(cls, doc: dict) -> "SamplingBayesianEncoder":
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError("not a sampling-bayes-encoder document")
        if doc.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')!r}")
        cfg = doc["config"]
        enc = cls(
            task=doc["task"],
            categorical_features=doc["schema"]["categorical_features"],
            gamma=cfg["gamma"],
            k_draws=cfg["k_draws"],
            mapping=cfg["mapping"],
            master_seed=cfg["master_seed"],
            unseen_policy=cfg["unseen_policy"],
            mode=cfg["mode"],
        )
        enc.feature_names_ = list(doc["schema"]["feature_names"])
        enc.n_features_in_ = len(enc.feature_names_)
        enc.categorical_idx_ = list(doc["schema"]["categorical_features"])
        enc.numeric_idx_ = [
            j for j in range(enc.n_features_in_) if j not in enc.categorical_idx_
        ]
        enc.class_order_ = doc["class_order"]
        enc.target_summary_ = _summary_from_doc(doc["target_summary"], doc["task"])
        enc.prior_ = _params_from_doc(doc["prior"])
        enc.posteriors_ = {}
        enc.categories_ = {}
        for name, block in doc["columns"].items():
            enc.categories_[name] = list(block["category_order"])
            enc.posteriors_[name] = {
                v: _params_from_doc(block["categories"][v])
                for v in block["category_order"]
            }
        return enc

    @classmethod
    def load(cls, path) -> "SamplingBayesianEncoder":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_document(json.load(fh))


def predict_average(
    encoder: SamplingBayesianEncoder,
    predict_fn,
    X,
    k_draws: int | None = None,
    seed: int | None = None,
    threads: int = 1,
) -> np.ndarray:
    """Average ``predict_fn`` over K encoded copies of X, per origin row.

    ``predict_fn`` receives the (K*N, F) encoded matrix and must return an
    array whose leading dimension is K*N (predictions or class
    probabilities).  The arithmetic mean over the K copies is returned; for
    classifiers take the argmax after averaging.
    """
    enc = encoder.transform_augment(X, None, k_draws, seed, threads)
    k = int(enc.draw_index.max()) + 1
    n = enc.features.shape[0] // k
    out = np.asarray(predict_fn(enc.features), dtype=np.float64)
    if out.shape[0] != k * n:
        raise ValueError(
            f"predict_fn returned {out.shape[0]} rows for {k * n} encoded rows"
        )
    return out.reshape((k, n) + out.shape[1:]).mean(axis=0)


# --- serialization helpers ----------------------------------------------------


def _params_doc(params) -> dict:
    if isinstance(params, cj.BetaParams):
        return {"family": "beta", "alpha": params.alpha, "beta": params.beta}
    if isinstance(params, cj.DirichletParams):
        return {"family": "dirichlet", "alphas": list(params.alphas)}
    return {
        "family": "normal_gamma",
        "mu0": params.mu0,
        "nu": params.nu,
        "alpha": params.alpha,
        "beta": params.beta,
    }


def _params_from_doc(doc: dict):
    fam = doc["family"]
    if fam == "beta":
        return cj.BetaParams(doc["alpha"], doc["beta"])
    if fam == "dirichlet":
        return cj.DirichletParams(tuple(doc["alphas"]))
    if fam == "normal_gamma":
        return cj.NormalGammaParams(doc["mu0"], doc["nu"], doc["alpha"], doc["beta"])
    raise ValueError(f"unknown parameter family {fam!r}")


def _summary_doc(s: cj.TargetSummary) -> dict:
    return {
        "n": s.n,
        "sum_y": s.sum_y,
        "class_counts": list(s.class_counts) if s.class_counts else None,
        "mean": s.mean,
        "sum_sq_dev": s.sum_sq_dev,
    }


def _summary_from_doc(doc: dict, task: str) -> cj.TargetSummary:
    return cj.TargetSummary(
        task=task,
        n=doc["n"],
        sum_y=doc["sum_y"],
        class_counts=tuple(doc["class_counts"]) if doc["class_counts"] else None,
        mean=doc["mean"],
        sum_sq_dev=doc["sum_sq_dev"],
    )


class TargetMeanEncoder(BaseEstimator):
    """Deterministic target-mean baseline with optional leave-one-out fitting.

    Categorical columns are replaced in place by the conditional target mean
    of their category.  With ``leave_one_out=True``, ``fit_transform``
    excludes each row's own target from its encoding (singleton categories
    fall back to the global mean).  ``sigma > 0`` applies multiplicative
    Gaussian noise ``value * (1 + N(0, sigma^2))`` during ``fit_transform``
    only; plain ``transform`` (prediction time) is always noise-free and uses
    the full category means.  Binary and regression targets only.
    """

    def __init__(
        self,
        sigma: float = 0.0,
        leave_one_out: bool = False,
        master_seed: int = 0,
        categorical_features="auto",
    ):
        self.sigma = sigma
        self.leave_one_out = leave_one_out
        self.master_seed = master_seed
        self.categorical_features = categorical_features

    def fit(self, X, y, feature_names: list[str] | None = None):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        X = check_matrix(X)
        y = np.asarray(check_target(y, X.shape[0]), dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.feature_names_ = (
            list(feature_names)
            if feature_names is not None
            else [f"x{j}" for j in range(X.shape[1])]
        )
        self.categorical_idx_ = _resolve_categorical(X, self.categorical_features)
        self.global_mean_ = float(y.mean())
        self.sums_ = {}
        self.counts_ = {}
        for j in self.categorical_idx_:
            name = self.feature_names_[j]
            col = categorical_column(X[:, j], name)
            sums: dict = {}
            counts: dict = {}
            for v, t in zip(col, y):
                sums[v] = sums.get(v, 0.0) + float(t)
                counts[v] = counts.get(v, 0) + 1
            self.sums_[j] = sums
            self.counts_[j] = counts
        return self

    def _encoded_matrix(self, X, y=None, noise: bool = False) -> np.ndarray:
        out = np.empty(X.shape, dtype=np.float64)
        for j in range(X.shape[1]):
            if j not in self.categorical_idx_:
                out[:, j] = numeric_column(X[:, j], self.feature_names_[j])
                continue
            sums = self.sums_[j]
            counts = self.counts_[j]
            col = X[:, j]
            if y is None:
                enc = np.array(
                    [
                        sums[v] / counts[v] if v in counts else self.global_mean_
                        for v in col
                    ]
                )
            else:
                enc = np.empty(X.shape[0])
                for i, v in enumerate(col):
                    c = counts.get(v, 0)
                    if self.leave_one_out:
                        if c <= 1:
                            enc[i] = self.global_mean_
                        else:
                            enc[i] = (sums[v] - y[i]) / (c - 1)
                    else:
                        enc[i] = sums[v] / c if c else self.global_mean_
            if noise and self.sigma > 0:
                keys = rng.derive_key(self.master_seed, j, np.arange(X.shape[0]), 0)
                ctrs = np.zeros(keys.shape, dtype=np.uint64)
                z = rng.normal_draws(keys, ctrs)
                enc = enc * (1.0 + self.sigma * z)
            out[:, j] = enc
        return out

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "sums_")
        X = check_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} columns, the encoder was fitted on {self.n_features_in_}"
            )
        return self._encoded_matrix(X)

    def fit_transform(self, X, y, feature_names: list[str] | None = None) -> np.ndarray:
        self.fit(X, y, feature_names)
        X = check_matrix(X)
        y = np.asarray(check_target(y, X.shape[0]), dtype=np.float64)
        return self._encoded_matrix(X, y, noise=True)

    def get_feature_names_out(self) -> list[str]:
        check_is_fitted(self, "sums_")
        return list(self.feature_names_)
