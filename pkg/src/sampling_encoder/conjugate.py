"""Conjugate prior/posterior parameter containers and update rules.

Three likelihood families cover the supported prediction tasks:

* binary targets      -> Bernoulli likelihood, Beta prior
* multiclass targets  -> Categorical likelihood, Dirichlet prior
* regression targets  -> Normal likelihood, Normal-Gamma prior on (mean,
  precision)

All containers are frozen dataclasses; updates are pure functions, so the
objects can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

TASKS = ("binary", "multiclass", "regression")

# Floor applied to a degenerate regression posterior rate so that the
# precision stays samplable when an uninformative prior meets a category
# whose targets are constant.
_BETA_FLOOR_SCALE = 1e-9


class ImproperDistributionError(ValueError):
    """Raised when a draw or moment is requested from a non-samplable prior."""


@dataclass(frozen=True)
class BetaParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"Beta parameters must be positive, got {self}")

    @property
    def is_proper(self) -> bool:
        return True


@dataclass(frozen=True)
class DirichletParams:
    alphas: tuple[float, ...]

    def __post_init__(self):
        if len(self.alphas) < 2:
            raise ValueError("Dirichlet needs at least two components")
        if not all(a > 0 for a in self.alphas):
            raise ValueError(f"Dirichlet components must be positive, got {self}")

    @property
    def is_proper(self) -> bool:
        return True


@dataclass(frozen=True)
class NormalGammaParams:
    """Location mu0, pseudo-count nu, shape alpha, rate beta.

    nu = alpha = beta = 0 encodes the uninformative prior; it is stored as-is
    and only sampling from it needs repair (see the encoder's unseen-category
    policy).
    """

    mu0: float
    nu: float
    alpha: float
    beta: float

    def __post_init__(self):
        if self.nu < 0 or self.alpha < 0 or self.beta < 0:
            raise ValueError(f"Normal-Gamma parameters must be non-negative, got {self}")

    @property
    def is_proper(self) -> bool:
        return self.nu > 0 and self.alpha > 0 and self.beta > 0


ConjugateParams = Union[BetaParams, DirichletParams, NormalGammaParams]


@dataclass(frozen=True)
class TargetSummary:
    """Whole-training-set target statistics feeding the scaled prior."""

    task: str
    n: int
    sum_y: float | None = None
    class_counts: tuple[int, ...] | None = None
    mean: float | None = None
    sum_sq_dev: float | None = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.n < 1:
            raise ValueError("summary needs at least one example")
        if self.task == "multiclass" and sum(self.class_counts) != self.n:
            raise ValueError("class counts must sum to n")
        if self.task == "regression" and self.sum_sq_dev < 0:
            raise ValueError("sum of squared deviations cannot be negative")


@dataclass(frozen=True)
class CategoryStats:
    """Per-category sufficient statistics of the target."""

    n: int
    sum_y: float | None = None
    class_counts: tuple[int, ...] | None = None
    mean: float | None = None
    sum_sq_dev: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a category present in training data has n >= 1")


def infer_class_order(y) -> list:
    """Class labels in order of first appearance (fixed at fit time)."""
    seen: dict = {}
    for label in y:
        if label not in seen:
            seen[label] = None
    return list(seen)


def _binary_values(y) -> np.ndarray:
    arr = np.asarray(y, dtype=np.float64)
    if not np.isin(arr, (0.0, 1.0)).all():
        raise ValueError("binary target must contain only 0 and 1")
    return arr


def summarize_target(y, task: str, class_order: list | None = None) -> TargetSummary:
    if task == "binary":
        arr = _binary_values(y)
        return TargetSummary(task=task, n=arr.size, sum_y=float(arr.sum()))
    if task == "multiclass":
        if class_order is None:
            class_order = infer_class_order(y)
        index = {label: i for i, label in enumerate(class_order)}
        counts = np.zeros(len(class_order), dtype=np.int64)
        for label in y:
            counts[index[label]] += 1
        return TargetSummary(task=task, n=int(counts.sum()), class_counts=tuple(int(c) for c in counts))
    if task == "regression":
        arr = np.asarray(y, dtype=np.float64)
        if arr.size == 0:
            raise ValueError("summary needs at least one example")
        mean = float(arr.mean())
        ssd = float(np.sum((arr - mean) ** 2))
        return TargetSummary(task=task, n=arr.size, mean=mean, sum_sq_dev=ssd)
    raise ValueError(f"unknown task {task!r}")


def category_stats(y, task: str, class_order: list | None = None) -> CategoryStats:
    """Sufficient statistics of one category's target values."""
    if task == "binary":
        arr = _binary_values(y)
        return CategoryStats(n=arr.size, sum_y=float(arr.sum()))
    if task == "multiclass":
        if class_order is None:
            raise ValueError("multiclass stats need the fitted class order")
        index = {label: i for i, label in enumerate(class_order)}
        counts = np.zeros(len(class_order), dtype=np.int64)
        for label in y:
            counts[index[label]] += 1
        return CategoryStats(n=int(counts.sum()), class_counts=tuple(int(c) for c in counts))
    if task == "regression":
        arr = np.asarray(y, dtype=np.float64)
        mean = float(arr.mean())
        ssd = float(np.sum((arr - mean) ** 2))
        return CategoryStats(n=arr.size, mean=mean, sum_sq_dev=ssd)
    raise ValueError(f"unknown task {task!r}")


def group_category_stats(values, y, task: str, class_order: list | None = None) -> dict:
    """Category value -> CategoryStats, keyed in order of first appearance."""
    values = np.asarray(values, dtype=object)
    y = np.asarray(y)
    groups: dict = {}
    for v in values:
        if v not in groups:
            groups[v] = None
    out = {}
    for v in groups:
        out[v] = category_stats(y[values == v], task, class_order)
    return out


def scaled_prior(summary: TargetSummary, gamma: float) -> ConjugateParams:
    """Prior from global target statistics, scaled down by gamma.

    gamma = 0 yields the uninformative prior: Beta(1, 1), Dirichlet(1, .., 1)
    or NormalGamma(ybar, 0, 0, 0).
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if summary.task == "binary":
        return BetaParams(
            alpha=1.0 + gamma * summary.sum_y,
            beta=1.0 + gamma * (summary.n - summary.sum_y),
        )
    if summary.task == "multiclass":
        return DirichletParams(
            alphas=tuple(1.0 + gamma * c for c in summary.class_counts)
        )
    return NormalGammaParams(
        mu0=summary.mean,
        nu=0.0,
        alpha=gamma * summary.n / 2.0,
        beta=gamma / 2.0 * summary.sum_sq_dev,
    )


def posterior_update(prior: ConjugateParams, stats: CategoryStats) -> ConjugateParams:
    """Closed-form conjugate update of the prior with one category's statistics."""
    if isinstance(prior, BetaParams):
        if stats.sum_y is None:
            raise ValueError("Beta update needs binary statistics")
        return BetaParams(
            alpha=prior.alpha + stats.sum_y,
            beta=prior.beta + (stats.n - stats.sum_y),
        )
    if isinstance(prior, DirichletParams):
        if stats.class_counts is None:
            raise ValueError("Dirichlet update needs class counts")
        if len(stats.class_counts) != len(prior.alphas):
            raise ValueError("class-count dimension does not match the prior")
        return DirichletParams(
            alphas=tuple(a + c for a, c in zip(prior.alphas, stats.class_counts))
        )
    if isinstance(prior, NormalGammaParams):
        if stats.mean is None:
            raise ValueError("Normal-Gamma update needs regression statistics")
        n = stats.n
        nu_post = prior.nu + n
        mu_post = (prior.nu * prior.mu0 + n * stats.mean) / nu_post
        alpha_post = prior.alpha + n / 2.0
        beta_post = (
            prior.beta
            + stats.sum_sq_dev / 2.0
            + (n * prior.nu) / nu_post * (stats.mean - prior.mu0) ** 2 / 2.0
        )
        # Zero-variance category under an uninformative prior: keep the rate
        # strictly positive so precision draws stay defined.
        floor = _BETA_FLOOR_SCALE * max(1.0, beta_post)
        return NormalGammaParams(
            mu0=mu_post, nu=nu_post, alpha=alpha_post, beta=max(beta_post, floor)
        )
    raise TypeError(f"unsupported parameter type {type(prior).__name__}")


def posterior_mean(params: ConjugateParams):
    """Closed-form mean: Beta -> p, Dirichlet -> probability vector,
    Normal-Gamma -> (mean, expected precision)."""
    if isinstance(params, BetaParams):
        return params.alpha / (params.alpha + params.beta)
    if isinstance(params, DirichletParams):
        total = sum(params.alphas)
        return np.array([a / total for a in params.alphas])
    if isinstance(params, NormalGammaParams):
        if not params.is_proper:
            raise ImproperDistributionError(
                f"Normal-Gamma{params} is improper; no finite moments"
            )
        return (params.mu0, params.alpha / params.beta)
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def posterior_covariance(params: ConjugateParams) -> np.ndarray:
    """Closed-form posterior covariance of the sampled parameter vector.

    Beta: Var(p).  Dirichlet: the full simplex covariance.  Normal-Gamma:
    diag(Var(mu), Var(tau)) with Var(mu) = beta / (nu * (alpha - 1)) from the
    marginal of mu (finite only for alpha > 1) and Var(tau) = alpha / beta**2;
    mu and tau are uncorrelated.
    """
    if isinstance(params, BetaParams):
        a, b = params.alpha, params.beta
        return np.array([[a * b / ((a + b) ** 2 * (a + b + 1.0))]])
    if isinstance(params, DirichletParams):
        alphas = np.asarray(params.alphas, dtype=np.float64)
        total = alphas.sum()
        m = alphas / total
        cov = (np.diag(m) - np.outer(m, m)) / (total + 1.0)
        return cov
    if isinstance(params, NormalGammaParams):
        if not params.is_proper:
            raise ImproperDistributionError(
                f"Normal-Gamma{params} is improper; no finite moments"
            )
        if params.alpha <= 1.0:
            raise ImproperDistributionError(
                "Var(mu) is finite only for alpha > 1"
            )
        var_mu = params.beta / (params.nu * (params.alpha - 1.0))
        var_tau = params.alpha / params.beta**2
        return np.diag([var_mu, var_tau])
    raise TypeError(f"unsupported parameter type {type(params).__name__}")
