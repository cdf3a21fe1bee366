"""Minimal scikit-learn-style estimator machinery.

Estimators here follow the usual contract: constructor arguments are stored
verbatim as public attributes, everything learned during ``fit`` lands in
attributes with a trailing underscore, and ``get_params``/``set_params``
expose the constructor arguments so the classes compose with pipelines and
grid searches that expect the scikit-learn protocol.
"""

from __future__ import annotations

import inspect

import numpy as np


class NotFittedError(ValueError):
    """Raised when transform/predict is called before fit."""


class BaseEstimator:
    """get_params/set_params support derived from the __init__ signature."""

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "BaseEstimator":
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters are {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


class TransformerMixin:
    def fit_transform(self, X, y=None, **fit_params):
        if y is None:
            return self.fit(X, **fit_params).transform(X)
        return self.fit(X, y, **fit_params).transform(X)


def clone(estimator):
    """Fresh unfitted copy with identical constructor parameters."""
    return type(estimator)(**estimator.get_params())


def check_is_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted; call fit() first"
        )


def check_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D object array of feature cells, rejecting ragged input."""
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.shape[0] == 0:
        raise ValueError(f"{name} has no rows")
    return arr

def check_numeric_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a finite float64 2-D array."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.shape[0] == 0:
        raise ValueError(f"{name} has no rows")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_target(y, n_rows: int, name: str = "y") -> np.ndarray:
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional")
    if arr.shape[0] != n_rows:
        raise ValueError(
            f"{name} has {arr.shape[0]} entries but the data has {n_rows} rows"
        )
    return arr


def numeric_column(values, name: str) -> np.ndarray:
    try:
        col = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"column {name!r} contains non-numeric cells") from exc
    if not np.isfinite(col).all():
        raise ValueError(f"column {name!r} contains non-finite or missing values")
    return col


def categorical_column(values, name: str) -> np.ndarray:
    col = np.asarray(values, dtype=object)
    for cell in col:
        if not isinstance(cell, str):
            raise ValueError(
                f"column {name!r} must contain string categories, got {type(cell).__name__}"
            )
    return col
