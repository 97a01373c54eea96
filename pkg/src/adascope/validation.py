"""Input validation helpers used by the estimator layer and CLI."""

from __future__ import annotations

import numpy as np

from .errors import ContractError, InputDataError


def as_feature_matrix(x, num_nodes: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ContractError(f"features must be 2-D, got shape {x.shape}")
    if x.shape[0] != num_nodes:
        raise ContractError(
            f"feature rows ({x.shape[0]}) do not match num_nodes ({num_nodes})"
        )
    if not np.all(np.isfinite(x)):
        raise InputDataError("features contain non-finite entries")
    return x


def as_label_vector(y, num_nodes: int, num_classes: int | None = None) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != num_nodes:
        raise ContractError(
            f"labels must be a length-{num_nodes} vector, got shape {y.shape}"
        )
    if not np.issubdtype(y.dtype, np.integer):
        yf = np.asarray(y, dtype=np.float64)
        if not np.all(yf == np.round(yf)):
            raise InputDataError("labels must be integer class ids")
        y = yf.astype(np.int64)
    y = y.astype(np.int64)
    if y.min(initial=0) < 0:
        raise InputDataError("labels must be non-negative class ids")
    if num_classes is not None and y.size and y.max() >= num_classes:
        raise InputDataError(
            f"label {int(y.max())} out of range for {num_classes} classes"
        )
    return y


def as_index_set(idx, num_nodes: int, name: str = "index set") -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64).ravel()
    if idx.size == 0:
        return idx
    if idx.min() < 0 or idx.max() >= num_nodes:
        raise ContractError(f"{name} contains ids outside [0, {num_nodes})")
    if np.unique(idx).size != idx.size:
        raise ContractError(f"{name} contains duplicate ids")
    return idx


def check_disjoint(a: np.ndarray, b: np.ndarray, names=("first", "second")) -> None:
    if np.intersect1d(a, b).size:
        raise ContractError(f"{names[0]} and {names[1]} index sets overlap")
