"""Datasets: CSV ingestion, holdout splits, min-max scaling, one-hot targets.

Bundled files live in ``codeqnn/datasets/`` (see the README there for
provenance). The oil-price series is not public; :func:`synthetic_oil_proxy`
stands in for it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from codeqnn.core import make_rng

DATA_DIR = Path(__file__).parent / "datasets"

ColumnRef = Union[int, str]


class ParseError(ValueError):
    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}")
        self.row = row


@dataclass(frozen=True)
class Dataset:
    name: str
    features: np.ndarray
    targets: np.ndarray
    task: str = "regression"
    class_labels: Optional[np.ndarray] = None
    synthetic: bool = False
    rejected_rows: int = 0
    feature_names: tuple = ()

    def __post_init__(self):
        if self.task not in ("regression", "classification"):
            raise ValueError(f"unknown task {self.task!r}")
        if self.features.shape[0] != self.targets.shape[0]:
            raise ValueError("features and targets must have equal row counts")
        if self.class_labels is not None and self.class_labels.shape[0] != self.features.shape[0]:
            raise ValueError("one class label per row required")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.targets.shape[1]

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices)
        return replace(
            self,
            features=self.features[indices],
            targets=self.targets[indices],
            class_labels=None if self.class_labels is None else self.class_labels[indices],
        )


@dataclass(frozen=True)
class Split:
    train: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        if len(self.train) == 0 or len(self.test) == 0:
            raise ValueError("train and test parts must both be non-empty")
        if np.intersect1d(self.train, self.test).size:
            raise ValueError("train and test indices overlap")


@dataclass(frozen=True)
class MinMaxScale:
    """Per-column affine map ``x -> (x - offset) / span``; zero span maps to 0."""

    offset: np.ndarray
    span: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        safe = np.where(self.span > 0, self.span, 1.0)
        return np.where(self.span > 0, (X - self.offset) / safe, 0.0)

    def inverse(self, Xn: np.ndarray) -> np.ndarray:
        # constant columns are not recoverable from 0; they return to their offset
        return Xn * self.span + self.offset


def _resolve(cols: Sequence[ColumnRef], header: Optional[list]) -> list:
    out = []
    for c in cols:
        if isinstance(c, str) and not c.lstrip("-").isdigit():
            if header is None or c not in header:
                raise ValueError(f"schema mismatch: no column named {c!r}")
            out.append(header.index(c))
        else:
            out.append(int(c))
    return out


def load_csv(
    path,
    feature_cols: Optional[Sequence[ColumnRef]] = None,
    target_cols: Sequence[ColumnRef] = (-1,),
    *,
    header: bool = True,
    task: str = "regression",
    name: Optional[str] = None,
    skip_bad_rows: bool = False,
) -> Dataset:
    """Read a comma-separated numeric table.

    Columns are referenced by header name or integer position (negative
    positions count from the end). ``feature_cols=None`` takes every column not
    listed as a target. For ``task="classification"`` exactly one target
    column holding integer class labels is expected; targets become one-hot.

    A row with a non-numeric field or the wrong field count raises
    :class:`ParseError` naming its 1-based line number, unless
    ``skip_bad_rows`` is set, in which case it is dropped and counted in
    ``Dataset.rejected_rows``.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    names = None
    first = 1
    if header:
        if not rows:
            raise ParseError("missing header row", 1)
        names = [h.strip() for h in rows[0]]
        rows = rows[1:]
        first = 2
    rows_nonblank = [(first + k, r) for k, r in enumerate(rows) if any(f.strip() for f in r)]
    if not rows_nonblank:
        raise ValueError(f"{path}: no data rows")
    width = len(names) if names is not None else len(rows_nonblank[0][1])

    values, rejected = [], 0
    for lineno, r in rows_nonblank:
        try:
            if len(r) != width:
                raise ParseError(f"expected {width} fields, found {len(r)}", lineno)
            try:
                parsed = [float(f) for f in r]
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if not all(math.isfinite(x) for x in parsed):
                raise ParseError("non-finite value", lineno)
        except ParseError:
            if not skip_bad_rows:
                raise
            rejected += 1
            continue
        values.append(parsed)
    table = np.array(values, dtype=float)

    targets_idx = [i % width for i in _resolve(target_cols, names)]
    if feature_cols is None:
        features_idx = [i for i in range(width) if i not in targets_idx]
    else:
        features_idx = [i % width for i in _resolve(feature_cols, names)]
    if any(not 0 <= i < width for i in features_idx + targets_idx):
        raise ValueError("schema mismatch: column index out of range")
    if set(features_idx) & set(targets_idx):
        raise ValueError("schema mismatch: a column cannot be both feature and target")

    X = table[:, features_idx]
    labels = None
    if task == "classification":
        if len(targets_idx) != 1:
            raise ValueError("schema mismatch: classification needs exactly one label column")
        raw = table[:, targets_idx[0]]
        if not np.all(raw == np.round(raw)) or raw.min() < 0:
            raise ValueError("schema mismatch: class labels must be non-negative integers")
        labels = raw.astype(int)
        Y = one_hot(labels, int(labels.max()) + 1)
    else:
        Y = table[:, targets_idx]
    fnames = tuple(names[i] for i in features_idx) if names else ()
    return Dataset(name or path.stem, X, Y, task, labels, rejected_rows=rejected, feature_names=fnames)


def one_hot(labels, k: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"label out of range [0, {k})")
    out = np.zeros((labels.size, k))
    out[np.arange(labels.size), labels] = 1.0
    return out


def holdout_split(d: Dataset, n_train: int, seed: int) -> Split:
    """Random train/test partition with ``n_train`` training rows."""
    if not 0 < n_train < d.n_rows:
        raise ValueError(f"invalid count: n_train must be in (0, {d.n_rows}), got {n_train}")
    perm = make_rng(seed).permutation(d.n_rows)
    return Split(np.sort(perm[:n_train]), np.sort(perm[n_train:]))


def minmax_normalize(d: Dataset, train: np.ndarray) -> tuple[Dataset, MinMaxScale]:
    """Scale features so the training rows span [0, 1]; the same map is applied
    to every row. Targets are left on their original scale."""
    train = np.asarray(train)
    if train.size == 0:
        raise ValueError("training part is empty")
    fit = d.features[train]
    lo = fit.min(axis=0)
    scale = MinMaxScale(lo, fit.max(axis=0) - lo)
    return replace(d, features=scale.apply(d.features)), scale


def load_iris() -> Dataset:
    return load_csv(DATA_DIR / "iris.csv", target_cols=["species"], task="classification", name="iris")


def load_house() -> Dataset:
    return load_csv(DATA_DIR / "boston_housing.csv", target_cols=["MEDV"], name="house")


OIL_FEATURES = ("supply_index", "demand_index", "refinery_capacity_index", "refinery_throughput_index")


def oil_proxy_price(features: np.ndarray) -> np.ndarray:
    """Noise-free price of the synthetic oil task.

    With columns ``(S, D, C, T)`` = supply, demand, refinery capacity and
    throughput indices (each relative to production)::

        price = 25 + 20 * tanh(4 * (D - S)) + 10 * (T / C - 1) + 3 * sin(6 * S)
    """
    S, D, C, T = features.T
    return 25.0 + 20.0 * np.tanh(4.0 * (D - S)) + 10.0 * (T / C - 1.0) + 3.0 * np.sin(6.0 * S)


def synthetic_oil_proxy(n: int = 288, seed: int = 0, noise: float = 2.0) -> Dataset:
    """Synthetic stand-in for the monthly crude-price regression task.

    Five log-random walks (step sd 0.02) give production and the four raw
    factor levels; each factor is divided by production to form its index.
    Targets are :func:`oil_proxy_price` plus Gaussian noise of sd ``noise``.
    """
    if n < 10:
        raise ValueError(f"n must be >= 10, got {n}")
    rng = make_rng(seed)
    walks = np.exp(np.cumsum(rng.normal(0.0, 0.02, size=(n, 5)), axis=0))
    production = walks[:, 0]
    X = walks[:, 1:] / production[:, None]
    price = oil_proxy_price(X)
    if noise > 0:
        price = price + rng.normal(0.0, noise, size=n)
    return Dataset("oil-proxy", X, price[:, None], synthetic=True, feature_names=OIL_FEATURES)


# training-row counts of the original study
DEFAULT_TRAIN_ROWS = {"house": 430, "oil-proxy": 244, "iris": 127}


def load_named(name: str) -> Dataset:
    if name == "iris":
        return load_iris()
    if name == "house":
        return load_house()
    if name == "oil-proxy":
        return synthetic_oil_proxy()
    raise KeyError(name)
