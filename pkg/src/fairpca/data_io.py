"""Dataset loading, normalization, splitting and synthetic generators."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from .errors import (
    DegenerateFeatures,
    DegenerateProtectedClass,
    DimensionMismatch,
    EmptyDataset,
    InvalidArgument,
    SchemaError,
    StratificationError,
)
from .fpca import Scaler

__all__ = [
    "Dataset",
    "SplitSpec",
    "KERNEL_ROW_CAP",
    "load_csv",
    "save_csv",
    "normalize",
    "split",
    "subsample_rows",
    "synth_two_gaussians",
    "synth_activity_profiles",
]

# Kernel-mode fits cap the Gram size at this many rows (stratified subsample).
KERNEL_ROW_CAP = 2000


@dataclass
class Dataset:
    """Feature matrix plus protected labels and an optional target.

    X : (n, p) float matrix, all finite
    z : (n,) array of +-1 protected labels, both classes nonempty
    y : optional (n,) float target
    feature_names : length-p column names
    n_dropped : rows removed for missing values during loading
    """

    X: NDArray[np.float64]
    z: NDArray[np.float64]
    y: NDArray[np.float64] | None = None
    feature_names: tuple[str, ...] = ()
    n_dropped: int = 0
    provenance: dict = field(default_factory=dict)
    extras: tuple = ()

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.z = np.asarray(self.z, dtype=np.float64).ravel()
        if self.X.ndim != 2:
            raise InvalidArgument("X must be 2-D")
        n, p = self.X.shape
        if n == 0:
            raise EmptyDataset("dataset has no rows")
        if not np.all(np.isfinite(self.X)):
            raise InvalidArgument("X contains non-finite values")
        if self.z.shape[0] != n:
            raise DimensionMismatch("z length does not match X")
        if not np.all(np.isin(self.z, (-1.0, 1.0))):
            raise InvalidArgument("z must contain only +-1")
        if not ((self.z > 0).any() and (self.z < 0).any()):
            raise DegenerateProtectedClass(
                "both protected classes must be nonempty")
        if self.y is not None:
            self.y = np.asarray(self.y, dtype=np.float64).ravel()
            if self.y.shape[0] != n:
                raise DimensionMismatch("y length does not match X")
        checked = []
        for vec in self.extras:
            vec = np.asarray(vec, dtype=np.float64).ravel()
            if vec.shape[0] != n:
                raise DimensionMismatch("extra label length does not match X")
            if not np.all(np.isin(vec, (-1.0, 1.0))):
                raise InvalidArgument("extra labels must contain only +-1")
            checked.append(vec)
        self.extras = tuple(checked)
        if not self.feature_names:
            self.feature_names = tuple(f"x{j}" for j in range(p))
        else:
            self.feature_names = tuple(str(c) for c in self.feature_names)
            if len(self.feature_names) != p:
                raise DimensionMismatch("feature_names length does not match X")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def take(self, idx: NDArray) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(X=self.X[idx], z=self.z[idx],
                       y=None if self.y is None else self.y[idx],
                       feature_names=self.feature_names,
                       n_dropped=0, provenance=dict(self.provenance),
                       extras=tuple(vec[idx] for vec in self.extras))


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split parameters."""

    train_fraction: float = 0.7
    seed: int = 0
    stratify: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise InvalidArgument("train_fraction must be in (0, 1)")


def load_csv(path: str, schema: dict) -> Dataset:
    """Load a CSV into a Dataset.

    schema keys:
      protected_col (required): column holding the protected attribute
      positive_value (required): value mapped to z = +1; all others to -1
      label_col (optional): target column
      label_positive (optional): if set, y is +-1 on equality with this value;
        otherwise y is the numeric target
      drop_cols (optional): columns to discard
      extra_protected (optional): list of {"col", "positive_value"} entries;
        each becomes a +-1 vector in Dataset.extras and is excluded from the
        features

    Rows with missing values in any used column are dropped; the count lands
    in Dataset.n_dropped. Comparison against positive_value is by trimmed
    string equality so numeric and string CSV columns behave alike.
    """
    for key in ("protected_col", "positive_value"):
        if key not in schema:
            raise SchemaError(f"schema is missing required key {key!r}")
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise SchemaError(f"cannot parse {path}: {exc}") from exc
    if frame.shape[0] == 0:
        raise EmptyDataset(f"{path} has no data rows")

    protected_col = schema["protected_col"]
    label_col = schema.get("label_col")
    drop_cols = list(schema.get("drop_cols", ()))
    extra_spec = list(schema.get("extra_protected", ()))
    extra_cols = []
    for entry in extra_spec:
        if "col" not in entry or "positive_value" not in entry:
            raise SchemaError(
                "extra_protected entries need 'col' and 'positive_value'")
        extra_cols.append(entry["col"])
    for col in ([protected_col] + ([label_col] if label_col else [])
                + drop_cols + extra_cols):
        if col is not None and col not in frame.columns:
            raise SchemaError(f"column {col!r} not in {path}")

    frame = frame.drop(columns=drop_cols)
    skip = {protected_col, label_col} | set(extra_cols)
    feature_cols = [c for c in frame.columns if c not in skip]
    if not feature_cols:
        raise SchemaError("no feature columns left after dropping")

    feats = frame[feature_cols].apply(pd.to_numeric, errors="coerce")
    prot_raw = frame[protected_col]
    keep = feats.notna().all(axis=1) & prot_raw.notna()
    for col in extra_cols:
        keep &= frame[col].notna()
    y = None
    if label_col:
        if schema.get("label_positive") is not None:
            lab_raw = frame[label_col]
            keep &= lab_raw.notna()
        else:
            lab_num = pd.to_numeric(frame[label_col], errors="coerce")
            keep &= lab_num.notna()
    n_dropped = int((~keep).sum())
    frame = frame[keep]
    feats = feats[keep]
    if frame.shape[0] == 0:
        raise EmptyDataset(f"{path}: all rows dropped for missing values")

    pos = (frame[protected_col].astype(str).str.strip()
           == str(schema["positive_value"]).strip())
    z = np.where(pos.to_numpy(), 1.0, -1.0)
    extras = []
    for entry in extra_spec:
        hit = (frame[entry["col"]].astype(str).str.strip()
               == str(entry["positive_value"]).strip())
        extras.append(np.where(hit.to_numpy(), 1.0, -1.0))
    if label_col:
        if schema.get("label_positive") is not None:
            lab_pos = (frame[label_col].astype(str).str.strip()
                       == str(schema["label_positive"]).strip())
            y = np.where(lab_pos.to_numpy(), 1.0, -1.0)
        else:
            y = pd.to_numeric(frame[label_col]).to_numpy(dtype=np.float64)

    return Dataset(X=feats.to_numpy(dtype=np.float64), z=z, y=y,
                   feature_names=tuple(feature_cols), n_dropped=n_dropped,
                   provenance={"path": str(path)}, extras=tuple(extras))


def save_csv(dataset: Dataset, path: str) -> None:
    """Write a Dataset as CSV with round-trip-exact float formatting."""
    cols = list(dataset.feature_names) + ["z"]
    if dataset.y is not None:
        cols.append("y")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(dataset.n):
            vals = [repr(float(v)) for v in dataset.X[i]]
            vals.append(repr(float(dataset.z[i])))
            if dataset.y is not None:
                vals.append(repr(float(dataset.y[i])))
            fh.write(",".join(vals) + "\n")


def normalize(dataset: Dataset) -> tuple[Dataset, Scaler]:
    """Center columns and rescale to unit sample variance.

    Constant columns carry no direction information and are dropped with a
    warning; if nothing is left the dataset is degenerate. Applying the
    returned Scaler to the original features reproduces the normalized
    matrix.
    """
    X = dataset.X
    n = X.shape[0]
    if n < 2:
        raise DegenerateFeatures("need at least two rows to normalize")
    center = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1)
    scale_floor = 1e-12 * np.maximum(1.0, np.abs(center))
    kept = np.flatnonzero(sd > scale_floor)
    if kept.size == 0:
        raise DegenerateFeatures("all feature columns are constant")
    if kept.size < X.shape[1]:
        dropped = [dataset.feature_names[j]
                   for j in np.setdiff1d(np.arange(X.shape[1]), kept)]
        warnings.warn(f"dropping constant columns: {dropped}", UserWarning,
                      stacklevel=2)
    scaler = Scaler(center=center[kept], scale=sd[kept], kept=kept,
                    n_input=X.shape[1])
    Xn = scaler.apply(X)
    names = tuple(dataset.feature_names[j] for j in kept)
    out = Dataset(X=Xn, z=dataset.z, y=dataset.y, feature_names=names,
                  n_dropped=dataset.n_dropped,
                  provenance=dict(dataset.provenance),
                  extras=dataset.extras)
    return out, scaler


def _class_quota(counts: NDArray, total: int) -> NDArray:
    """Largest-remainder apportionment of ``total`` across classes."""
    frac = counts / counts.sum()
    quota = frac * total
    base = np.floor(quota).astype(int)
    short = total - base.sum()
    order = np.argsort(-(quota - base), kind="stable")
    base[order[:short]] += 1
    return base


def split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded train/test split, stratified on z by default.

    The train size is round(train_fraction * n) exactly, apportioned across
    protected classes by largest remainder. Raises StratificationError when
    either side would lose a protected class.
    """
    n = dataset.n
    rng = np.random.default_rng(spec.seed)
    n_train = int(round(spec.train_fraction * n))
    if n_train == 0 or n_train == n:
        raise StratificationError("split leaves one side empty")
    if not spec.stratify:
        perm = rng.permutation(n)
        return dataset.take(np.sort(perm[:n_train])), \
            dataset.take(np.sort(perm[n_train:]))

    classes = [np.flatnonzero(dataset.z > 0), np.flatnonzero(dataset.z < 0)]
    counts = np.array([idx.size for idx in classes])
    quotas = _class_quota(counts, n_train)
    train_parts = []
    test_parts = []
    for idx, take in zip(classes, quotas):
        if take == 0 or take == idx.size:
            raise StratificationError(
                "a protected class is too small to appear on both sides")
        perm = idx[rng.permutation(idx.size)]
        train_parts.append(perm[:take])
        test_parts.append(perm[take:])
    tr = np.sort(np.concatenate(train_parts))
    te = np.sort(np.concatenate(test_parts))
    return dataset.take(tr), dataset.take(te)


def subsample_rows(dataset: Dataset, cap: int, seed: int = 0) -> Dataset:
    """Stratified row cap; returns the dataset unchanged when already small.

    Every protected class keeps at least one row; indices are re-sorted so
    relative row order is preserved.
    """
    n = dataset.n
    if n <= cap:
        return dataset
    rng = np.random.default_rng(seed)
    classes = [np.flatnonzero(dataset.z > 0), np.flatnonzero(dataset.z < 0)]
    counts = np.array([idx.size for idx in classes])
    quotas = np.maximum(_class_quota(counts, cap), 1)
    while quotas.sum() > cap:
        quotas[np.argmax(quotas)] -= 1
    parts = []
    for idx, take in zip(classes, quotas):
        perm = idx[rng.permutation(idx.size)]
        parts.append(perm[:take])
    return dataset.take(np.sort(np.concatenate(parts)))


# ---------------------------------------------------------------------------
# Synthetic generators
# ---------------------------------------------------------------------------

# Shared signal direction for the two-Gaussian generator, with an orthonormal
# completion. Both the mean gap and the covariance gap lie along g, so the
# plane spanned by h2, h3 is exactly fair.
_G_DIR = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
_H2_DIR = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)
_H3_DIR = np.array([1.0, 1.0, -2.0]) / np.sqrt(6.0)

_DEFAULT_MEAN_GAP = 4.0
_DEFAULT_VAR_SIGNAL = (6.0, 1.5)   # along g: plus class, minus class
_DEFAULT_VAR_NOISE = (1.2, 0.8)    # along h2, h3 for both classes


def _default_gaussian_params():
    mu = 0.5 * _DEFAULT_MEAN_GAP * _G_DIR
    base = (_DEFAULT_VAR_NOISE[0] * np.outer(_H2_DIR, _H2_DIR)
            + _DEFAULT_VAR_NOISE[1] * np.outer(_H3_DIR, _H3_DIR))
    gg = np.outer(_G_DIR, _G_DIR)
    sigma_plus = _DEFAULT_VAR_SIGNAL[0] * gg + base
    sigma_minus = _DEFAULT_VAR_SIGNAL[1] * gg + base
    return (mu, -mu), (sigma_plus, sigma_minus)


def synth_two_gaussians(n_per_class: int = 1000, means=None,
                        covariances=None, seed: int = 0) -> Dataset:
    """Two labeled Gaussian clouds with aligned mean and covariance gaps.

    By default both the mean gap and the covariance gap point along a fixed
    oblique direction g, so a 2-dimensional exactly fair subspace exists
    while unconstrained PCA's top component picks up the protected signal.
    Pass ``means=(mu_plus, mu_minus)`` and
    ``covariances=(sigma_plus, sigma_minus)`` to override.
    """
    if n_per_class < 2:
        raise InvalidArgument("need at least two rows per class")
    d_mu, d_sigma = _default_gaussian_params()
    mu_plus, mu_minus = means if means is not None else d_mu
    sig_plus, sig_minus = covariances if covariances is not None else d_sigma
    mu_plus = np.asarray(mu_plus, dtype=np.float64)
    mu_minus = np.asarray(mu_minus, dtype=np.float64)
    sig_plus = np.asarray(sig_plus, dtype=np.float64)
    sig_minus = np.asarray(sig_minus, dtype=np.float64)
    p = mu_plus.shape[0]

    rng = np.random.default_rng(seed)
    jitter = 1e-12 * np.eye(p)
    Lp = np.linalg.cholesky(sig_plus + jitter)
    Lm = np.linalg.cholesky(sig_minus + jitter)
    Xp = mu_plus + rng.standard_normal((n_per_class, p)) @ Lp.T
    Xm = mu_minus + rng.standard_normal((n_per_class, p)) @ Lm.T
    X = np.vstack([Xp, Xm])
    z = np.concatenate([np.ones(n_per_class), -np.ones(n_per_class)])
    perm = rng.permutation(X.shape[0])
    return Dataset(X=X[perm], z=z[perm],
                   feature_names=tuple(f"x{j}" for j in range(p)),
                   provenance={"generator": "two_gaussians", "seed": seed,
                               "n_per_class": n_per_class})


def _activity_templates(buckets: int) -> NDArray[np.float64]:
    """Three smooth daily curves: morning peak, broad midday, evening peak."""
    hours = 24.0 * (np.arange(buckets) + 0.5) / buckets
    def bump(center, width):
        d = np.minimum(np.abs(hours - center), 24.0 - np.abs(hours - center))
        return np.exp(-0.5 * (d / width) ** 2)
    morning = bump(8.0, 1.6)
    midday = 0.6 * bump(13.0, 4.0)
    evening = bump(20.0, 1.6)
    return np.vstack([morning, midday, evening])


def synth_activity_profiles(n: int = 3000, buckets: int = 72,
                            age_mix: float = 0.75,
                            seed: int = 0) -> Dataset:
    """Daily activity-bucket profiles with age-correlated template weights.

    Each row mixes three smooth templates (morning, midday, evening). The
    mixture weights tilt toward the evening template for the older class
    (z = +1) and toward the morning template for the younger class, with
    ``age_mix`` controlling the tilt strength; age_mix = 0 removes the
    correlation entirely. Amplitude jitter and bucket noise provide
    age-independent structure, so clusters remain meaningful after the
    protected direction is projected out.
    """
    if n < 4:
        raise InvalidArgument("need at least four rows")
    if not 0.0 <= age_mix <= 1.0:
        raise InvalidArgument("age_mix must be within [0, 1]")
    rng = np.random.default_rng(seed)
    T = _activity_templates(buckets)
    z = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    # force both classes nonempty for tiny n
    if (z > 0).all() or (z < 0).all():
        z[0] = 1.0
        z[1] = -1.0

    w_base = rng.dirichlet((1.2, 1.2, 1.2), size=n)
    tilt_old = np.array([0.10, 0.25, 0.65])
    tilt_young = np.array([0.65, 0.25, 0.10])
    tilt = np.where((z > 0)[:, None], tilt_old, tilt_young)
    w = (1.0 - age_mix) * w_base + age_mix * tilt

    amp = 3.0 * np.maximum(1.0 + 0.15 * rng.standard_normal(n), 0.2)
    profiles = (amp[:, None] * (w @ T)
                + 0.25 * rng.standard_normal((n, buckets)))
    names = tuple(f"b{j:02d}" for j in range(buckets))
    return Dataset(X=profiles, z=z, feature_names=names,
                   provenance={"generator": "activity_profiles", "seed": seed,
                               "age_mix": age_mix})
