"""Fairness estimation for reduced representations.

The fairness of a representation U with protected labels z is measured as
the best achievable distributional separation over a classifier family:
threshold classifiers (a multivariate Kolmogorov-Smirnov statistic), linear
SVMs, and kernel SVMs. The SVM families are estimated by cross-validated
training on (U, z) followed by a univariate KS statistic on the decision
scores. Each estimate can be paired with a finite-sample upper bound on the
population value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateLabels, DegenerateProtectedClass, DimensionMismatch, InvalidArgument
from .kernels import KernelSpec
from .learners import train_kernel_svm, train_linear_svm

__all__ = [
    "ks_univariate",
    "delta_threshold_family",
    "delta_linear_svm",
    "delta_kernel_svm",
    "prop2_bound",
    "FairnessReport",
    "fairness_report",
    "THRESHOLD",
    "LINEAR_SVM",
    "KERNEL_SVM",
]

THRESHOLD = "threshold"
LINEAR_SVM = "linear-svm"
KERNEL_SVM = "kernel-svm"

# delta_kernel_svm trains on at most this many rows (stratified subsample);
# scores are still computed for every row
KERNEL_TRAIN_CAP = 800

# exact multivariate KS is evaluated on the full value grid only when cheap
_EXACT_GRID_MAX_DIM = 3
_EXACT_GRID_MAX_N = 500


def _split_groups(U: NDArray, z: NDArray) -> tuple[NDArray, NDArray]:
    U = np.asarray(U, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64).ravel()
    if U.ndim == 1:
        U = U[:, None]
    if U.ndim != 2:
        raise InvalidArgument("U must be 1-D or 2-D")
    if z.shape[0] != U.shape[0]:
        raise DimensionMismatch("z length does not match U")
    if not np.all(np.isin(z, (-1.0, 1.0))):
        raise InvalidArgument("z must contain only +-1")
    pos = z > 0
    if not pos.any() or pos.all():
        raise DegenerateProtectedClass("both protected classes must be nonempty")
    return U, z


def ks_univariate(a: NDArray, b: NDArray) -> float:
    """Exact two-sample Kolmogorov-Smirnov statistic.

    sup_t |F_a(t) - F_b(t)| where F are the empirical CDFs. The supremum of
    the piecewise-constant difference is attained at an observed value, so
    evaluating both CDFs at every pooled sample point is exact.
    """
    a = np.sort(np.asarray(a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise DegenerateProtectedClass("KS statistic needs both samples nonempty")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


def _exact_grid_ks(U: NDArray, pos: NDArray) -> float:
    """Multivariate KS over the full grid of observed coordinate values.

    The empirical CDFs of both groups are piecewise constant with jumps only
    at observed coordinate values, so the sup over thresholds is attained on
    the product grid. Counts are scattered into the grid cube and
    prefix-summed; for 3-D inputs the cube is processed as cumulative planes
    along the first axis to bound memory.
    """
    n, d = U.shape
    axes = [np.unique(U[:, k]) for k in range(d)]
    idx = np.stack([np.searchsorted(axes[k], U[:, k]) for k in range(d)],
                   axis=1)
    n_pos = int(pos.sum())
    n_neg = n - n_pos
    if d == 1:
        return ks_univariate(U[pos, 0], U[~pos, 0])
    if d == 2:
        shape = (axes[0].size, axes[1].size)
        cp = np.zeros(shape)
        cn = np.zeros(shape)
        np.add.at(cp, (idx[pos, 0], idx[pos, 1]), 1.0)
        np.add.at(cn, (idx[~pos, 0], idx[~pos, 1]), 1.0)
        cp = cp.cumsum(axis=0).cumsum(axis=1) / n_pos
        cn = cn.cumsum(axis=0).cumsum(axis=1) / n_neg
        return float(np.abs(cp - cn).max())
    # d == 3: accumulate plane by plane along axis 0
    shape = (axes[1].size, axes[2].size)
    plane_p = np.zeros(shape)
    plane_n = np.zeros(shape)
    best = 0.0
    order = np.argsort(idx[:, 0], kind="stable")
    at = 0
    for a0 in range(axes[0].size):
        while at < n and idx[order[at], 0] == a0:
            i = order[at]
            tgt = plane_p if pos[i] else plane_n
            tgt[idx[i, 1], idx[i, 2]] += 1.0
            at += 1
        cp = plane_p.cumsum(axis=0).cumsum(axis=1) / n_pos
        cn = plane_n.cumsum(axis=0).cumsum(axis=1) / n_neg
        best = max(best, float(np.abs(cp - cn).max()))
    return best


def _sample_point_ks(U: NDArray, pos: NDArray) -> float:
    """Multivariate KS evaluated at the observed points only.

    The exact supremum over the product grid can exceed this, but every
    jump of either empirical CDF happens at a sample point in each
    coordinate, and evaluating there is the standard estimator at this
    scale. Chunked O(n^2 d) comparison.
    """
    n = U.shape[0]
    n_pos = int(pos.sum())
    n_neg = n - n_pos
    best = 0.0
    chunk = max(1, int(2e7) // (n * U.shape[1] + 1))
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        # dominated[i, j] = all coords of row j <= row i
        dom = np.all(U[None, :, :] <= U[lo:hi, None, :], axis=2)
        cp = dom[:, pos].sum(axis=1) / n_pos
        cn = dom[:, ~pos].sum(axis=1) / n_neg
        best = max(best, float(np.abs(cp - cn).max()))
    return best


def delta_threshold_family(U: NDArray, z: NDArray) -> float:
    """Best separation achievable by coordinate threshold classifiers.

    Equals the multivariate two-sample KS statistic
    sup_u |F_pos(u) - F_neg(u)| over componentwise CDFs. Exact on the full
    value grid for d <= 3 and n <= 500; evaluated at sample points beyond
    that.
    """
    U, z = _split_groups(U, z)
    pos = z > 0
    n, d = U.shape
    if d == 1:
        return ks_univariate(U[pos, 0], U[~pos, 0])
    if d <= _EXACT_GRID_MAX_DIM and n <= _EXACT_GRID_MAX_N:
        return _exact_grid_ks(U, pos)
    return _sample_point_ks(U, pos)


def _stratified_cap(z: NDArray, cap: int, seed: int) -> NDArray:
    """Indices of a seeded stratified subsample of size <= cap."""
    n = z.shape[0]
    if n <= cap:
        return np.arange(n)
    rng = np.random.default_rng(seed)
    out = []
    classes = [np.flatnonzero(z > 0), np.flatnonzero(z < 0)]
    counts = np.array([c.size for c in classes])
    quota = np.maximum((counts * cap) // n, 1)
    while quota.sum() > cap:
        quota[np.argmax(quota)] -= 1
    for idx, take in zip(classes, quota):
        perm = idx[rng.permutation(idx.size)]
        out.append(perm[:take])
    return np.sort(np.concatenate(out))


def delta_linear_svm(U: NDArray, z: NDArray, cv_folds: int = 5,
                     seed: int = 0) -> tuple[float, dict]:
    """Separation reachable by cross-validated linear SVMs.

    Trains on (U, z) with the regularization grid selected by k-fold CV,
    scores every row, and returns the KS statistic between the score
    distributions of the two protected groups plus a summary of the
    selected model.
    """
    U, z = _split_groups(U, z)
    try:
        model = train_linear_svm(U, z, folds=cv_folds, seed=seed)
    except DegenerateLabels as exc:
        raise DegenerateProtectedClass(str(exc)) from exc
    scores = model.decision(U)
    delta = ks_univariate(scores[z > 0], scores[z < 0])
    summary = {"family": LINEAR_SVM, "c_reg": float(model.c_reg),
               "w_norm": float(np.linalg.norm(model.w)),
               "bias": float(model.b)}
    return delta, summary


def delta_kernel_svm(U: NDArray, z: NDArray, kernel: KernelSpec | None = None,
                     cv_folds: int = 5, seed: int = 0,
                     train_cap: int = KERNEL_TRAIN_CAP) -> tuple[float, dict]:
    """Separation reachable by cross-validated kernel SVMs.

    Training (CV and the final model) runs on a stratified subsample of at
    most ``train_cap`` rows to keep the Gram work bounded; the KS statistic
    is computed over scores for every row.
    """
    U, z = _split_groups(U, z)
    if kernel is None:
        kernel = KernelSpec(kind="gaussian", bandwidth=None)
    idx = _stratified_cap(z, train_cap, seed)
    try:
        model = train_kernel_svm(U[idx], z[idx], kernel=kernel,
                                 folds=cv_folds, seed=seed)
    except DegenerateLabels as exc:
        raise DegenerateProtectedClass(str(exc)) from exc
    scores = model.decision(U)
    delta = ks_univariate(scores[z > 0], scores[z < 0])
    summary = {"family": KERNEL_SVM, "c_reg": float(model.c_reg),
               "kernel": model.kernel.to_dict(),
               "n_support": int(model.support.shape[0]),
               "n_train": int(idx.size)}
    return delta, summary


def prop2_bound(delta_hat: float, n: int, vc_dim: int,
                slack: float = 0.05) -> tuple[float, float]:
    """Finite-sample upper bound on the population separation.

    Returns ``(bound, confidence)`` where
    bound = delta_hat + 8 sqrt(vc_dim / n) + slack holds with probability
    at least 1 - exp(-n slack^2 / 2) over the n-sample.
    """
    if n < 1 or vc_dim < 1:
        raise InvalidArgument("n and vc_dim must be positive")
    if not 0.0 < slack < 1.0:
        raise InvalidArgument("slack must be in (0, 1)")
    bound = float(delta_hat + 8.0 * np.sqrt(vc_dim / n) + slack)
    confidence = float(1.0 - np.exp(-n * slack * slack / 2.0))
    return bound, confidence


@dataclass
class FairnessReport:
    """Per-family separation estimates for one representation."""

    n: int
    n_pos: int
    n_neg: int
    dim: int
    entries: list[dict]
    slack: float = 0.05

    def to_dict(self) -> dict:
        return {
            "format": "fairness-report/1",
            "n": self.n,
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
            "dim": self.dim,
            "slack": self.slack,
            "entries": self.entries,
        }

    def to_json_file(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")


def fairness_report(U: NDArray, z: NDArray,
                    families: tuple[str, ...] = (THRESHOLD, LINEAR_SVM,
                                                 KERNEL_SVM),
                    kernel: KernelSpec | None = None, cv_folds: int = 5,
                    seed: int = 0, slack: float = 0.05,
                    train_cap: int = KERNEL_TRAIN_CAP) -> FairnessReport:
    """Estimate the separation for each requested family.

    Threshold and linear families carry the finite-sample bound with
    VC dimension d + 1; no usable VC constant is attached to the kernel
    family, so its entry reports only the estimate.
    """
    U, z = _split_groups(U, z)
    n, d = U.shape
    known = (THRESHOLD, LINEAR_SVM, KERNEL_SVM)
    bad = set(families) - set(known)
    if bad:
        raise InvalidArgument(f"unknown families: {sorted(bad)}")
    entries = []
    for family in known:
        if family not in families:
            continue
        if family == THRESHOLD:
            delta = delta_threshold_family(U, z)
            summary = {"family": THRESHOLD}
        elif family == LINEAR_SVM:
            delta, summary = delta_linear_svm(U, z, cv_folds=cv_folds,
                                              seed=seed)
        else:
            delta, summary = delta_kernel_svm(U, z, kernel=kernel,
                                              cv_folds=cv_folds, seed=seed,
                                              train_cap=train_cap)
        entry = {"family": family, "delta_hat": float(delta),
                 "summary": summary}
        if family in (THRESHOLD, LINEAR_SVM):
            bound, conf = prop2_bound(delta, n, d + 1, slack)
            entry["bound"] = bound
            entry["confidence"] = conf
        entries.append(entry)
    return FairnessReport(n=n, n_pos=int((z > 0).sum()),
                          n_neg=int((z < 0).sum()), dim=d, entries=entries,
                          slack=slack)
