"""Downstream learners used by the evaluation pipeline.

A linear SVM (dual coordinate descent), a kernel SVM on a precomputed Gram
matrix (SMO with max-violating-pair selection), k-means with k-means++
restarts, and the small metrics the benchmark tables need. Training is
deterministic for a fixed seed; the hot loops live in ``fairpca._inner``
with a compiled and a pure-Python backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ._inner import dcd_fit, smo_fit
from .errors import DegenerateLabels, EmptyCluster, InvalidArgument
from .kernels import KernelSpec, gram, median_bandwidth

__all__ = [
    "LinearSvmModel",
    "KernelSvmModel",
    "KMeansModel",
    "DEFAULT_C_GRID",
    "train_linear_svm",
    "train_kernel_svm",
    "kmeans",
    "cluster_composition_stddev",
    "auc",
    "stratified_folds",
]

# Regularization grid: decade steps over 10^-3 .. 10^3.
DEFAULT_C_GRID = tuple(10.0 ** e for e in range(-3, 4))
# Gaussian bandwidth multipliers around the median heuristic.
DEFAULT_BANDWIDTH_FACTORS = (0.25, 1.0, 4.0)

_DCD_TOL = 1e-6
_DCD_MAX_EPOCHS = 2000
_SMO_TOL = 1e-3


def _check_binary(labels: NDArray) -> NDArray:
    labels = np.asarray(labels, dtype=np.float64).ravel()
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise InvalidArgument("labels must be in {-1, +1}")
    if np.unique(labels).size < 2:
        raise DegenerateLabels("need both label classes present")
    return labels


def stratified_folds(labels: NDArray, k: int, seed: int) -> NDArray:
    """Assign each sample to one of k folds, per-class round robin.

    Shuffles within class with a seeded generator, so folds are
    reproducible and each fold's class balance tracks the full set.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise InvalidArgument("need at least 2 folds")
    rng = np.random.default_rng(seed)
    fold = np.empty(labels.shape[0], dtype=np.intp)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        fold[idx] = np.arange(idx.size) % k
    return fold


# ---------------------------------------------------------------------------
# Linear SVM
# ---------------------------------------------------------------------------

@dataclass
class LinearSvmModel:
    """Soft-margin linear separator: decision score w.u + b."""

    w: NDArray[np.float64]
    b: float
    c_reg: float

    def decision(self, U: NDArray) -> NDArray[np.float64]:
        U = np.asarray(U, dtype=np.float64)
        return U @ self.w + self.b

    def predict(self, U: NDArray) -> NDArray[np.float64]:
        return np.where(self.decision(U) >= 0.0, 1.0, -1.0)

    def to_dict(self) -> dict:
        return {"kind": "linear_svm", "w": [float(v) for v in self.w],
                "b": float(self.b), "c_reg": float(self.c_reg)}


def _fit_linear(U: NDArray, labels: NDArray, c_value: float) -> tuple[NDArray, float]:
    n = U.shape[0]
    Xb = np.hstack([U, np.ones((n, 1))])
    # averaged hinge: per-sample cost C/n, so duplicating the data leaves
    # the optimizer unchanged
    cost = np.full(n, c_value / n)
    w_full, _, _, _ = dcd_fit(Xb, labels, cost, _DCD_MAX_EPOCHS, _DCD_TOL)
    return w_full[:-1].copy(), float(w_full[-1])


def train_linear_svm(U: NDArray, labels: NDArray,
                     c_grid: tuple[float, ...] = DEFAULT_C_GRID,
                     folds: int = 5, seed: int = 0) -> LinearSvmModel:
    """Train a linear SVM with the regularization chosen by cross-validation.

    Parameters
    ----------
    U : (n, d) ndarray
        Inputs (typically reduced data).
    labels : (n,) ndarray of +-1
    c_grid : iterable of float
        Candidate soft-margin weights; accuracy ties resolve to the
        smallest C.
    folds, seed : int
        Stratified CV folds and the shuffle seed.

    Returns
    -------
    LinearSvmModel

    Raises
    ------
    DegenerateLabels
        Fewer than two classes, or a class smaller than ``folds``.
    """
    U = np.asarray(U, dtype=np.float64)
    labels = _check_binary(labels)
    if U.ndim != 2 or U.shape[0] != labels.shape[0]:
        raise InvalidArgument("U and labels shapes disagree")
    counts = [(labels == v).sum() for v in (-1.0, 1.0)]
    if min(counts) < folds:
        raise DegenerateLabels(
            f"smallest class has {min(counts)} members, need >= {folds} for CV")

    grid = sorted(float(c) for c in c_grid)
    if not grid:
        raise InvalidArgument("empty regularization grid")
    fold = stratified_folds(labels, folds, seed)
    best_c, best_acc = grid[0], -1.0
    for c_value in grid:
        correct = 0
        for f in range(folds):
            tr = fold != f
            te = ~tr
            w, b = _fit_linear(U[tr], labels[tr], c_value)
            pred = np.where(U[te] @ w + b >= 0.0, 1.0, -1.0)
            correct += int((pred == labels[te]).sum())
        acc = correct / labels.shape[0]
        if acc > best_acc:
            best_acc, best_c = acc, c_value
    w, b = _fit_linear(U, labels, best_c)
    return LinearSvmModel(w=w, b=b, c_reg=best_c)


# ---------------------------------------------------------------------------
# Kernel SVM
# ---------------------------------------------------------------------------

@dataclass
class KernelSvmModel:
    """Kernel SVM in dual form; decision score sum_i coef_i k(x_i, u) + b.

    ``coef`` is alpha_i * y_i restricted to the support set; ``support``
    holds the matching training rows.
    """

    coef: NDArray[np.float64]
    support: NDArray[np.float64]
    b: float
    kernel: KernelSpec
    c_reg: float
    box: float = field(default=0.0)

    def decision(self, U: NDArray) -> NDArray[np.float64]:
        U = np.asarray(U, dtype=np.float64)
        if self.support.shape[0] == 0:
            return np.full(U.shape[0], self.b)
        return gram(self.kernel, U, self.support) @ self.coef + self.b

    def predict(self, U: NDArray) -> NDArray[np.float64]:
        return np.where(self.decision(U) >= 0.0, 1.0, -1.0)

    def to_dict(self) -> dict:
        return {"kind": "kernel_svm", "coef": [float(v) for v in self.coef],
                "support": [[float(v) for v in row] for row in self.support],
                "b": float(self.b), "kernel": self.kernel.to_dict(),
                "c_reg": float(self.c_reg)}


def _fit_kernel(K: NDArray, labels: NDArray, c_value: float,
                max_iter: int) -> tuple[NDArray, float]:
    n = K.shape[0]
    cost = np.full(n, c_value / n)
    alpha, bias, _, _ = smo_fit(K, labels, cost, _SMO_TOL, max_iter)
    return alpha, bias


def train_kernel_svm(U: NDArray, labels: NDArray,
                     kernel: KernelSpec | None = None,
                     c_grid: tuple[float, ...] = DEFAULT_C_GRID,
                     bandwidth_factors: tuple[float, ...] = DEFAULT_BANDWIDTH_FACTORS,
                     folds: int = 5, seed: int = 0) -> KernelSvmModel:
    """Train a kernel SVM; CV over regularization (and Gaussian bandwidth).

    The default kernel is Gaussian with the bandwidth grid
    median-heuristic x ``bandwidth_factors``. For non-Gaussian kernels only
    the regularization is tuned. Ties resolve to the smallest (C, bandwidth)
    in lexicographic order. The dual is solved by SMO on the precomputed
    Gram with KKT-violation stopping at 1e-3.
    """
    U = np.asarray(U, dtype=np.float64)
    labels = _check_binary(labels)
    if U.ndim != 2 or U.shape[0] != labels.shape[0]:
        raise InvalidArgument("U and labels shapes disagree")
    counts = [(labels == v).sum() for v in (-1.0, 1.0)]
    if min(counts) < folds:
        raise DegenerateLabels(
            f"smallest class has {min(counts)} members, need >= {folds} for CV")

    if kernel is None:
        kernel = KernelSpec(kind="gaussian")
    if kernel.kind == "gaussian" and kernel.bandwidth is None:
        med = median_bandwidth(U)
        bandwidths = tuple(sorted(med * f for f in bandwidth_factors))
    elif kernel.kind == "gaussian":
        bandwidths = (kernel.bandwidth,)
    else:
        bandwidths = (None,)

    n = U.shape[0]
    max_iter = max(20000, 200 * n)
    grid_c = sorted(float(c) for c in c_grid)
    if not grid_c:
        raise InvalidArgument("empty regularization grid")
    fold = stratified_folds(labels, folds, seed)

    best = None  # (acc, ...) selection below keeps the first/smallest combo
    for h in bandwidths:
        spec = kernel.with_bandwidth(h) if h is not None else kernel
        K = gram(spec, U)
        for c_value in grid_c:
            correct = 0
            for f in range(folds):
                tr = np.flatnonzero(fold != f)
                te = np.flatnonzero(fold == f)
                alpha, bias = _fit_kernel(K[np.ix_(tr, tr)], labels[tr],
                                          c_value, max_iter)
                scores = K[np.ix_(te, tr)] @ (alpha * labels[tr]) + bias
                pred = np.where(scores >= 0.0, 1.0, -1.0)
                correct += int((pred == labels[te]).sum())
            acc = correct / n
            key = (-acc, c_value, h if h is not None else 0.0)
            if best is None or key < best[0]:
                best = (key, spec, c_value)
    _, best_spec, best_c = best
    K = gram(best_spec, U)
    alpha, bias = _fit_kernel(K, labels, best_c, max_iter)
    sv = alpha > 1e-12
    return KernelSvmModel(coef=(alpha * labels)[sv], support=U[sv].copy(),
                          b=bias, kernel=best_spec, c_reg=best_c,
                          box=best_c / n)


# ---------------------------------------------------------------------------
# k-means
# ---------------------------------------------------------------------------

@dataclass
class KMeansModel:
    """Fitted k-means clustering; inertia is the mean squared distance of
    each point to its assigned center."""

    centers: NDArray[np.float64]
    inertia: float
    k: int

    def assign(self, U: NDArray) -> NDArray[np.intp]:
        U = np.asarray(U, dtype=np.float64)
        d2 = _all_sq_dists(U, self.centers)
        return d2.argmin(axis=1)


def _all_sq_dists(U: NDArray, C: NDArray) -> NDArray:
    uu = np.einsum("ij,ij->i", U, U)
    cc = np.einsum("ij,ij->i", C, C)
    d2 = uu[:, None] + cc[None, :] - 2.0 * (U @ C.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def _kmeanspp_init(U: NDArray, k: int, rng: np.random.Generator) -> NDArray:
    n = U.shape[0]
    centers = np.empty((k, U.shape[1]))
    first = int(rng.integers(n))
    centers[0] = U[first]
    d2 = _all_sq_dists(U, centers[:1]).ravel()
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # all remaining mass at the chosen centers; fall back to uniform
            idx = int(rng.integers(n))
        else:
            r = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(d2), r))
            idx = min(idx, n - 1)
        centers[j] = U[idx]
        d2 = np.minimum(d2, _all_sq_dists(U, centers[j:j + 1]).ravel())
    return centers


def kmeans(U: NDArray, k: int, restarts: int = 10, seed: int = 0,
           max_iter: int = 300, iteration_hook=None) -> KMeansModel:
    """k-means with k-means++ starts and Lloyd refinement.

    Best of ``restarts`` runs by inertia; deterministic for a fixed seed.
    ``iteration_hook(restart, iteration, inertia)`` is called after every
    Lloyd step (testing aid; inertia must be non-increasing within a run).

    Raises
    ------
    InvalidArgument
        If fewer points than clusters.
    """
    U = np.asarray(U, dtype=np.float64)
    if U.ndim != 2:
        raise InvalidArgument("U must be 2-D")
    n = U.shape[0]
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    if n < k:
        raise InvalidArgument(f"need at least k={k} points, got {n}")
    rng = np.random.default_rng(seed)

    best_centers = None
    best_inertia = np.inf
    for restart in range(restarts):
        centers = _kmeanspp_init(U, k, rng)
        prev_assign = None
        for it in range(max_iter):
            d2 = _all_sq_dists(U, centers)
            assign = d2.argmin(axis=1)
            # refill any emptied cluster with the point farthest from its
            # center (deterministic: first index at the max)
            for j in range(k):
                if not np.any(assign == j):
                    far = int(d2[np.arange(n), assign].argmax())
                    assign[far] = j
                    centers[j] = U[far]
            for j in range(k):
                centers[j] = U[assign == j].mean(axis=0)
            inertia = float(_all_sq_dists(U, centers)[np.arange(n), assign].mean())
            if iteration_hook is not None:
                iteration_hook(restart, it, inertia)
            if prev_assign is not None and np.array_equal(assign, prev_assign):
                break
            prev_assign = assign
        d2 = _all_sq_dists(U, centers)
        inertia = float(d2.min(axis=1).mean())
        if inertia < best_inertia:
            best_inertia = inertia
            best_centers = centers.copy()
    return KMeansModel(centers=best_centers, inertia=best_inertia, k=k)


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def cluster_composition_stddev(assignments: NDArray, z: NDArray,
                               n_clusters: int | None = None) -> float:
    """Spread of protected-class share across clusters, in percentage points.

    Computes the percentage of z == +1 members in each cluster and returns
    the population standard deviation of those percentages.

    Raises
    ------
    EmptyCluster
        If ``n_clusters`` is given and some cluster id has no members.
    """
    assignments = np.asarray(assignments).ravel()
    z = np.asarray(z, dtype=np.float64).ravel()
    if assignments.shape[0] != z.shape[0]:
        raise InvalidArgument("assignments and z lengths disagree")
    if assignments.shape[0] == 0:
        raise InvalidArgument("no points")
    ids = np.unique(assignments)
    if n_clusters is not None:
        expected = np.arange(n_clusters)
        if not np.array_equal(np.intersect1d(expected, ids), expected):
            missing = sorted(set(expected.tolist()) - set(ids.tolist()))
            raise EmptyCluster(f"clusters with no members: {missing}")
        ids = expected
    shares = np.array([100.0 * (z[assignments == j] > 0).mean() for j in ids])
    return float(shares.std(ddof=0))


def auc(scores: NDArray, labels: NDArray) -> float:
    """Exact area under the ROC curve, ties getting half credit.

    Mann-Whitney formulation over midranks.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = _check_binary(labels)
    if scores.shape[0] != labels.shape[0]:
        raise InvalidArgument("scores and labels lengths disagree")
    n_pos = int((labels > 0).sum())
    n_neg = labels.shape[0] - n_pos
    order = np.argsort(scores, kind="stable")
    ranks = np.empty_like(scores)
    sorted_scores = scores[order]
    # midranks over tie groups
    i = 0
    n = scores.shape[0]
    while i < n:
        j = i
        while j + 1 < n and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    rank_sum_pos = float(ranks[labels > 0].sum())
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
