"""Kernel specifications and Gram matrix computation.

Shared by the kernel-mode reduction (fpca) and the kernel SVM estimator
(learners/fairness). A kernel is described by a small serializable spec so
models can be stored and reloaded without code references.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidArgument, InvalidKernel

__all__ = ["KernelSpec", "gram", "median_bandwidth"]

_KINDS = ("linear", "gaussian", "polynomial")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel description.

    kind : one of "linear", "gaussian", "polynomial"
    bandwidth : Gaussian length scale h in exp(-|x-y|^2 / (2 h^2));
        None means "resolve by the median heuristic at fit time"
    degree, coef : polynomial parameters (x.y + coef)^degree
    """

    kind: str
    bandwidth: float | None = None
    degree: int = 2
    coef: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidKernel(f"unknown kernel kind {self.kind!r}")
        if self.kind == "gaussian" and self.bandwidth is not None and self.bandwidth <= 0:
            raise InvalidKernel("gaussian bandwidth must be positive")
        if self.kind == "polynomial" and self.degree < 1:
            raise InvalidKernel("polynomial degree must be >= 1")

    def with_bandwidth(self, h: float) -> "KernelSpec":
        return KernelSpec(kind=self.kind, bandwidth=h,
                          degree=self.degree, coef=self.coef)

    def to_dict(self) -> dict:
        return {"kind": self.kind,
                "bandwidth": self.bandwidth,
                "degree": self.degree,
                "coef": self.coef}

    @staticmethod
    def from_dict(doc: dict) -> "KernelSpec":
        return KernelSpec(kind=doc["kind"], bandwidth=doc.get("bandwidth"),
                          degree=int(doc.get("degree", 2)),
                          coef=float(doc.get("coef", 1.0)))


def _sq_dists(X: NDArray, Y: NDArray) -> NDArray:
    xx = np.einsum("ij,ij->i", X, X)
    yy = np.einsum("ij,ij->i", Y, Y)
    d2 = xx[:, None] + yy[None, :] - 2.0 * (X @ Y.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def gram(spec: KernelSpec, X: NDArray, Y: NDArray | None = None) -> NDArray:
    """Gram matrix K[i, j] = k(X[i], Y[j]); Y defaults to X."""
    X = np.asarray(X, dtype=np.float64)
    Y = X if Y is None else np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2 or X.shape[1] != Y.shape[1]:
        raise InvalidArgument("gram expects 2-D arrays with matching width")
    if spec.kind == "linear":
        return X @ Y.T
    if spec.kind == "polynomial":
        return (X @ Y.T + spec.coef) ** spec.degree
    if spec.bandwidth is None:
        raise InvalidKernel("gaussian kernel used before bandwidth resolution")
    return np.exp(_sq_dists(X, Y) / (-2.0 * spec.bandwidth ** 2))


def median_bandwidth(X: NDArray, cap: int = 1000) -> float:
    """Median pairwise distance, the usual Gaussian bandwidth heuristic.

    For n above ``cap`` the median is taken over an evenly strided subsample
    (deterministic, no RNG). Falls back to 1.0 when all points coincide.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n > cap:
        idx = np.unique(np.linspace(0, n - 1, cap).astype(np.intp))
        X = X[idx]
        n = X.shape[0]
    if n < 2:
        return 1.0
    d2 = _sq_dists(X, X)
    iu = np.triu_indices(n, k=1)
    med = float(np.median(np.sqrt(d2[iu])))
    return med if med > 0 else 1.0
