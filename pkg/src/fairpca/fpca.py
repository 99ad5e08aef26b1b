"""Fair PCA model building: SDP construction, solving and rounding.

The pipeline turns a dataset into a column-orthonormal component matrix V by
relaxing the rank-constrained variance-maximization problem to a spectahedron
SDP, optionally adding a mean constraint <P, f f^T> <= delta^2 and
Schur-complement covariance constraints bounding the projected gap between
the two protected-class covariances, then extracting the top-d eigenvectors
of the optimum P*.

The kernel variant runs the same construction over a centered Gram matrix,
with the mean-gap vector and covariance gap replaced by their kernelized
forms computed from raw Gram blocks.
"""

from __future__ import annotations

import dataclasses
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from . import sdp
from .errors import (
    ConfigurationError,
    DegenerateProtectedClass,
    DegenerateVariance,
    DimensionMismatch,
    InvalidArgument,
    InvalidDimension,
    InvalidKernel,
    NumericalFailure,
    PreconditionViolated,
    TieWarning,
)
from .kernels import KernelSpec, gram, median_bandwidth
from .linalg import psd_sqrt, spectral_norm, sym_eig
from .sdp import ConeSpec, ConicProgram, NonNeg, Psd, SolveStatus, SolverSettings, Zero, smat, svec, svec_dim

__all__ = [
    "GroupStats",
    "FpcaConfig",
    "FpcaModel",
    "MEAN",
    "COVARIANCE",
    "group_stats",
    "build_pca_sdp",
    "build_fpca_sdp",
    "build_kernel_fpca_sdp",
    "extract_components",
    "fit",
    "transform",
    "kl_fairness_bound",
]

MEAN = "mean"
COVARIANCE = "covariance"

# Mean-gap vectors below this norm make the constraint vacuous and are not
# emitted as rows.
_F_NORM_TOL = 1e-9
_SQRT2 = np.sqrt(2.0)


# ---------------------------------------------------------------------------
# Group statistics
# ---------------------------------------------------------------------------

@dataclass
class GroupStats:
    """Per-protected-class statistics feeding the fairness constraints.

    f is the gap between group means; q = sigma_plus - sigma_minus is the
    covariance gap (group covariances about their own means, population
    divisor); m_plus/m_minus are square-root factors of +-q + phi I with
    phi slightly above the spectral norm of q. The labels and margin used
    to build the stats ride along so downstream builders can derive
    matching stats for extra attributes.
    """

    f: NDArray[np.float64]
    sigma_plus: NDArray[np.float64]
    sigma_minus: NDArray[np.float64]
    q: NDArray[np.float64]
    phi: float
    m_plus: NDArray[np.float64]
    m_minus: NDArray[np.float64]
    n_pos: int
    n_neg: int
    z: NDArray[np.float64] = field(repr=False, default=None)
    phi_margin: float = 1e-6


def _check_protected(z: NDArray, n: int) -> NDArray[np.float64]:
    z = np.asarray(z, dtype=np.float64).ravel()
    if z.shape[0] != n:
        raise DimensionMismatch("protected labels length does not match X")
    if not np.all(np.isin(z, (-1.0, 1.0))):
        raise InvalidArgument("protected labels must be in {-1, +1}")
    if not ((z > 0).any() and (z < 0).any()):
        raise DegenerateProtectedClass("both protected classes must be nonempty")
    return z


def group_stats(X: NDArray, z: NDArray, phi_margin: float = 1e-6) -> GroupStats:
    """Compute the mean gap, group covariances and their shifted square roots.

    Parameters
    ----------
    X : (n, p) ndarray
        Centered data (column means zero up to roundoff).
    z : (n,) ndarray of +-1
        Protected labels, both classes nonempty.
    phi_margin : float
        Relative headroom on the spectral shift: phi = |q|_2 * (1 + margin).

    Raises
    ------
    PreconditionViolated
        If X is not centered.
    DegenerateProtectedClass
        If a protected class is empty.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidArgument("X must be 2-D")
    n, p = X.shape
    z = _check_protected(z, n)
    scale = max(1.0, float(np.abs(X).max(initial=0.0)))
    if np.abs(X.mean(axis=0)).max(initial=0.0) > 1e-8 * scale:
        raise PreconditionViolated("X must be centered before group statistics")

    Xp = X[z > 0]
    Xn = X[z < 0]
    f = Xp.mean(axis=0) - Xn.mean(axis=0)
    Cp = Xp - Xp.mean(axis=0)
    Cn = Xn - Xn.mean(axis=0)
    sigma_plus = (Cp.T @ Cp) / Xp.shape[0]
    sigma_minus = (Cn.T @ Cn) / Xn.shape[0]
    q = sigma_plus - sigma_minus
    q = 0.5 * (q + q.T)
    norm_q = spectral_norm(q) if p > 0 else 0.0
    phi = norm_q * (1.0 + phi_margin)
    clip = 1e-10 * max(1.0, phi)
    m_plus = psd_sqrt(q + phi * np.eye(p), clip_tol=clip)
    m_minus = psd_sqrt(-q + phi * np.eye(p), clip_tol=clip)
    return GroupStats(f=f, sigma_plus=sigma_plus, sigma_minus=sigma_minus,
                      q=q, phi=phi, m_plus=m_plus, m_minus=m_minus,
                      n_pos=int(Xp.shape[0]), n_neg=int(Xn.shape[0]),
                      z=z, phi_margin=phi_margin)


# ---------------------------------------------------------------------------
# Config / model containers
# ---------------------------------------------------------------------------

@dataclass
class FpcaConfig:
    """Reduction configuration.

    d : target dimension
    delta : mean-constraint bound (delta = inf disables the row; delta = 0
        becomes an equality)
    mu : covariance penalty weight in the objective
    constraints : subset of {"mean", "covariance"}
    kernel : optional KernelSpec for the kernel-mode reduction
    extra_protected : additional +-1 label vectors, each getting its own
        constraint copies
    joint_fairness : also constrain the interaction attribute (primary AND
        extra both positive) for every extra attribute
    """

    d: int
    delta: float = np.inf
    mu: float = 0.0
    constraints: tuple[str, ...] = ()
    kernel: KernelSpec | None = None
    extra_protected: tuple = ()
    joint_fairness: bool = False

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise InvalidDimension(f"d must be a positive integer, got {self.d}")
        self.d = int(self.d)
        if not (self.delta >= 0):
            raise InvalidArgument("delta must be >= 0 (or inf to disable)")
        if not (self.mu >= 0):
            raise InvalidArgument("mu must be >= 0")
        bad = set(self.constraints) - {MEAN, COVARIANCE}
        if bad:
            raise ConfigurationError(f"unknown constraints: {sorted(bad)}")
        self.constraints = tuple(
            c for c in (MEAN, COVARIANCE) if c in self.constraints)
        self.extra_protected = tuple(
            np.asarray(v, dtype=np.float64).ravel() for v in self.extra_protected)
        if self.joint_fairness and not self.extra_protected:
            raise ConfigurationError(
                "joint_fairness needs at least one extra protected attribute")

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "delta": None if np.isinf(self.delta) else float(self.delta),
            "mu": float(self.mu),
            "constraints": list(self.constraints),
            "kernel": self.kernel.to_dict() if self.kernel else None,
            "extra_protected": [[float(v) for v in vec]
                                for vec in self.extra_protected],
            "joint_fairness": bool(self.joint_fairness),
        }

    @staticmethod
    def from_dict(doc: dict) -> "FpcaConfig":
        delta = doc.get("delta")
        return FpcaConfig(
            d=int(doc["d"]),
            delta=np.inf if delta is None else float(delta),
            mu=float(doc.get("mu", 0.0)),
            constraints=tuple(doc.get("constraints", ())),
            kernel=(KernelSpec.from_dict(doc["kernel"])
                    if doc.get("kernel") else None),
            extra_protected=tuple(np.array(v) for v in
                                  doc.get("extra_protected", ())),
            joint_fairness=bool(doc.get("joint_fairness", False)),
        )


@dataclass
class Scaler:
    """Column transform stored at fit time: keep, center, rescale."""

    center: NDArray[np.float64]
    scale: NDArray[np.float64]
    kept: NDArray[np.intp]
    n_input: int

    def apply(self, X: NDArray) -> NDArray[np.float64]:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_input:
            raise DimensionMismatch(
                f"expected {self.n_input} feature columns, got {X.shape}")
        return (X[:, self.kept] - self.center) / self.scale

    def to_dict(self) -> dict:
        return {"center": [float(v) for v in self.center],
                "scale": [float(v) for v in self.scale],
                "kept": [int(v) for v in self.kept],
                "n_input": int(self.n_input)}

    @staticmethod
    def from_dict(doc: dict) -> "Scaler":
        return Scaler(center=np.array(doc["center"], dtype=np.float64),
                      scale=np.array(doc["scale"], dtype=np.float64),
                      kept=np.array(doc["kept"], dtype=np.intp),
                      n_input=int(doc["n_input"]))


@dataclass
class FpcaModel:
    """Fitted reduction: components, spectrum of the SDP optimum, config,
    diagnostics and whatever transform needs (scaler; in kernel mode the
    training rows plus Gram centering statistics)."""

    V: NDArray[np.float64]
    p_star_eigenvalues: NDArray[np.float64]
    config: FpcaConfig
    diagnostics: dict
    scaler: Scaler
    mode: str = "linear"
    kernel: KernelSpec | None = None
    train: NDArray[np.float64] | None = None
    train_col_means: NDArray[np.float64] | None = None
    train_grand_mean: float = 0.0
    feature_names: tuple[str, ...] = ()

    def transform(self, X_new: NDArray) -> NDArray[np.float64]:
        return transform(self, X_new)

    def to_json_file(self, path: str) -> None:
        doc = {
            "format": "fpca-model/1",
            "mode": self.mode,
            "config": self.config.to_dict(),
            "V": [[float(v) for v in row] for row in self.V],
            "p_star_eigenvalues": [float(v) for v in self.p_star_eigenvalues],
            "scaler": self.scaler.to_dict(),
            "diagnostics": _json_safe(self.diagnostics),
            "kernel": self.kernel.to_dict() if self.kernel else None,
            "train": ([[float(v) for v in row] for row in self.train]
                      if self.train is not None else None),
            "train_col_means": ([float(v) for v in self.train_col_means]
                                if self.train_col_means is not None else None),
            "train_grand_mean": float(self.train_grand_mean),
            "feature_names": list(self.feature_names),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")

    @staticmethod
    def from_json_file(path: str) -> "FpcaModel":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("format") != "fpca-model/1":
            raise ConfigurationError(f"not a model file: {path}")
        return FpcaModel(
            V=np.array(doc["V"], dtype=np.float64),
            p_star_eigenvalues=np.array(doc["p_star_eigenvalues"],
                                        dtype=np.float64),
            config=FpcaConfig.from_dict(doc["config"]),
            diagnostics=doc["diagnostics"],
            scaler=Scaler.from_dict(doc["scaler"]),
            mode=doc["mode"],
            kernel=(KernelSpec.from_dict(doc["kernel"])
                    if doc.get("kernel") else None),
            train=(np.array(doc["train"], dtype=np.float64)
                   if doc.get("train") is not None else None),
            train_col_means=(np.array(doc["train_col_means"], dtype=np.float64)
                             if doc.get("train_col_means") is not None else None),
            train_grand_mean=float(doc.get("train_grand_mean", 0.0)),
            feature_names=tuple(doc.get("feature_names", ())),
        )


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    if isinstance(obj, SolveStatus):
        return obj.value
    return obj


# ---------------------------------------------------------------------------
# Program assembly
# ---------------------------------------------------------------------------

def _sidx(i, j, m):
    """svec position of upper-triangle entry (i, j), i <= j, order m."""
    return i * m - (i * (i - 1)) // 2 + (j - i)


class _Assembler:
    """COO accumulation of the constraint matrix, block by block."""

    def __init__(self, nvar: int):
        self.nvar = nvar
        self.rows: list[NDArray] = []
        self.cols: list[NDArray] = []
        self.vals: list[NDArray] = []
        self.b_parts: list[NDArray] = []
        self.blocks: list = []
        self.cursor = 0

    def add_block(self, cone, rows, cols, vals, b) -> int:
        start = self.cursor
        self.rows.append(np.asarray(rows, dtype=np.intp) + start)
        self.cols.append(np.asarray(cols, dtype=np.intp))
        self.vals.append(np.asarray(vals, dtype=np.float64))
        self.b_parts.append(np.asarray(b, dtype=np.float64).ravel())
        self.blocks.append(cone)
        self.cursor += cone.slots
        return start

    def build(self, c: NDArray, meta: dict) -> ConicProgram:
        A = sp.coo_matrix(
            (np.concatenate(self.vals),
             (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(self.cursor, self.nvar)).tocsr()
        return ConicProgram(c=c, A=A, b=np.concatenate(self.b_parts),
                            cones=ConeSpec(tuple(self.blocks)),
                            nvar=self.nvar, meta=meta)


def _spectahedron_rows(asm: _Assembler, p: int, d: int) -> None:
    """trace(P) <= d, P psd, I - P psd."""
    np_ = svec_dim(p)
    eye_sv = svec(np.eye(p))
    nz = np.flatnonzero(eye_sv)
    asm.add_block(NonNeg(1), np.zeros(nz.size, dtype=np.intp), nz,
                  eye_sv[nz], [float(d)])
    rng = np.arange(np_)
    asm.add_block(Psd(p), rng, rng, -np.ones(np_), np.zeros(np_))
    asm.add_block(Psd(p), rng, rng, np.ones(np_), eye_sv)


def _mean_row(asm: _Assembler, f: NDArray, delta: float, p: int) -> tuple[int, str]:
    """<P, f f^T> bounded by delta^2; equality via the Zero cone at delta=0."""
    coeff = svec(np.outer(f, f))
    rows = np.zeros(coeff.size, dtype=np.intp)
    cols = np.arange(coeff.size)
    if delta == 0.0:
        start = asm.add_block(Zero(1), rows, cols, coeff, [0.0])
        return start, "zero"
    start = asm.add_block(NonNeg(1), rows, cols, coeff, [float(delta) ** 2])
    return start, "nonneg"


def _schur_block(asm: _Assembler, M: NDArray, p: int, t_col: int) -> tuple[int, int]:
    """PSD block [[t I_p, P M], [M^T P, I_r]] in svec form.

    Entries linear in (svec(P), t) go into A with a flipped sign so the
    slack equals svec of the assembled block.
    """
    r = M.shape[1]
    m = p + r
    # t on the top-left diagonal
    a = np.arange(p)
    t_rows = _sidx(a, a, m)
    asm_rows = [t_rows]
    asm_cols = [np.full(p, t_col, dtype=np.intp)]
    asm_vals = [-np.ones(p)]
    # P M coupling: block entry (a, p + j) = sum_k P[a, k] M[k, j]
    A_, J_, K_ = np.meshgrid(np.arange(p), np.arange(r), np.arange(p),
                             indexing="ij")
    A_ = A_.ravel()
    J_ = J_.ravel()
    K_ = K_.ravel()
    blk_rows = _sidx(A_, p + J_, m)
    lo = np.minimum(A_, K_)
    hi = np.maximum(A_, K_)
    pcols = _sidx(lo, hi, p)
    vals = -M[K_, J_] * np.where(A_ == K_, _SQRT2, 1.0)
    asm_rows.append(blk_rows)
    asm_cols.append(pcols)
    asm_vals.append(vals)
    # constant identity in the bottom-right corner
    b = np.zeros(svec_dim(m))
    j = np.arange(r)
    b[_sidx(p + j, p + j, m)] = 1.0
    start = asm.add_block(Psd(m), np.concatenate(asm_rows),
                          np.concatenate(asm_cols),
                          np.concatenate(asm_vals), b)
    return start, m


def _interaction_label(z1: NDArray, z2: NDArray) -> NDArray[np.float64]:
    """Indicator of both attributes positive, remapped to +-1."""
    both = (z1 > 0) & (z2 > 0)
    return np.where(both, 1.0, -1.0)


def _attribute_stats(X: NDArray, stats: GroupStats,
                     config: FpcaConfig) -> list[tuple[str, GroupStats]]:
    """Primary stats plus stats for extra and interaction attributes."""
    out = [("primary", stats)]
    for i, z_extra in enumerate(config.extra_protected):
        out.append((f"extra{i}", group_stats(X, z_extra, stats.phi_margin)))
    if config.joint_fairness:
        if stats.z is None:
            raise ConfigurationError(
                "joint_fairness needs stats built by group_stats "
                "(labels missing)")
        for i, z_extra in enumerate(config.extra_protected):
            z_int = _interaction_label(stats.z, z_extra)
            if (z_int > 0).any() and (z_int < 0).any():
                out.append((f"inter{i}",
                            group_stats(X, z_int, stats.phi_margin)))
            else:
                raise DegenerateProtectedClass(
                    f"interaction attribute {i} has a single class")
    return out


def _assemble_fpca(C: NDArray, d: int, attrs: list[tuple[str, GroupStats]],
                   config: FpcaConfig, objective_extra: dict) -> ConicProgram:
    """Common assembly for the linear and kernel builders.

    C is the objective matrix (X^T X or the centered Gram); attrs lists the
    (name, stats) pairs whose constraints are requested by config.
    """
    p = C.shape[0]
    if not 1 <= d <= p:
        raise InvalidDimension(f"d={d} out of range for order {p}")
    np_ = svec_dim(p)

    want_mean = MEAN in config.constraints and not np.isinf(config.delta)
    want_cov = COVARIANCE in config.constraints

    # covariance slack variables, one per attribute with a nonzero gap
    t_cols: dict[str, int] = {}
    if want_cov:
        for name, st in attrs:
            if st.m_plus.shape[1] > 0 or st.m_minus.shape[1] > 0:
                t_cols[name] = np_ + len(t_cols)
    nvar = np_ + len(t_cols)

    asm = _Assembler(nvar)
    attr_meta = []

    # zero-cone mean equalities first, then the NonNeg group, then PSD blocks
    mean_rows: dict[str, tuple[int, str]] = {}
    if want_mean and config.delta == 0.0:
        for name, st in attrs:
            if np.linalg.norm(st.f) > _F_NORM_TOL:
                mean_rows[name] = _mean_row(asm, st.f, 0.0, p)
    _spectahedron_rows(asm, p, d)
    if want_mean and config.delta > 0.0:
        for name, st in attrs:
            if np.linalg.norm(st.f) > _F_NORM_TOL:
                mean_rows[name] = _mean_row(asm, st.f, config.delta, p)
    cov_blocks: dict[str, list] = {}
    if want_cov:
        for name, st in attrs:
            if name not in t_cols:
                continue
            plus = _schur_block(asm, st.m_plus, p, t_cols[name])
            minus = _schur_block(asm, st.m_minus, p, t_cols[name])
            cov_blocks[name] = [plus, minus]

    c = np.zeros(nvar)
    c[:np_] = -svec(C)
    for name, col in t_cols.items():
        c[col] = config.mu

    meta = {
        "order": p,
        "n_t": len(t_cols),
        "t_cols": dict(t_cols),
        "mean_rows": {k: [int(v[0]), v[1]] for k, v in mean_rows.items()},
        "cov_blocks": {k: [[int(s), int(m)] for s, m in v]
                       for k, v in cov_blocks.items()},
        "attributes": [name for name, _ in attrs],
        "d": int(d),
    }
    meta.update(objective_extra)
    return asm.build(c, meta)


def build_pca_sdp(X: NDArray, d: int) -> ConicProgram:
    """Relaxed PCA: maximize <X^T X, P> over the spectahedron
    {trace(P) <= d, 0 <= P <= I} (as a minimization program)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidArgument("X must be 2-D")
    p = X.shape[1]
    if not 1 <= d <= p:
        raise InvalidDimension(f"d={d} out of range for p={p}")
    np_ = svec_dim(p)
    asm = _Assembler(np_)
    _spectahedron_rows(asm, p, d)
    c = -svec(X.T @ X)
    return asm.build(c, {"order": p, "n_t": 0, "t_cols": {}, "mean_rows": {},
                         "cov_blocks": {}, "attributes": [], "d": int(d)})


def build_fpca_sdp(X: NDArray, stats: GroupStats,
                   config: FpcaConfig) -> ConicProgram:
    """Fair PCA program over X^T X with the constraints requested by config.

    Mean rows: <P, f f^T> <= delta^2 per attribute (Zero-cone equality when
    delta = 0, omitted when delta = inf or f vanishes). Covariance
    constraints: per attribute, two PSD Schur blocks
    [[t I, P M], [M^T P, I]] tying the slack t to |M^T P|_2^2, with + mu t
    added to the minimization objective. Extra attributes (and interaction
    attributes under joint_fairness) replicate the rows with their own
    statistics and their own slack.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidArgument("X must be 2-D")
    p = X.shape[1]
    if stats.f.shape[0] != p:
        raise ConfigurationError("stats dimension does not match X")
    for name in (MEAN, COVARIANCE):
        if name in config.constraints and stats is None:
            raise ConfigurationError(f"{name} constraint requested without stats")
    attrs = _attribute_stats(X, stats, config)
    return _assemble_fpca(X.T @ X, config.d, attrs, config, {"objective": "xtx"})


def build_kernel_fpca_sdp(K_full: NDArray, z: NDArray,
                          config: FpcaConfig) -> ConicProgram:
    """Kernel-mode program: order-n matrix variable over the centered Gram.

    The objective matrix is the doubly centered Gram C K C (the classical
    kernel-PCA objective, so the unconstrained limit recovers KPCA). The
    constraint statistics use the raw Gram blocks:
    f_k = K(X, X+) e / n_pos - K(X, X-) e / n_neg and
    Q_k = K(X, X+) K(X+, X) - K(X, X-) K(X-, X).
    """
    K = np.asarray(K_full, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidKernel("Gram matrix must be square")
    n = K.shape[0]
    z = _check_protected(z, n)
    scale = max(1.0, float(np.abs(K).max()))
    if np.abs(K - K.T).max() > 1e-8 * scale:
        raise InvalidKernel("Gram matrix is not symmetric")
    K = 0.5 * (K + K.T)
    w_min = float(np.linalg.eigvalsh(K).min())
    if w_min < -1e-8 * scale:
        raise InvalidKernel(f"Gram matrix has eigenvalue {w_min:.3e}; not PSD")

    pos = z > 0
    neg = ~pos
    n_pos = int(pos.sum())
    n_neg = int(neg.sum())
    Kp = K[:, pos]
    Kn = K[:, neg]
    f_k = Kp.sum(axis=1) / n_pos - Kn.sum(axis=1) / n_neg
    q_k = Kp @ Kp.T - Kn @ Kn.T
    q_k = 0.5 * (q_k + q_k.T)

    phi_margin = 1e-6
    norm_q = spectral_norm(q_k)
    phi = norm_q * (1.0 + phi_margin)
    clip = 1e-10 * max(1.0, phi)
    stats = GroupStats(
        f=f_k, sigma_plus=Kp @ Kp.T, sigma_minus=Kn @ Kn.T, q=q_k, phi=phi,
        m_plus=psd_sqrt(q_k + phi * np.eye(n), clip_tol=clip),
        m_minus=psd_sqrt(-q_k + phi * np.eye(n), clip_tol=clip),
        n_pos=n_pos, n_neg=n_neg, z=z, phi_margin=phi_margin)

    Kc = _center_gram(K)

    if config.extra_protected or config.joint_fairness:
        raise ConfigurationError(
            "multi-attribute constraints are not supported in kernel mode")
    attrs = [("primary", stats)]
    return _assemble_fpca(Kc, config.d, attrs, config,
                          {"objective": "centered_gram"})


# ---------------------------------------------------------------------------
# Rounding
# ---------------------------------------------------------------------------

def extract_components(solution: sdp.Solution, d: int,
                       order: int | None = None,
                       accept_tol: float = 1e-3):
    """Top-d eigenvectors of the matrix part of a solved program.

    Parameters
    ----------
    solution : sdp.Solution
        Must be Optimal, or MaxIters with all residuals below accept_tol.
    d : int
        Number of components.
    order : int, optional
        Matrix order of the embedded svec(P) variable. When omitted the
        whole variable vector is assumed to be svec(P).

    Returns
    -------
    (V, eigenvalues) : top-d sign-normalized eigenvectors and the full
        eigenvalue vector of P*.
    """
    if solution.status not in (SolveStatus.OPTIMAL, SolveStatus.MAX_ITERS):
        raise NumericalFailure(f"cannot round a {solution.status.value} solution")
    worst = max(solution.primal_residual, solution.dual_residual,
                solution.duality_gap)
    if solution.status == SolveStatus.MAX_ITERS and worst > accept_tol:
        raise NumericalFailure(
            f"iteration limit hit with residual {worst:.2e} > {accept_tol:.2e}")
    x = solution.x
    if order is None:
        length = x.shape[0]
    else:
        length = svec_dim(order)
    P = smat(x[:length])
    if not 1 <= d <= P.shape[0]:
        raise InvalidDimension(f"d={d} out of range for order {P.shape[0]}")
    dec = sym_eig(P)
    w = dec.eigenvalues
    if d < w.shape[0] and abs(w[d - 1] - w[d]) < 1e-9:
        warnings.warn(
            f"eigenvalue tie at the cut ({w[d - 1]:.12g} vs {w[d]:.12g}); "
            "component choice is convention-determined", TieWarning,
            stacklevel=2)
    return dec.eigenvectors[:, :d].copy(), w


# ---------------------------------------------------------------------------
# Fit / transform
# ---------------------------------------------------------------------------

def _null_basis(F: NDArray) -> tuple[NDArray, NDArray]:
    """Orthonormal (basis of span(F), basis of its complement)."""
    U, s, _ = np.linalg.svd(F, full_matrices=True)
    rank = int((s > 1e-10 * max(1.0, s[0] if s.size else 0.0)).sum())
    return U[:, :rank], U[:, rank:]


def _solve_program(prog: ConicProgram, settings: SolverSettings) -> sdp.Solution:
    sol = sdp.solve(prog, settings)
    if sol.status in (SolveStatus.INFEASIBLE, SolveStatus.UNBOUNDED):
        raise NumericalFailure(f"solver reports {sol.status.value}")
    return sol


def _diag_from_solution(sol: sdp.Solution, prog: ConicProgram,
                        C_obj: NDArray, attrs, V: NDArray) -> dict:
    meta = prog.meta
    p = meta["order"]
    P = smat(sol.x[:svec_dim(p)])
    diag = {
        "objective_value": float(np.tensordot(C_obj, P)),
        "status": sol.status.value,
        "iterations": int(sol.iterations),
        "primal_residual": float(sol.primal_residual),
        "dual_residual": float(sol.dual_residual),
        "duality_gap": float(sol.duality_gap),
        "p_star_trace": float(np.trace(P)),
    }
    t_vals = {name: float(sol.x[col]) for name, col in meta["t_cols"].items()}
    mean_vals = {}
    mean_resid = {}
    post_mean = {}
    post_cov = {}
    for name, st in attrs:
        mean_vals[name] = float(st.f @ P @ st.f)
        mean_resid[name] = float(np.linalg.norm(P @ st.f))
        post_mean[name] = float(np.linalg.norm(V.T @ st.f) ** 2)
        post_cov[name] = float(spectral_norm(V.T @ st.q @ V))
    diag["t_star"] = t_vals
    diag["mean_constraint_value"] = mean_vals
    diag["p_star_f_norm"] = mean_resid
    diag["post_rounding_mean_sq"] = post_mean
    diag["post_rounding_cov_norm"] = post_cov
    return diag


def fit(dataset, config: FpcaConfig,
        solver_settings: SolverSettings | None = None,
        phi_margin: float = 1e-6, seed: int = 0) -> FpcaModel:
    """Fit a (fair) PCA model on a dataset.

    Pipeline: normalize columns (center, unit sample variance, drop
    constants) -> group statistics -> SDP assembly -> ADMM solve -> top-d
    rounding -> diagnostics.

    Two conventions applied here and documented once:

    * the covariance penalty weight passed to the builder is
      mu * trace(objective matrix), keeping the stated mu grid
      (0.001 .. 0.1) meaningful at any data scale;
    * when the mean constraint is active with delta = 0, the problem is
      solved on the orthogonal complement of the mean-gap directions
      (facial reduction). P* f = 0 then holds to machine precision, which a
      first-order solver cannot deliver through the penalized formulation.

    Parameters
    ----------
    dataset : data_io.Dataset
    config : FpcaConfig
    solver_settings : SolverSettings, optional
        Defaults to tolerance 1e-5 (plateau level adequate for the
        benchmark reproductions).
    phi_margin : float
        Relative spectral-shift headroom for the covariance factorizations.
    seed : int
        Used only for the kernel-mode row cap subsample.

    Returns
    -------
    FpcaModel
    """
    from .data_io import KERNEL_ROW_CAP, normalize, subsample_rows

    if solver_settings is None:
        solver_settings = SolverSettings(eps_abs=1e-5, eps_rel=1e-5)
    ds, scaler = normalize(dataset)
    if config.kernel is not None:
        return _fit_kernel_mode(ds, scaler, config, solver_settings, seed,
                                KERNEL_ROW_CAP, subsample_rows)
    X = ds.X
    z = ds.z
    p = X.shape[1]
    if config.d > p:
        raise InvalidDimension(
            f"d={config.d} exceeds the {p} usable feature columns")
    stats = group_stats(X, z, phi_margin)
    attrs = _attribute_stats(X, stats, config)

    reduce_mean = (MEAN in config.constraints and config.delta == 0.0
                   and any(np.linalg.norm(st.f) > _F_NORM_TOL
                           for _, st in attrs))
    trace_c = float(np.einsum("ij,ij->", X, X))
    build_cfg = dataclasses.replace(
        config, mu=config.mu * max(trace_c, 1.0),
        extra_protected=config.extra_protected)

    if reduce_mean:
        F = np.column_stack([st.f for _, st in attrs
                             if np.linalg.norm(st.f) > _F_NORM_TOL])
        span, B = _null_basis(F)
        if B.shape[1] == 0:
            raise DegenerateProtectedClass(
                "mean-gap directions span the whole feature space; "
                "no exactly fair subspace exists")
        Xr = X @ B
        stats_r = group_stats(Xr, z, phi_margin)
        d_solve = min(config.d, B.shape[1])
        cfg_r = dataclasses.replace(build_cfg, d=d_solve)
        prog = build_fpca_sdp(Xr, stats_r, cfg_r)
        sol = _solve_program(prog, solver_settings)
        Vr, eig_r = extract_components(sol, d_solve, order=prog.meta["order"])
        V = B @ Vr
        if d_solve < config.d:
            # not enough fair directions; deterministically complete from
            # the reduced-out span and let the diagnostics expose the
            # violation
            extra = span[:, :config.d - d_solve]
            V = np.column_stack([V, extra])
        eigenvalues = np.concatenate([eig_r, np.zeros(p - eig_r.shape[0])])
        P_full = B @ smat(sol.x[:svec_dim(B.shape[1])]) @ B.T
        diag = _diag_from_reduced(sol, prog, X, attrs, V, P_full)
    else:
        prog = build_fpca_sdp(X, stats, build_cfg)
        sol = _solve_program(prog, solver_settings)
        V, eigenvalues = extract_components(sol, config.d,
                                            order=prog.meta["order"])
        diag = _diag_from_solution(sol, prog, X.T @ X, attrs, V)

    total_var = trace_c
    captured = float(np.linalg.norm(X @ V, "fro") ** 2)
    diag["explained_variance_fraction"] = (
        captured / total_var if total_var > 0 else 0.0)
    diag["facial_reduction"] = bool(reduce_mean)
    diag["mu_effective"] = float(build_cfg.mu)
    return FpcaModel(V=V, p_star_eigenvalues=eigenvalues, config=config,
                     diagnostics=diag, scaler=scaler, mode="linear",
                     feature_names=tuple(ds.feature_names))


def _diag_from_reduced(sol, prog, X, attrs, V, P_full) -> dict:
    diag = {
        "objective_value": float(np.tensordot(X.T @ X, P_full)),
        "status": sol.status.value,
        "iterations": int(sol.iterations),
        "primal_residual": float(sol.primal_residual),
        "dual_residual": float(sol.dual_residual),
        "duality_gap": float(sol.duality_gap),
        "p_star_trace": float(np.trace(P_full)),
    }
    t_vals = {name: float(sol.x[col])
              for name, col in prog.meta["t_cols"].items()}
    mean_vals = {}
    mean_resid = {}
    post_mean = {}
    post_cov = {}
    for name, st in attrs:
        mean_vals[name] = float(st.f @ P_full @ st.f)
        mean_resid[name] = float(np.linalg.norm(P_full @ st.f))
        post_mean[name] = float(np.linalg.norm(V.T @ st.f) ** 2)
        post_cov[name] = float(spectral_norm(V.T @ st.q @ V))
    diag["t_star"] = t_vals
    diag["mean_constraint_value"] = mean_vals
    diag["p_star_f_norm"] = mean_resid
    diag["post_rounding_mean_sq"] = post_mean
    diag["post_rounding_cov_norm"] = post_cov
    return diag


def _fit_kernel_mode(ds, scaler, config, solver_settings, seed,
                     row_cap, subsample_rows):
    ds = subsample_rows(ds, row_cap, seed)
    X = ds.X
    z = ds.z
    n = X.shape[0]
    if config.d > n:
        raise InvalidDimension(f"d={config.d} exceeds n={n} in kernel mode")
    spec = config.kernel
    if spec.kind == "gaussian" and spec.bandwidth is None:
        spec = spec.with_bandwidth(median_bandwidth(X))
    K = gram(spec, X)
    Kc_trace = float(np.trace(_center_gram(K)))

    build_cfg = dataclasses.replace(config, kernel=spec,
                                    mu=config.mu * max(Kc_trace, 1.0))
    fr_applied = False
    if MEAN in config.constraints and config.delta == 0.0:
        pos = z > 0
        f_k = K[:, pos].sum(axis=1) / pos.sum() \
            - K[:, ~pos].sum(axis=1) / (~pos).sum()
        if np.linalg.norm(f_k) > _F_NORM_TOL:
            fr_applied = True
    if fr_applied:
        prog, sol, V, eigenvalues, diag = _kernel_reduced_solve(
            K, z, build_cfg, solver_settings, f_k)
    else:
        prog = build_kernel_fpca_sdp(K, z, build_cfg)
        sol = _solve_program(prog, solver_settings)
        V, eigenvalues = extract_components(sol, config.d,
                                            order=prog.meta["order"])
        Kc_obj = _center_gram(K)
        diag = {
            "objective_value": float(np.tensordot(Kc_obj, smat(sol.x[:svec_dim(n)]))),
            "status": sol.status.value,
            "iterations": int(sol.iterations),
            "primal_residual": float(sol.primal_residual),
            "dual_residual": float(sol.dual_residual),
            "duality_gap": float(sol.duality_gap),
            "t_star": {k: float(sol.x[c])
                       for k, c in prog.meta["t_cols"].items()},
        }
        P = smat(sol.x[:svec_dim(n)])
        pos = z > 0
        f_k = K[:, pos].sum(axis=1) / pos.sum() \
            - K[:, ~pos].sum(axis=1) / (~pos).sum()
        diag["mean_constraint_value"] = {"primary": float(f_k @ P @ f_k)}
        diag["p_star_f_norm"] = {"primary": float(np.linalg.norm(P @ f_k))}
        diag["post_rounding_mean_sq"] = {
            "primary": float(np.linalg.norm(V.T @ f_k) ** 2)}

    Kc_obj = _center_gram(K)
    total = float(np.trace(Kc_obj))
    captured = float(np.sum((V * (Kc_obj @ V))))
    diag["explained_variance_fraction"] = captured / total if total > 0 else 0.0
    diag["facial_reduction"] = fr_applied
    diag["mu_effective"] = float(build_cfg.mu)
    return FpcaModel(V=V, p_star_eigenvalues=eigenvalues, config=config,
                     diagnostics=diag, scaler=scaler, mode="kernel",
                     kernel=spec, train=X.copy(),
                     train_col_means=K.mean(axis=0),
                     train_grand_mean=float(K.mean()),
                     feature_names=tuple(ds.feature_names))


def _center_gram(K: NDArray) -> NDArray:
    n = K.shape[0]
    col = K.mean(axis=0, keepdims=True)
    grand = K.mean()
    Kc = K - col - col.T + grand
    return 0.5 * (Kc + Kc.T)


def _kernel_reduced_solve(K, z, build_cfg, solver_settings, f_k):
    """Facial reduction for the kernel-mode zero-delta mean constraint."""
    n = K.shape[0]
    span, B = _null_basis(f_k.reshape(-1, 1))
    d_solve = min(build_cfg.d, B.shape[1])
    Kc = _center_gram(K)
    Cr = B.T @ Kc @ B
    pos = z > 0
    Kp = K[:, pos]
    Kn = K[:, ~pos]
    q_k = Kp @ Kp.T - Kn @ Kn.T
    q_k = 0.5 * (q_k + q_k.T)
    Qr = B.T @ q_k @ B

    phi_margin = 1e-6
    norm_q = spectral_norm(Qr)
    phi = norm_q * (1.0 + phi_margin)
    clip = 1e-10 * max(1.0, phi)
    pr = B.shape[1]
    stats_r = GroupStats(
        f=np.zeros(pr), sigma_plus=B.T @ (Kp @ Kp.T) @ B,
        sigma_minus=B.T @ (Kn @ Kn.T) @ B, q=Qr, phi=phi,
        m_plus=psd_sqrt(Qr + phi * np.eye(pr), clip_tol=clip),
        m_minus=psd_sqrt(-Qr + phi * np.eye(pr), clip_tol=clip),
        n_pos=int(pos.sum()), n_neg=int((~pos).sum()), z=z,
        phi_margin=phi_margin)
    cfg_r = dataclasses.replace(build_cfg, d=d_solve, kernel=None)
    prog = _assemble_fpca(Cr, d_solve, [("primary", stats_r)], cfg_r,
                          {"objective": "centered_gram_reduced"})
    sol = _solve_program(prog, solver_settings)
    Vr, eig_r = extract_components(sol, d_solve, order=pr)
    V = B @ Vr
    if d_solve < build_cfg.d:
        V = np.column_stack([V, span[:, :build_cfg.d - d_solve]])
    eigenvalues = np.concatenate([eig_r, np.zeros(n - eig_r.shape[0])])
    P_full = B @ smat(sol.x[:svec_dim(pr)]) @ B.T
    diag = {
        "objective_value": float(np.tensordot(Kc, P_full)),
        "status": sol.status.value,
        "iterations": int(sol.iterations),
        "primal_residual": float(sol.primal_residual),
        "dual_residual": float(sol.dual_residual),
        "duality_gap": float(sol.duality_gap),
        "t_star": {k: float(sol.x[c]) for k, c in prog.meta["t_cols"].items()},
        "mean_constraint_value": {"primary": float(f_k @ P_full @ f_k)},
        "p_star_f_norm": {"primary": float(np.linalg.norm(P_full @ f_k))},
        "post_rounding_mean_sq": {
            "primary": float(np.linalg.norm(V.T @ f_k) ** 2)},
        "post_rounding_cov_norm": {
            "primary": float(spectral_norm(V.T @ q_k @ V))},
    }
    return prog, sol, V, eigenvalues, diag


def transform(model: FpcaModel, X_new: NDArray) -> NDArray[np.float64]:
    """Project new rows into the fitted reduced space.

    Applies the stored column transform, then V^T x (linear mode) or the
    consistently centered kernel map followed by V^T (kernel mode).
    """
    Xs = model.scaler.apply(X_new)
    if model.mode == "linear":
        if model.V.shape[0] != Xs.shape[1]:
            raise DimensionMismatch("model/feature dimension mismatch")
        return Xs @ model.V
    k = gram(model.kernel, Xs, model.train)
    # center test kernel rows against the training Gram statistics
    k_row_mean = k.mean(axis=1, keepdims=True)
    kc = k - model.train_col_means[None, :] - k_row_mean + model.train_grand_mean
    return kc @ model.V


def kl_fairness_bound(w: NDArray, V: NDArray,
                      mu_plus: NDArray, mu_minus: NDArray,
                      sigma_plus: NDArray, sigma_minus: NDArray) -> float:
    """Gaussian fairness upper bound for a linear score w on reduced data.

    With s(+-) the projected group variances and m(+-) the projected group
    means of the direction V w, returns
    sqrt((s-/s+ + (m+ - m-)^2/s+ + log(s+/s-) - 1) / 4). Only valid as a
    bound when both classes are Gaussian; reported as a diagnostic.
    """
    w = np.asarray(w, dtype=np.float64).ravel()
    V = np.asarray(V, dtype=np.float64)
    if V.shape[1] != w.shape[0]:
        raise DimensionMismatch("w length must match V's column count")
    a = V @ w
    s_plus = float(a @ np.asarray(sigma_plus) @ a)
    s_minus = float(a @ np.asarray(sigma_minus) @ a)
    if s_plus <= 0 or s_minus <= 0:
        raise DegenerateVariance("projected group variances must be positive")
    m_plus = float(a @ np.asarray(mu_plus))
    m_minus = float(a @ np.asarray(mu_minus))
    inner = (s_minus / s_plus + (m_plus - m_minus) ** 2 / s_plus
             + np.log(s_plus / s_minus) - 1.0)
    return float(np.sqrt(max(inner, 0.0) / 4.0))
