"""Standard-form conic linear programming with a deterministic ADMM solver.

Programs take the form

    minimize    c . x
    subject to  A x + s = b,    s in K,

where K is a Cartesian product of zero, nonnegative and PSD cone blocks, the
PSD parts living in symmetric vectorization (svec).  The solver is a
two-block ADMM splitting between the affine constraint and the cone, with
over-relaxation, residual-balancing rho adaptation and normalized divergence
certificates.  Every step is deterministic for a fixed input on a fixed
platform; there is no randomness anywhere in this module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from numpy.typing import NDArray
from scipy.linalg import cho_factor, cho_solve

from .errors import DimensionMismatch, InvalidArgument, InvalidMatrix

__all__ = [
    "Zero",
    "NonNeg",
    "Psd",
    "ConeSpec",
    "ConicProgram",
    "SolveStatus",
    "Solution",
    "SolverSettings",
    "svec",
    "smat",
    "svec_dim",
    "project_cone",
    "project_dual_cone",
    "solve",
]

_SQRT2 = np.sqrt(2.0)

# Residuals are recomputed (and convergence tested) every this many iterations.
_CHECK_EVERY = 25
# Tolerance for the normalized infeasibility/unboundedness certificates.
_CERT_TOL = 1e-7
# Iterations without residual improvement before certificates are tested.
_STAGNATION_WINDOW = 1000
# Proximal regularization keeping the x-subproblem strongly convex.
_SIGMA = 1e-6
# nvar at or below which the normal matrix is factored densely.
_DENSE_NVAR = 3000

_RHO_MIN, _RHO_MAX = 1e-6, 1e6


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Zero:
    """Equality block: s = 0 on ``dim`` slots."""
    dim: int

    @property
    def slots(self) -> int:
        return self.dim


@dataclass(frozen=True)
class NonNeg:
    """Componentwise nonnegative block of length ``dim``."""
    dim: int

    @property
    def slots(self) -> int:
        return self.dim


@dataclass(frozen=True)
class Psd:
    """PSD block of matrix order ``order``, stored as svec."""
    order: int

    @property
    def slots(self) -> int:
        return self.order * (self.order + 1) // 2


ConeBlock = Zero | NonNeg | Psd


@dataclass(frozen=True)
class ConeSpec:
    """Ordered list of cone blocks defining the product cone K."""

    blocks: tuple[ConeBlock, ...]

    def __post_init__(self):
        for blk in self.blocks:
            if not isinstance(blk, (Zero, NonNeg, Psd)):
                raise InvalidArgument(f"unknown cone block {blk!r}")
            n = blk.order if isinstance(blk, Psd) else blk.dim
            if n < 1:
                raise InvalidArgument(f"cone block {blk!r} must have positive size")

    @property
    def slack_dim(self) -> int:
        return sum(blk.slots for blk in self.blocks)


# ---------------------------------------------------------------------------
# Symmetric vectorization
# ---------------------------------------------------------------------------

@lru_cache(maxsize=128)
def _triu_cache(m: int):
    rows, cols = np.triu_indices(m)
    weights = np.where(rows == cols, 1.0, _SQRT2)
    return rows, cols, weights


def svec_dim(m: int) -> int:
    """Length of svec of an order-m symmetric matrix."""
    return m * (m + 1) // 2


def svec(A: NDArray[np.float64]) -> NDArray[np.float64]:
    """Symmetric vectorization with sqrt(2)-scaled off-diagonals.

    The scaling makes svec an isometry: svec(A) . svec(B) = <A, B>.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"svec needs a square matrix, got {A.shape}")
    rows, cols, weights = _triu_cache(A.shape[0])
    return A[rows, cols] * weights


def _order_from_len(length: int) -> int:
    m = int((np.sqrt(8.0 * length + 1.0) - 1.0) / 2.0 + 0.5)
    if m * (m + 1) // 2 != length:
        raise DimensionMismatch(f"length {length} is not a triangular number")
    return m


def smat(v: NDArray[np.float64]) -> NDArray[np.float64]:
    """Inverse of :func:`svec`."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch("smat expects a vector")
    m = _order_from_len(v.shape[0])
    rows, cols, weights = _triu_cache(m)
    M = np.zeros((m, m))
    vals = v / weights
    M[rows, cols] = vals
    M[cols, rows] = vals
    return M


# ---------------------------------------------------------------------------
# Program / solution containers
# ---------------------------------------------------------------------------

@dataclass
class ConicProgram:
    """Immutable-by-convention standard-form cone program.

    Attributes
    ----------
    c : (nvar,) ndarray
        Objective (minimization).
    A : (m, nvar) ndarray or scipy sparse matrix
        Constraint matrix; m must equal ``cones.slack_dim``.
    b : (m,) ndarray
        Right-hand side.
    cones : ConeSpec
        Product cone for the slack s.
    nvar : int
        Number of primal variables.
    meta : dict
        Free-form builder annotations (e.g. the order of an embedded
        matrix variable); ignored by the solver.
    """

    c: NDArray[np.float64]
    A: object
    b: NDArray[np.float64]
    cones: ConeSpec
    nvar: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=np.float64).ravel()
        self.b = np.asarray(self.b, dtype=np.float64).ravel()
        m = self.cones.slack_dim
        shape = self.A.shape
        if shape != (m, self.nvar):
            raise DimensionMismatch(
                f"A has shape {shape}, expected ({m}, {self.nvar}) from the cone spec")
        if self.c.shape[0] != self.nvar:
            raise DimensionMismatch("c length does not match nvar")
        if self.b.shape[0] != m:
            raise DimensionMismatch("b length does not match the cone slack dimension")
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.b))):
            raise InvalidMatrix("c or b contains non-finite entries")

    def to_json_file(self, path: str) -> None:
        """Dump the program to a self-describing JSON file.

        Intended for validating instances against an external solver; the
        matrix goes out as COO triplets sorted by (row, col).
        """
        coo = sp.coo_matrix(self.A)
        order = np.lexsort((coo.col, coo.row))
        blocks = []
        for blk in self.cones.blocks:
            if isinstance(blk, Zero):
                blocks.append(["zero", blk.dim])
            elif isinstance(blk, NonNeg):
                blocks.append(["nonneg", blk.dim])
            else:
                blocks.append(["psd", blk.order])
        doc = {
            "format": "conic-program/1",
            "nvar": int(self.nvar),
            "nrows": int(self.cones.slack_dim),
            "cones": blocks,
            "c": [float(v) for v in self.c],
            "b": [float(v) for v in self.b],
            "A_triplets": [
                [int(coo.row[k]), int(coo.col[k]), float(coo.data[k])]
                for k in order
            ],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")

    @staticmethod
    def from_json_file(path: str) -> "ConicProgram":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("format") != "conic-program/1":
            raise InvalidArgument(f"not a conic program dump: {path}")
        kinds = {"zero": Zero, "nonneg": NonNeg, "psd": Psd}
        cones = ConeSpec(tuple(kinds[k](n) for k, n in doc["cones"]))
        trip = doc["A_triplets"]
        rows = [t[0] for t in trip]
        cols = [t[1] for t in trip]
        vals = [t[2] for t in trip]
        A = sp.coo_matrix((vals, (rows, cols)),
                          shape=(doc["nrows"], doc["nvar"])).tocsr()
        return ConicProgram(c=np.array(doc["c"]), A=A, b=np.array(doc["b"]),
                            cones=cones, nvar=doc["nvar"])


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    MAX_ITERS = "max_iters"


@dataclass
class Solution:
    """Solver output; residuals are the normalized quantities tested for
    convergence, reported at the returned iterate."""

    x: NDArray[np.float64]
    y: NDArray[np.float64]
    s: NDArray[np.float64]
    status: SolveStatus
    primal_residual: float
    dual_residual: float
    duality_gap: float
    iterations: int


@dataclass(frozen=True)
class SolverSettings:
    """ADMM solver parameters.

    The termination test compares the three normalized residuals against
    eps = max(eps_abs, eps_rel); the residual formulas are already relative
    (scaled by 1 + the norm of the matching problem data), so the two
    tolerances coincide in role and both default to 1e-6.

    ``deterministic`` documents that the solver has no randomness; it cannot
    be turned off.
    """

    eps_abs: float = 1e-6
    eps_rel: float = 1e-6
    max_iters: int = 100000
    rho: float = 1.0
    alpha: float = 1.5
    deterministic: bool = True

    def __post_init__(self):
        if self.eps_abs <= 0 or self.eps_rel <= 0:
            raise InvalidArgument("tolerances must be positive")
        if not 1.0 < self.alpha < 2.0:
            raise InvalidArgument("over-relaxation alpha must lie in (1, 2)")
        if self.rho <= 0:
            raise InvalidArgument("rho must be positive")
        if self.max_iters < 1:
            raise InvalidArgument("max_iters must be at least 1")
        if not self.deterministic:
            raise InvalidArgument("the solver is always deterministic; "
                                  "the flag only documents that")

    @property
    def eps(self) -> float:
        return max(self.eps_abs, self.eps_rel)


# ---------------------------------------------------------------------------
# Cone projections
# ---------------------------------------------------------------------------

def _psd_project(v: NDArray[np.float64], order: int) -> NDArray[np.float64]:
    M = smat(v)
    w, V = np.linalg.eigh(M)
    if w[0] >= 0.0:
        return v
    pos = w > 0.0
    if not np.any(pos):
        return np.zeros_like(v)
    M_plus = (V[:, pos] * w[pos]) @ V[:, pos].T
    return svec(M_plus)


def project_cone(s: NDArray[np.float64], cones: ConeSpec) -> NDArray[np.float64]:
    """Blockwise Euclidean projection onto the product cone K."""
    s = np.asarray(s, dtype=np.float64)
    if s.shape[0] != cones.slack_dim:
        raise DimensionMismatch(
            f"vector length {s.shape[0]} != cone slack dimension {cones.slack_dim}")
    out = np.empty_like(s)
    at = 0
    for blk in cones.blocks:
        n = blk.slots
        seg = s[at:at + n]
        if isinstance(blk, Zero):
            out[at:at + n] = 0.0
        elif isinstance(blk, NonNeg):
            out[at:at + n] = np.maximum(seg, 0.0)
        else:
            out[at:at + n] = _psd_project(seg, blk.order)
        at += n
    return out


def project_dual_cone(y: NDArray[np.float64], cones: ConeSpec) -> NDArray[np.float64]:
    """Projection onto the dual cone K* (free for Zero, self-dual otherwise)."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape[0] != cones.slack_dim:
        raise DimensionMismatch(
            f"vector length {y.shape[0]} != cone slack dimension {cones.slack_dim}")
    out = np.empty_like(y)
    at = 0
    for blk in cones.blocks:
        n = blk.slots
        seg = y[at:at + n]
        if isinstance(blk, Zero):
            out[at:at + n] = seg
        elif isinstance(blk, NonNeg):
            out[at:at + n] = np.maximum(seg, 0.0)
        else:
            out[at:at + n] = _psd_project(seg, blk.order)
        at += n
    return out


# ---------------------------------------------------------------------------
# Linear-system step
# ---------------------------------------------------------------------------

class _NormalSolver:
    """Cached factorization of N = sigma I + rho A^T A.

    Small problems use a dense Cholesky factor.  Larger ones factor the
    sparse part with SuperLU and fold any dense constraint rows (the mean
    rows are fully dense) back in through the Woodbury identity, so the
    sparse factor never fills in.
    """

    def __init__(self, A: sp.csr_matrix, rho: float):
        self.nvar = A.shape[1]
        self.dense = self.nvar <= _DENSE_NVAR
        if self.dense:
            # A is kept sparse; only the nvar x nvar Gram is densified.
            self._gram = np.asarray((A.T @ A).todense())
        else:
            row_nnz = np.diff(A.indptr)
            cutoff = max(64, self.nvar // 4)
            heavy = np.where(row_nnz > cutoff)[0]
            self._D = A[heavy].toarray() if heavy.size else np.zeros((0, self.nvar))
            light = A.copy().tolil()
            for r in heavy:
                light.rows[r] = []
                light.data[r] = []
            As = light.tocsr()
            self._gram_sparse = (As.T @ As).tocsc()
        self._factor(rho)

    def _factor(self, rho: float) -> None:
        self.rho = rho
        if self.dense:
            N = rho * self._gram
            N[np.diag_indices(self.nvar)] += _SIGMA
            self._chol = cho_factor(N, lower=True, check_finite=False)
        else:
            N = (rho * self._gram_sparse +
                 _SIGMA * sp.identity(self.nvar, format="csc"))
            self._lu = spla.splu(N.tocsc())
            if self._D.shape[0]:
                SU = np.column_stack([self._lu.solve(col) for col in self._D])
                cap = self._D @ SU + np.eye(self._D.shape[0]) / rho
                self._SU = SU
                self._cap = cho_factor(cap, lower=True, check_finite=False)

    def update_rho(self, rho: float) -> None:
        self._factor(rho)

    def solve(self, v: NDArray[np.float64]) -> NDArray[np.float64]:
        if self.dense:
            return cho_solve(self._chol, v, check_finite=False)
        t = self._lu.solve(v)
        if self._D.shape[0]:
            t = t - self._SU @ cho_solve(self._cap, self._D @ t,
                                         check_finite=False)
        return t


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

def _certificate(A, AT, b, c, cones,
                 y_candidates, x_candidates) -> SolveStatus | None:
    """Normalized divergence certificates for stalled iterations."""
    for w in y_candidates:
        nw = float(np.linalg.norm(w))
        if nw <= 1e-10:
            continue
        wn = w / nw
        if (float(b @ wn) < -_CERT_TOL
                and np.linalg.norm(AT @ wn) <= _CERT_TOL
                and np.linalg.norm(wn - project_dual_cone(wn, cones)) <= _CERT_TOL):
            return SolveStatus.INFEASIBLE
    for u in x_candidates:
        nu = float(np.linalg.norm(u))
        if nu <= 1e-10:
            continue
        un = u / nu
        if float(c @ un) < -_CERT_TOL:
            t = -(A @ un)
            if np.linalg.norm(t - project_cone(t, cones)) <= _CERT_TOL:
                return SolveStatus.UNBOUNDED
    return None


def solve(prog: ConicProgram, settings: SolverSettings | None = None,
          callback=None) -> Solution:
    """Solve a cone program by over-relaxed ADMM.

    Parameters
    ----------
    prog : ConicProgram
    settings : SolverSettings, optional
        Defaults to ``SolverSettings()``.
    callback : callable, optional
        Called at every residual check with a dict snapshot
        ``{iteration, x, s, y, primal_residual, dual_residual, duality_gap}``
        of the unscaled iterate.  Used by tests to watch invariants; must not
        mutate its argument.

    Returns
    -------
    Solution
        With status OPTIMAL when all three normalized residuals fall below
        the tolerance; INFEASIBLE/UNBOUNDED when a divergence certificate
        validates; MAX_ITERS otherwise (carrying the best iterate seen).

    Notes
    -----
    Internally the problem data are rescaled (c and b normalized); all
    reported quantities, including callback snapshots, are in the original
    scaling.
    """
    if settings is None:
        settings = SolverSettings()
    A = sp.csr_matrix(prog.A, dtype=np.float64, copy=True)
    AT = sp.csr_matrix(A.T)
    b, c = prog.b, prog.c
    cones = prog.cones
    m, nvar = A.shape

    norm_b = float(np.linalg.norm(b))
    norm_c = float(np.linalg.norm(c))
    sb = 1.0 / max(1.0, norm_b)
    sc = 1.0 / max(1.0, norm_c)
    bh = b * sb
    ch = c * sc

    rho = settings.rho
    alpha = settings.alpha
    eps = settings.eps
    normal = _NormalSolver(A, rho)

    x = np.zeros(nvar)
    s = project_cone(bh, cones)
    y = np.zeros(m)

    best: tuple | None = None
    best_res = np.inf
    improved_at = 0
    last_rho_change = 0
    prev_x = x.copy()
    prev_y = y.copy()

    status = SolveStatus.MAX_ITERS
    final: tuple | None = None
    k = 0
    while k < settings.max_iters:
        k += 1
        rhs = _SIGMA * x - ch - AT @ (y + rho * (s - bh))
        x = normal.solve(rhs)
        Ax = A @ x
        h = alpha * Ax + (1.0 - alpha) * (bh - s)
        v = bh - h - y / rho
        s = project_cone(v, cones)
        y = rho * (s - v)

        if k % _CHECK_EVERY == 0 or k == settings.max_iters:
            xu = x / sb
            su = s / sb
            yu = y / sc
            rp = float(np.linalg.norm(A @ xu + su - b)) / (1.0 + norm_b)
            rd = float(np.linalg.norm(AT @ yu + c)) / (1.0 + norm_c)
            pobj = float(c @ xu)
            dobj = float(b @ yu)
            gap = abs(pobj + dobj) / (1.0 + abs(pobj) + abs(dobj))
            max_res = max(rp, rd, gap)

            if callback is not None:
                callback({"iteration": k, "x": xu, "s": su, "y": yu,
                          "primal_residual": rp, "dual_residual": rd,
                          "duality_gap": gap})

            if max_res < best_res - 1e-12:
                best_res = max_res
                best = (xu.copy(), yu.copy(), su.copy(), rp, rd, gap, k)
                improved_at = k

            if rp <= eps and rd <= eps and gap <= eps:
                status = SolveStatus.OPTIMAL
                final = (xu, yu, su, rp, rd, gap, k)
                break

            if k - improved_at >= _STAGNATION_WINDOW:
                cert = _certificate(
                    A, AT, b, c, cones,
                    y_candidates=(yu, (y - prev_y) / sc),
                    x_candidates=((x - prev_x) / sb,))
                if cert is not None:
                    status = cert
                    final = (xu, yu, su, rp, rd, gap, k)
                    break
                improved_at = k  # rearm the stagnation window

            prev_x = x.copy()
            prev_y = y.copy()

            # Residual balancing; bounded frequency keeps the factorization
            # cache effective.
            if (k - last_rho_change >= 50
                    and (rp > 10.0 * rd or rd > 10.0 * rp)):
                new_rho = rho * 2.0 if rp > 10.0 * rd else rho / 2.0
                new_rho = min(max(new_rho, _RHO_MIN), _RHO_MAX)
                if new_rho != rho:
                    rho = new_rho
                    normal.update_rho(rho)
                    last_rho_change = k

    if final is None:
        final = best if best is not None else (
            x / sb, y / sc, s / sb, np.inf, np.inf, np.inf, k)
    xr, yr, sr, rp, rd, gap, it = final
    return Solution(x=xr, y=yr, s=sr, status=status,
                    primal_residual=rp, dual_residual=rd, duality_gap=gap,
                    iterations=it if status != SolveStatus.MAX_ITERS else k)
