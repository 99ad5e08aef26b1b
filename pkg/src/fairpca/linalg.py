"""Dense symmetric linear algebra primitives used throughout the package.

Everything here works on plain float64 numpy arrays. Symmetric inputs are
validated (finiteness, symmetry up to roundoff) and then symmetrized before
being handed to LAPACK, so results are deterministic for a fixed input on a
fixed platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidMatrix, NotPositiveSemidefinite, NumericalFailure, PreconditionViolated

__all__ = [
    "EigDecomposition",
    "check_symmetric",
    "sym_eig",
    "spectral_norm",
    "spectral_shift_norm",
    "psd_sqrt",
]

# Relative tolerance for accepting an input matrix as symmetric.
_SYM_TOL = 1e-8


@dataclass(frozen=True)
class EigDecomposition:
    """Full spectral decomposition A = V diag(w) V^T.

    Attributes
    ----------
    eigenvalues : ndarray
        Real eigenvalues in non-increasing order.
    eigenvectors : ndarray
        Orthonormal eigenvectors as columns, aligned with ``eigenvalues``.
        Signs follow a fixed convention (largest-magnitude entry of each
        column is positive) so repeated runs agree exactly.
    """

    eigenvalues: NDArray[np.float64]
    eigenvectors: NDArray[np.float64]


def check_symmetric(A: NDArray[np.float64], name: str = "matrix") -> NDArray[np.float64]:
    """Validate a square symmetric matrix and return its symmetrized copy.

    Raises
    ------
    InvalidMatrix
        If ``A`` is not square, contains non-finite entries, or deviates
        from symmetry by more than roundoff allows.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidMatrix(f"{name} must be square, got shape {A.shape}")
    if A.shape[0] < 1:
        raise InvalidMatrix(f"{name} must have order >= 1")
    if not np.all(np.isfinite(A)):
        raise InvalidMatrix(f"{name} contains non-finite entries")
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A - A.T).max() > _SYM_TOL * scale:
        raise InvalidMatrix(f"{name} is not symmetric")
    return 0.5 * (A + A.T)


def fix_signs(V: NDArray[np.float64]) -> NDArray[np.float64]:
    """Flip eigenvector columns so each column's largest-magnitude entry is positive.

    Ties in magnitude resolve to the lowest index (argmax convention), which
    makes the output reproducible even for symmetric eigenspaces.
    """
    V = V.copy()
    idx = np.abs(V).argmax(axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def sym_eig(A: NDArray[np.float64]) -> EigDecomposition:
    """Eigendecomposition of a symmetric matrix with deterministic conventions.

    Parameters
    ----------
    A : (m, m) ndarray
        Symmetric matrix with finite entries.

    Returns
    -------
    EigDecomposition
        Eigenvalues sorted non-increasing (stable within ties), orthonormal
        eigenvectors with the fixed sign convention.

    Raises
    ------
    InvalidMatrix
        Non-finite or asymmetric input.
    NumericalFailure
        LAPACK did not converge, or the decomposition fails its own
        reconstruction check.
    """
    A = check_symmetric(A, "A")
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    # eigh returns ascending order; a stable sort of -w keeps LAPACK's
    # ordering within tied eigenvalues.
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = fix_signs(V[:, order])

    m = A.shape[0]
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(V.T @ V - np.eye(m)).max() > 1e-10:
        raise NumericalFailure("eigenvectors lost orthonormality")
    if np.abs((V * w) @ V.T - A).max() > 1e-8 * scale:
        raise NumericalFailure("eigendecomposition failed reconstruction check")
    return EigDecomposition(eigenvalues=w, eigenvectors=V)


def spectral_norm(A: NDArray[np.float64]) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    A = check_symmetric(A, "A")
    try:
        w = np.linalg.eigvalsh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue computation failed: {exc}") from exc
    return float(np.abs(w).max())


def spectral_shift_norm(A: NDArray[np.float64], phi: float) -> float:
    """Spectral norm computed through the shifted pair max(|A+phi I|, |-A+phi I|) - phi.

    Requires phi >= ||A||_2. For any such shift the result equals
    ``spectral_norm(A)``; the operation exists so that identity can be
    exercised directly in tests.
    """
    A = check_symmetric(A, "A")
    base = spectral_norm(A)
    if phi < base - 1e-12:
        raise PreconditionViolated(
            f"shift phi={phi!r} is below the spectral norm {base!r}")
    m = A.shape[0]
    shifted = phi * np.eye(m)
    return max(spectral_norm(A + shifted), spectral_norm(-A + shifted)) - phi


def psd_sqrt(A: NDArray[np.float64], clip_tol: float = 1e-10) -> NDArray[np.float64]:
    """Square-root factor M of a PSD matrix: M M^T = A.

    Uses the symmetric eigendecomposition, clipping eigenvalues in
    ``[-clip_tol, clip_tol]`` to zero and dropping the corresponding columns.
    This stands in for a Cholesky factor in places where A is exactly
    singular (Cholesky would fail there); only the product M M^T matters to
    callers.

    Raises
    ------
    NotPositiveSemidefinite
        If an eigenvalue falls below ``-clip_tol``.
    """
    dec = sym_eig(A)
    w = dec.eigenvalues
    if w.min(initial=0.0) < -clip_tol:
        raise NotPositiveSemidefinite(
            f"minimum eigenvalue {w.min():.3e} is below -clip_tol={-clip_tol:.3e}")
    keep = w > clip_tol
    return dec.eigenvectors[:, keep] * np.sqrt(w[keep])
