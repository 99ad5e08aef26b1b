import numpy as np
import pytest

from fairpca.errors import InvalidMatrix, NotPositiveSemidefinite, PreconditionViolated
from fairpca.linalg import check_symmetric, psd_sqrt, spectral_norm, spectral_shift_norm, sym_eig


def random_symmetric(rng, m, scale=1.0):
    B = rng.standard_normal((m, m))
    return scale * (B + B.T) / 2.0


class TestSymEig:
    def test_two_by_two_closed_form(self):
        # eigenvalues of [[a, b], [b, c]] are (a+c)/2 +- sqrt(((a-c)/2)^2 + b^2)
        rng = np.random.default_rng(42)
        for _ in range(200):
            a, b, c = rng.standard_normal(3) * 5.0
            A = np.array([[a, b], [b, c]])
            mid = (a + c) / 2.0
            rad = np.hypot((a - c) / 2.0, b)
            dec = sym_eig(A)
            assert dec.eigenvalues == pytest.approx([mid + rad, mid - rad],
                                                    abs=1e-10)

    def test_diagonal_matrix(self):
        A = np.diag([3.0, -1.0, 7.0, 0.5])
        dec = sym_eig(A)
        assert np.allclose(dec.eigenvalues, [7.0, 3.0, 0.5, -1.0])
        # eigenvectors are signed unit vectors hitting the right diagonal slots
        expected_cols = [2, 0, 3, 1]
        for k, col in enumerate(expected_cols):
            v = dec.eigenvectors[:, k]
            assert v[col] == pytest.approx(1.0)
            assert np.abs(np.delete(v, col)).max() < 1e-12

    def test_identity(self):
        dec = sym_eig(np.eye(5))
        assert np.allclose(dec.eigenvalues, 1.0)
        assert np.allclose(dec.eigenvectors.T @ dec.eigenvectors, np.eye(5))

    def test_invariants_random(self):
        rng = np.random.default_rng(7)
        for trial in range(300):
            m = int(rng.integers(1, 11))
            A = random_symmetric(rng, m, scale=10.0 ** rng.integers(-2, 3))
            dec = sym_eig(A)
            V, w = dec.eigenvectors, dec.eigenvalues
            assert np.all(np.diff(w) <= 1e-12)
            assert np.abs(V.T @ V - np.eye(m)).max() < 1e-10
            scale = max(1.0, np.abs(A).max())
            assert np.abs((V * w) @ V.T - A).max() < 1e-8 * scale

    def test_sign_convention(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            A = random_symmetric(rng, 6)
            V = sym_eig(A).eigenvectors
            idx = np.abs(V).argmax(axis=0)
            assert np.all(V[idx, np.arange(6)] > 0)

    def test_determinism(self):
        rng = np.random.default_rng(3)
        A = random_symmetric(rng, 8)
        d1 = sym_eig(A)
        d2 = sym_eig(A.copy())
        assert np.array_equal(d1.eigenvalues, d2.eigenvalues)
        assert np.array_equal(d1.eigenvectors, d2.eigenvectors)

    def test_rejects_asymmetric(self):
        A = np.array([[1.0, 2.0], [0.0, 1.0]])
        with pytest.raises(InvalidMatrix):
            sym_eig(A)

    def test_rejects_nonfinite(self):
        A = np.array([[1.0, np.nan], [np.nan, 1.0]])
        with pytest.raises(InvalidMatrix):
            sym_eig(A)

    def test_rejects_nonsquare(self):
        with pytest.raises(InvalidMatrix):
            sym_eig(np.ones((2, 3)))


class TestSpectralNorms:
    def test_norm_matches_svd(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            A = random_symmetric(rng, int(rng.integers(1, 9)))
            assert spectral_norm(A) == pytest.approx(
                np.linalg.norm(A, 2), abs=1e-10)

    def test_shift_identity(self):
        # phi at or above ||A|| must reproduce the plain spectral norm
        rng = np.random.default_rng(100)
        for trial in range(1000):
            m = int(rng.integers(1, 11))
            A = random_symmetric(rng, m, scale=10.0 ** rng.integers(-3, 4))
            base = spectral_norm(A)
            phi = base * (1.0 + 10.0 ** rng.uniform(-8, 0))
            got = spectral_shift_norm(A, phi)
            assert got == pytest.approx(base, abs=1e-10 * max(1.0, base))

    def test_shift_exact_boundary(self):
        A = np.diag([2.0, -3.0])
        assert spectral_shift_norm(A, 3.0) == pytest.approx(3.0, abs=1e-12)

    def test_shift_below_norm_raises(self):
        A = np.diag([2.0, -3.0])
        with pytest.raises(PreconditionViolated):
            spectral_shift_norm(A, 2.5)


class TestPsdSqrt:
    def test_reconstruction(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            m = int(rng.integers(1, 9))
            r = int(rng.integers(1, m + 1))
            B = rng.standard_normal((m, r))
            A = B @ B.T
            M = psd_sqrt(A)
            assert np.abs(M @ M.T - A).max() < 1e-8 * max(1.0, np.abs(A).max())

    def test_rank_deficient_drops_columns(self):
        B = np.array([[1.0], [2.0], [0.0]])
        M = psd_sqrt(B @ B.T)
        assert M.shape == (3, 1)

    def test_zero_matrix(self):
        M = psd_sqrt(np.zeros((4, 4)))
        assert M.shape == (4, 0)
        assert np.allclose(M @ M.T, 0.0)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveSemidefinite):
            psd_sqrt(np.diag([1.0, -0.5]))

    def test_clip_tolerance_allows_noise(self):
        # tiny negative eigenvalues inside the clip band are fine
        A = np.diag([1.0, -1e-12])
        M = psd_sqrt(A, clip_tol=1e-10)
        assert M.shape[1] == 1


def test_check_symmetric_symmetrizes():
    A = np.array([[1.0, 1.0 + 1e-12], [1.0, 2.0]])
    S = check_symmetric(A)
    assert np.array_equal(S, S.T)
