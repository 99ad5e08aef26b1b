"""Group statistics, program assembly, fitting, rounding, and the model."""

import dataclasses
import warnings

import numpy as np
import pytest

from fairpca import sdp
from fairpca.data_io import Dataset, normalize, synth_two_gaussians
from fairpca.errors import (ConfigurationError, DegenerateProtectedClass,
                            DegenerateVariance, DimensionMismatch,
                            InvalidArgument, InvalidDimension, InvalidKernel,
                            NumericalFailure, PreconditionViolated,
                            TieWarning)
from fairpca.fpca import (COVARIANCE, MEAN, FpcaConfig, FpcaModel,
                          build_fpca_sdp, build_kernel_fpca_sdp,
                          build_pca_sdp, extract_components, fit, group_stats,
                          kl_fairness_bound, transform)
from fairpca.kernels import KernelSpec
from fairpca.sdp import (NonNeg, Psd, SolverSettings, SolveStatus, Zero, smat,
                         svec, svec_dim)


def _centered(rng, n, p):
    X = rng.standard_normal((n, p))
    return X - X.mean(axis=0)


def _labels(rng, n):
    z = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    z[0], z[1] = 1.0, -1.0
    return z


class TestGroupStats:
    def test_mean_gap_and_covariances(self):
        rng = np.random.default_rng(0)
        X = _centered(rng, 60, 4)
        z = _labels(rng, 60)
        st = group_stats(X, z)
        Xp, Xn = X[z > 0], X[z < 0]
        assert np.allclose(st.f, Xp.mean(axis=0) - Xn.mean(axis=0))
        want_p = np.cov(Xp.T, bias=True)
        want_n = np.cov(Xn.T, bias=True)
        assert np.allclose(st.sigma_plus, want_p, atol=1e-12)
        assert np.allclose(st.sigma_minus, want_n, atol=1e-12)
        assert np.allclose(st.q, st.q.T)
        assert st.n_pos == int((z > 0).sum())

    def test_shift_factorizations(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            p = int(rng.integers(2, 7))
            X = _centered(rng, int(rng.integers(10, 40)), p)
            z = _labels(rng, X.shape[0])
            st = group_stats(X, z)
            eye = np.eye(p)
            assert np.allclose(st.m_plus @ st.m_plus.T, st.q + st.phi * eye,
                               atol=1e-8)
            assert np.allclose(st.m_minus @ st.m_minus.T,
                               -st.q + st.phi * eye, atol=1e-8)
            norm_q = np.linalg.norm(st.q, 2)
            assert st.phi == pytest.approx(norm_q * (1 + 1e-6), rel=1e-12)

    def test_requires_centered_input(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((30, 3)) + 5.0
        with pytest.raises(PreconditionViolated):
            group_stats(X, _labels(rng, 30))

    def test_single_class_rejected(self):
        X = np.zeros((6, 2))
        with pytest.raises(DegenerateProtectedClass):
            group_stats(X, np.ones(6))


class TestConfig:
    def test_validation(self):
        with pytest.raises(InvalidDimension):
            FpcaConfig(d=0)
        with pytest.raises(InvalidArgument):
            FpcaConfig(d=2, delta=-0.1)
        with pytest.raises(InvalidArgument):
            FpcaConfig(d=2, mu=-1.0)
        with pytest.raises(ConfigurationError):
            FpcaConfig(d=2, constraints=("variance",))
        with pytest.raises(ConfigurationError):
            FpcaConfig(d=2, joint_fairness=True)

    def test_constraint_order_normalized(self):
        cfg = FpcaConfig(d=2, constraints=(COVARIANCE, MEAN))
        assert cfg.constraints == (MEAN, COVARIANCE)

    def test_dict_round_trip(self):
        cfg = FpcaConfig(d=3, delta=0.2, mu=0.01,
                         constraints=(MEAN, COVARIANCE),
                         kernel=KernelSpec(kind="gaussian", bandwidth=1.5),
                         extra_protected=(np.array([1.0, -1.0]),))
        back = FpcaConfig.from_dict(cfg.to_dict())
        assert back.to_dict() == cfg.to_dict()
        # delta = inf survives the None encoding
        cfg2 = FpcaConfig(d=1)
        assert np.isinf(FpcaConfig.from_dict(cfg2.to_dict()).delta)


class TestProgramStructure:
    def setup_method(self):
        rng = np.random.default_rng(3)
        self.X = _centered(rng, 40, 4)
        self.z = _labels(rng, 40)
        self.stats = group_stats(self.X, self.z)

    def test_plain_pca_program(self):
        prog = build_pca_sdp(self.X, 2)
        p = 4
        blocks = prog.cones.blocks
        assert [type(b) for b in blocks] == [NonNeg, Psd, Psd]
        assert blocks[1].order == p and blocks[2].order == p
        assert prog.nvar == svec_dim(p)
        assert np.allclose(prog.c, -svec(self.X.T @ self.X))
        assert prog.b[0] == 2.0
        assert prog.meta["order"] == p and prog.meta["d"] == 2
        assert prog.meta["mean_rows"] == {}

    def test_mean_equality_uses_zero_cone_first(self):
        cfg = FpcaConfig(d=2, delta=0.0, constraints=(MEAN,))
        prog = build_fpca_sdp(self.X, self.stats, cfg)
        blocks = prog.cones.blocks
        assert isinstance(blocks[0], Zero)
        row, kind = prog.meta["mean_rows"]["primary"]
        assert kind == "zero" and row == 0
        # the equality row encodes <P, f f^T> = 0
        ffT = np.outer(self.stats.f, self.stats.f)
        a_row = np.asarray(prog.A.todense() if hasattr(prog.A, "todense")
                           else prog.A)[0]
        assert np.allclose(a_row[:svec_dim(4)], svec(ffT))
        assert prog.b[0] == 0.0

    def test_mean_inequality_after_spectahedron(self):
        cfg = FpcaConfig(d=2, delta=0.3, constraints=(MEAN,))
        prog = build_fpca_sdp(self.X, self.stats, cfg)
        row, kind = prog.meta["mean_rows"]["primary"]
        assert kind == "nonneg"
        assert prog.b[row] == pytest.approx(0.09)
        # row sits after trace + two PSD blocks
        assert row == 1 + 2 * svec_dim(4)

    def test_mean_rows_omitted_at_delta_inf(self):
        cfg = FpcaConfig(d=2, constraints=(MEAN,))
        prog = build_fpca_sdp(self.X, self.stats, cfg)
        assert prog.meta["mean_rows"] == {}
        assert [type(b) for b in prog.cones.blocks] == [NonNeg, Psd, Psd]

    def test_mean_row_omitted_for_vanishing_gap(self):
        # duplicate every row across both classes: the group means agree
        Xd = np.vstack([self.X, self.X])
        zd = np.concatenate([np.ones(40), -np.ones(40)])
        st = group_stats(Xd, zd)
        assert np.linalg.norm(st.f) < 1e-12
        cfg = FpcaConfig(d=2, delta=0.0, constraints=(MEAN,))
        prog = build_fpca_sdp(Xd, st, cfg)
        assert prog.meta["mean_rows"] == {}

    def test_covariance_block_layout(self):
        cfg = FpcaConfig(d=2, mu=0.05, constraints=(COVARIANCE,))
        prog = build_fpca_sdp(self.X, self.stats, cfg)
        p = 4
        np_ = svec_dim(p)
        assert prog.meta["n_t"] == 1
        t_col = prog.meta["t_cols"]["primary"]
        assert t_col == np_
        assert prog.nvar == np_ + 1
        # builders keep the literal penalty weight
        assert prog.c[t_col] == pytest.approx(0.05)
        blocks = prog.cones.blocks
        orders = [b.order for b in blocks if isinstance(b, Psd)]
        want_plus = p + self.stats.m_plus.shape[1]
        want_minus = p + self.stats.m_minus.shape[1]
        assert orders == [p, p, want_plus, want_minus]

    def test_schur_block_slack_is_the_matrix(self):
        # for any (P, t) the slack of a Schur block must assemble to
        # [[t I, P M], [M^T P, I]]; this pins the svec index arithmetic
        from fairpca.fpca import _Assembler, _schur_block
        rng = np.random.default_rng(4)
        for _ in range(10):
            p = int(rng.integers(2, 5))
            r = int(rng.integers(1, 4))
            M = rng.standard_normal((p, r))
            asm = _Assembler(svec_dim(p) + 1)
            start, order = _schur_block(asm, M, p, t_col=svec_dim(p))
            assert order == p + r
            prog = asm.build(np.zeros(svec_dim(p) + 1), {})
            S = rng.standard_normal((p, p))
            P = S + S.T
            t = float(rng.uniform(0.2, 2.0))
            x = np.concatenate([svec(P), [t]])
            A = np.asarray(prog.A.todense() if hasattr(prog.A, "todense")
                           else prog.A)
            slack = prog.b - A @ x
            B = smat(slack)
            want = np.block([[t * np.eye(p), P @ M],
                             [M.T @ P, np.eye(r)]])
            assert np.allclose(B, want, atol=1e-12)

    def test_extra_and_interaction_attributes(self):
        rng = np.random.default_rng(5)
        z2 = _labels(rng, 40)
        # make the interaction two-sided
        both = (self.z > 0) & (z2 > 0)
        if not both.any():
            z2[np.flatnonzero(self.z > 0)[0]] = 1.0
        cfg = FpcaConfig(d=2, delta=0.1, mu=0.01,
                         constraints=(MEAN, COVARIANCE),
                         extra_protected=(z2,), joint_fairness=True)
        prog = build_fpca_sdp(self.X, self.stats, cfg)
        assert prog.meta["attributes"] == ["primary", "extra0", "inter0"]
        assert set(prog.meta["mean_rows"]) == {"primary", "extra0", "inter0"}
        assert prog.meta["n_t"] == 3
        assert all(len(v) == 2 for v in prog.meta["cov_blocks"].values())

    def test_interaction_single_class_rejected(self):
        z1 = np.concatenate([np.ones(20), -np.ones(20)])
        z2 = -z1
        Xc = self.X
        st = group_stats(Xc, z1)
        cfg = FpcaConfig(d=2, delta=0.1, constraints=(MEAN,),
                         extra_protected=(z2,), joint_fairness=True)
        with pytest.raises(DegenerateProtectedClass):
            build_fpca_sdp(Xc, st, cfg)

    def test_dimension_guards(self):
        with pytest.raises(InvalidDimension):
            build_pca_sdp(self.X, 5)
        with pytest.raises(InvalidDimension):
            build_pca_sdp(self.X, 0)


class TestKernelBuilder:
    def test_rejects_bad_grams(self):
        z = np.array([1.0, -1.0, 1.0])
        with pytest.raises(InvalidKernel):
            build_kernel_fpca_sdp(np.zeros((3, 2)), z[:2], FpcaConfig(d=1))
        asym = np.array([[1.0, 0.5, 0.0], [0.1, 1.0, 0.0], [0.0, 0.0, 1.0]])
        with pytest.raises(InvalidKernel):
            build_kernel_fpca_sdp(asym, z, FpcaConfig(d=1))
        indef = np.array([[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        with pytest.raises(InvalidKernel):
            build_kernel_fpca_sdp(indef, z, FpcaConfig(d=1))

    def test_multi_attribute_unsupported(self):
        K = np.eye(4)
        z = np.array([1.0, 1.0, -1.0, -1.0])
        cfg = FpcaConfig(d=1, extra_protected=(z,))
        with pytest.raises(ConfigurationError):
            build_kernel_fpca_sdp(K, z, cfg)

    def test_objective_is_centered_gram(self):
        rng = np.random.default_rng(6)
        G = rng.standard_normal((8, 3))
        K = G @ G.T
        z = _labels(rng, 8)
        prog = build_kernel_fpca_sdp(K, z, FpcaConfig(d=2))
        n = 8
        C = np.eye(n) - np.full((n, n), 1.0 / n)
        Kc = C @ K @ C
        assert np.allclose(prog.c[:svec_dim(n)], -svec(Kc), atol=1e-10)
        assert prog.meta["objective"] == "centered_gram"


def _dataset(rng, n=120, p=5):
    # two latent factors drive correlated column pairs, so the correlation
    # spectrum has clear gaps for the subspace comparison
    L = rng.standard_normal((n, 2))
    X = np.column_stack([
        L[:, 0],
        L[:, 0] + 0.2 * rng.standard_normal(n),
        L[:, 1],
        L[:, 1] + 0.3 * rng.standard_normal(n),
        rng.standard_normal(n),
    ])[:, :p]
    z = _labels(rng, n)
    return Dataset(X=X, z=z)


class TestFitUnconstrained:
    def test_matches_eigendecomposition(self):
        rng = np.random.default_rng(7)
        ds = _dataset(rng)
        model = fit(ds, FpcaConfig(d=2))
        Xs, _ = normalize(ds)
        w, vecs = np.linalg.eigh(Xs.X.T @ Xs.X)
        V_ref = vecs[:, ::-1][:, :2]
        # smallest principal-angle cosine between the two 2-D subspaces
        cos = np.linalg.svd(model.V.T @ V_ref, compute_uv=False)
        assert cos.min() >= 1 - 1e-4
        want_frac = w[::-1][:2].sum() / w.sum()
        assert model.diagnostics["explained_variance_fraction"] == \
            pytest.approx(want_frac, abs=1e-4)
        assert model.diagnostics["status"] == "optimal"
        assert model.diagnostics["facial_reduction"] is False

    def test_projector_shape_of_solution(self):
        rng = np.random.default_rng(8)
        ds = _dataset(rng)
        model = fit(ds, FpcaConfig(d=2))
        w = model.p_star_eigenvalues
        assert w.shape == (5,)
        assert w.min() >= -1e-4 and w.max() <= 1 + 1e-4
        assert model.diagnostics["p_star_trace"] == pytest.approx(2.0,
                                                                  abs=1e-3)
        assert np.allclose(model.V.T @ model.V, np.eye(2), atol=1e-10)

    def test_d_too_large(self):
        rng = np.random.default_rng(9)
        ds = _dataset(rng)
        with pytest.raises(InvalidDimension):
            fit(ds, FpcaConfig(d=6))

    def test_mu_scaling_reported_not_stored(self):
        rng = np.random.default_rng(10)
        ds = _dataset(rng)
        model = fit(ds, FpcaConfig(d=2, mu=0.01, constraints=(COVARIANCE,)))
        assert model.config.mu == 0.01
        Xs, _ = normalize(ds)
        trace_c = float(np.einsum("ij,ij->", Xs.X, Xs.X))
        assert model.diagnostics["mu_effective"] == \
            pytest.approx(0.01 * trace_c, rel=1e-12)


class TestFitMeanConstraint:
    def test_exact_constraint_by_reduction(self):
        ds = synth_two_gaussians(n_per_class=120, seed=0)
        model = fit(ds, FpcaConfig(d=2, delta=0.0, constraints=(MEAN,)))
        diag = model.diagnostics
        assert diag["facial_reduction"] is True
        assert diag["p_star_f_norm"]["primary"] <= 1e-10
        # the projected group means coincide
        Xs, _ = normalize(ds)
        st = group_stats(Xs.X, Xs.z)
        assert np.linalg.norm(model.V.T @ st.f) <= 1e-10

    def test_soft_constraint_respected(self):
        ds = synth_two_gaussians(n_per_class=120, seed=1)
        delta = 0.3
        model = fit(ds, FpcaConfig(d=2, delta=delta, constraints=(MEAN,)))
        val = model.diagnostics["mean_constraint_value"]["primary"]
        assert val <= delta ** 2 + 1e-4
        assert model.diagnostics["facial_reduction"] is False

    def test_variance_grows_with_delta(self):
        ds = synth_two_gaussians(n_per_class=120, seed=2)
        fracs = []
        for delta in (0.0, 0.5, np.inf):
            model = fit(ds, FpcaConfig(d=2, delta=delta,
                                       constraints=(MEAN,)))
            fracs.append(model.diagnostics["explained_variance_fraction"])
        assert fracs[0] <= fracs[1] + 1e-6
        assert fracs[1] <= fracs[2] + 1e-6

    def test_completion_when_gap_spans_too_much(self):
        # one feature, one gap direction: no fair axis remains
        rng = np.random.default_rng(11)
        x = np.concatenate([rng.standard_normal(30) + 2,
                            rng.standard_normal(30) - 2])
        z = np.concatenate([np.ones(30), -np.ones(30)])
        ds = Dataset(X=x[:, None], z=z)
        with pytest.raises(DegenerateProtectedClass):
            fit(ds, FpcaConfig(d=1, delta=0.0, constraints=(MEAN,)))

    def test_completion_pads_with_span_directions(self):
        # two features, gap along one: only one fair direction exists, so
        # d=2 completes from the gap span and reports the violation
        rng = np.random.default_rng(12)
        n = 80
        X = rng.standard_normal((n, 2))
        z = _labels(rng, n)
        X[z > 0, 0] += 3.0
        ds = Dataset(X=X, z=z)
        model = fit(ds, FpcaConfig(d=2, delta=0.0, constraints=(MEAN,)))
        assert model.V.shape == (2, 2)
        assert np.allclose(model.V.T @ model.V, np.eye(2), atol=1e-8)
        # the padded axis carries the full mean gap
        Xs, _ = normalize(ds)
        st = group_stats(Xs.X, Xs.z)
        proj = model.V.T @ st.f
        assert np.abs(proj).max() > 0.1


class TestFitCovariance:
    def test_penalty_shrinks_group_covariance_gap(self):
        # the gap sits on the dominant variance direction here, so closing
        # it costs most of the variance; the penalty must make that trade
        # once mu prices the gap above the variance loss
        ds = synth_two_gaussians(n_per_class=150, seed=3)
        base = fit(ds, FpcaConfig(d=2))
        pen = fit(ds, FpcaConfig(d=2, mu=0.5, constraints=(COVARIANCE,)))
        Xs, _ = normalize(ds)
        st = group_stats(Xs.X, Xs.z)

        def gap(model):
            return np.linalg.norm(model.V.T @ st.q @ model.V, 2)

        assert gap(pen) < 0.15 * gap(base)
        assert pen.diagnostics["explained_variance_fraction"] < \
            base.diagnostics["explained_variance_fraction"]
        t_star = pen.diagnostics["t_star"]["primary"]
        assert t_star >= 0
        assert pen.diagnostics["post_rounding_cov_norm"]["primary"] == \
            pytest.approx(gap(pen), abs=1e-8)

    def test_weak_penalty_never_raises_the_gap(self):
        ds = synth_two_gaussians(n_per_class=150, seed=3)
        base = fit(ds, FpcaConfig(d=2))
        weak = fit(ds, FpcaConfig(d=2, mu=0.01, constraints=(COVARIANCE,)))
        Xs, _ = normalize(ds)
        st = group_stats(Xs.X, Xs.z)
        g_base = np.linalg.norm(base.V.T @ st.q @ base.V, 2)
        g_weak = np.linalg.norm(weak.V.T @ st.q @ weak.V, 2)
        assert g_weak <= g_base + 1e-3


class TestExtractComponents:
    def _sol(self, P, status=SolveStatus.OPTIMAL, res=1e-9):
        x = svec(P)
        return sdp.Solution(x=x, y=np.zeros(1), s=np.zeros(1), status=status,
                            primal_residual=res, dual_residual=res,
                            duality_gap=res, iterations=10)

    def test_top_eigenvectors(self):
        P = np.diag([1.0, 0.6, 0.1])
        V, w = extract_components(self._sol(P), 2)
        assert np.allclose(np.abs(V), np.eye(3)[:, :2], atol=1e-12)
        assert np.allclose(w, [1.0, 0.6, 0.1])

    def test_tie_warning(self):
        P = np.diag([0.8, 0.8, 0.1])
        with pytest.warns(TieWarning):
            extract_components(self._sol(P), 1)

    def test_max_iters_gating(self):
        P = np.diag([1.0, 0.3])
        sol = self._sol(P, status=SolveStatus.MAX_ITERS, res=5e-4)
        V, _ = extract_components(sol, 1)
        assert V.shape == (2, 1)
        bad = self._sol(P, status=SolveStatus.MAX_ITERS, res=5e-2)
        with pytest.raises(NumericalFailure):
            extract_components(bad, 1)

    def test_infeasible_rejected(self):
        sol = self._sol(np.eye(2), status=SolveStatus.INFEASIBLE)
        with pytest.raises(NumericalFailure):
            extract_components(sol, 1)

    def test_d_out_of_range(self):
        with pytest.raises(InvalidDimension):
            extract_components(self._sol(np.eye(2)), 3)


class TestModelPersistence:
    def test_linear_round_trip(self, tmp_path):
        rng = np.random.default_rng(13)
        ds = _dataset(rng)
        model = fit(ds, FpcaConfig(d=2, delta=0.5, constraints=(MEAN,)))
        path = tmp_path / "model.json"
        model.to_json_file(str(path))
        back = FpcaModel.from_json_file(str(path))
        assert np.allclose(back.V, model.V)
        assert back.config.to_dict() == model.config.to_dict()
        X_new = rng.standard_normal((7, 5))
        assert np.allclose(transform(back, X_new), transform(model, X_new))

    def test_kernel_round_trip(self, tmp_path):
        ds = synth_two_gaussians(n_per_class=40, seed=4)
        cfg = FpcaConfig(d=2, kernel=KernelSpec(kind="gaussian",
                                                bandwidth=None))
        model = fit(ds, cfg)
        assert model.mode == "kernel"
        path = tmp_path / "kmodel.json"
        model.to_json_file(str(path))
        back = FpcaModel.from_json_file(str(path))
        U1 = transform(model, ds.X)
        U2 = transform(back, ds.X)
        assert np.allclose(U1, U2, atol=1e-12)
        assert U1.shape == (80, 2)

    def test_transform_checks_width(self):
        rng = np.random.default_rng(14)
        ds = _dataset(rng)
        model = fit(ds, FpcaConfig(d=1))
        with pytest.raises(DimensionMismatch):
            transform(model, rng.standard_normal((3, 4)))


class TestKernelFit:
    def test_exact_mean_constraint(self):
        ds = synth_two_gaussians(n_per_class=40, seed=5)
        cfg = FpcaConfig(d=2, delta=0.0, constraints=(MEAN,),
                         kernel=KernelSpec(kind="gaussian", bandwidth=None))
        model = fit(ds, cfg)
        assert model.diagnostics["facial_reduction"] is True
        assert model.diagnostics["p_star_f_norm"]["primary"] <= 1e-8

    def test_unconstrained_tracks_gram_spectrum(self):
        ds = synth_two_gaussians(n_per_class=40, seed=6)
        cfg = FpcaConfig(d=1, kernel=KernelSpec(kind="gaussian",
                                                bandwidth=None))
        model = fit(ds, cfg)
        frac = model.diagnostics["explained_variance_fraction"]
        assert 0.0 < frac <= 1.0 + 1e-9


class TestKlBound:
    def test_identical_groups_give_zero(self):
        V = np.eye(3)[:, :2]
        w = np.array([0.6, -0.8])
        mu = np.zeros(3)
        sigma = np.eye(3)
        assert kl_fairness_bound(w, V, mu, mu, sigma, sigma) == 0.0

    def test_hand_value(self):
        # s+ = s- = 1, mean gap 1 along the score: inner = 1, bound = 1/2
        V = np.eye(2)
        w = np.array([1.0, 0.0])
        bound = kl_fairness_bound(w, V, np.array([1.0, 0.0]), np.zeros(2),
                                  np.eye(2), np.eye(2))
        assert bound == pytest.approx(0.5)

    def test_general_formula(self):
        rng = np.random.default_rng(15)
        for _ in range(20):
            p, d = 4, 2
            V = np.linalg.qr(rng.standard_normal((p, d)))[0]
            w = rng.standard_normal(d)
            A = rng.standard_normal((p, p))
            B = rng.standard_normal((p, p))
            sp = A @ A.T + 0.1 * np.eye(p)
            sm = B @ B.T + 0.1 * np.eye(p)
            mp = rng.standard_normal(p)
            mn = rng.standard_normal(p)
            a = V @ w
            s1 = a @ sp @ a
            s2 = a @ sm @ a
            inner = s2 / s1 + (a @ mp - a @ mn) ** 2 / s1 + np.log(s1 / s2) - 1
            want = np.sqrt(max(inner, 0.0) / 4.0)
            got = kl_fairness_bound(w, V, mp, mn, sp, sm)
            assert got == pytest.approx(want, rel=1e-12)

    def test_degenerate_variance(self):
        V = np.eye(2)
        with pytest.raises(DegenerateVariance):
            kl_fairness_bound(np.array([1.0, 0.0]), V, np.zeros(2),
                              np.zeros(2), np.zeros((2, 2)), np.eye(2))

    def test_dimension_check(self):
        with pytest.raises(DimensionMismatch):
            kl_fairness_bound(np.ones(3), np.eye(2), np.zeros(2),
                              np.zeros(2), np.eye(2), np.eye(2))
