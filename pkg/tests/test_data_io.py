"""Dataset container, CSV loading, normalization, splits, and generators."""

import numpy as np
import pytest

from fairpca.data_io import (Dataset, SplitSpec, load_csv, normalize,
                             save_csv, split, subsample_rows,
                             synth_activity_profiles, synth_two_gaussians)
from fairpca.errors import (DegenerateFeatures, DegenerateProtectedClass,
                            DimensionMismatch, EmptyDataset, InvalidArgument,
                            SchemaError, StratificationError)


class TestDataset:
    def test_default_feature_names(self):
        ds = Dataset(X=np.zeros((3, 2)), z=[1.0, -1.0, 1.0])
        assert ds.feature_names == ("x0", "x1")
        assert ds.n == 3 and ds.p == 2

    def test_validation(self):
        with pytest.raises(EmptyDataset):
            Dataset(X=np.zeros((0, 2)), z=[])
        with pytest.raises(InvalidArgument):
            Dataset(X=np.array([[np.nan, 0.0]]), z=[1.0])
        with pytest.raises(DimensionMismatch):
            Dataset(X=np.zeros((2, 1)), z=[1.0])
        with pytest.raises(InvalidArgument):
            Dataset(X=np.zeros((2, 1)), z=[1.0, 2.0])
        with pytest.raises(DegenerateProtectedClass):
            Dataset(X=np.zeros((2, 1)), z=[1.0, 1.0])
        with pytest.raises(DimensionMismatch):
            Dataset(X=np.zeros((2, 1)), z=[1.0, -1.0], y=[0.5])
        with pytest.raises(InvalidArgument):
            Dataset(X=np.zeros((2, 1)), z=[1.0, -1.0], extras=([0.0, 1.0],))
        with pytest.raises(DimensionMismatch):
            Dataset(X=np.zeros((2, 1)), z=[1.0, -1.0],
                    feature_names=("a", "b"))

    def test_take_slices_all_fields(self):
        ds = Dataset(X=np.arange(8.0).reshape(4, 2),
                     z=[1.0, -1.0, 1.0, -1.0],
                     y=[0.0, 1.0, 2.0, 3.0],
                     extras=([1.0, 1.0, -1.0, -1.0],))
        sub = ds.take(np.array([0, 3]))
        assert np.array_equal(sub.X, [[0.0, 1.0], [6.0, 7.0]])
        assert np.array_equal(sub.z, [1.0, -1.0])
        assert np.array_equal(sub.y, [0.0, 3.0])
        assert np.array_equal(sub.extras[0], [1.0, -1.0])
        assert sub.feature_names == ds.feature_names


class TestLoadCsv:
    def _write(self, tmp_path, text, name="data.csv"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    def test_basic_mapping(self, tmp_path):
        path = self._write(tmp_path, "a,b,color,quality\n"
                                     "1.0,2.0,red,5\n"
                                     "3.0,4.0,white,6\n"
                                     "5.0,6.0,red,7\n")
        ds = load_csv(path, {"protected_col": "color",
                             "positive_value": "red",
                             "label_col": "quality"})
        assert ds.feature_names == ("a", "b")
        assert np.array_equal(ds.z, [1.0, -1.0, 1.0])
        assert np.array_equal(ds.y, [5.0, 6.0, 7.0])
        assert ds.n_dropped == 0
        assert ds.provenance["path"] == path

    def test_numeric_protected_value(self, tmp_path):
        path = self._write(tmp_path, "a,grp\n1.0,1\n2.0,0\n3.0,1\n")
        ds = load_csv(path, {"protected_col": "grp", "positive_value": 1})
        assert np.array_equal(ds.z, [1.0, -1.0, 1.0])

    def test_label_positive_maps_to_signs(self, tmp_path):
        path = self._write(tmp_path, "a,g,out\n1,x,yes\n2,y,no\n3,x,yes\n")
        ds = load_csv(path, {"protected_col": "g", "positive_value": "x",
                             "label_col": "out", "label_positive": "yes"})
        assert np.array_equal(ds.y, [1.0, -1.0, 1.0])

    def test_missing_rows_dropped_and_counted(self, tmp_path):
        path = self._write(tmp_path, "a,b,g\n1,2,u\n,4,v\n5,6,v\n7,8,\n")
        ds = load_csv(path, {"protected_col": "g", "positive_value": "u"})
        assert ds.n == 2
        assert ds.n_dropped == 2
        assert np.array_equal(ds.X, [[1.0, 2.0], [5.0, 6.0]])

    def test_drop_cols_and_extras(self, tmp_path):
        path = self._write(tmp_path, "a,junk,g,h\n1,9,u,m\n2,9,v,f\n3,9,u,f\n")
        ds = load_csv(path, {"protected_col": "g", "positive_value": "u",
                             "drop_cols": ["junk"],
                             "extra_protected": [
                                 {"col": "h", "positive_value": "m"}]})
        assert ds.feature_names == ("a",)
        assert len(ds.extras) == 1
        assert np.array_equal(ds.extras[0], [1.0, -1.0, -1.0])

    def test_schema_errors(self, tmp_path):
        path = self._write(tmp_path, "a,g\n1,u\n2,v\n")
        with pytest.raises(SchemaError):
            load_csv(path, {"protected_col": "g"})
        with pytest.raises(SchemaError):
            load_csv(path, {"protected_col": "nope", "positive_value": "u"})
        with pytest.raises(SchemaError):
            load_csv(path, {"protected_col": "g", "positive_value": "u",
                            "extra_protected": [{"col": "a"}]})
        with pytest.raises(SchemaError):
            load_csv(path, {"protected_col": "g", "positive_value": "u",
                            "drop_cols": ["a"]})

    def test_empty_and_unparsable(self, tmp_path):
        header_only = self._write(tmp_path, "a,g\n", name="empty.csv")
        with pytest.raises(EmptyDataset):
            load_csv(header_only, {"protected_col": "g",
                                   "positive_value": "u"})
        broken = self._write(tmp_path, 'a,g\n"1,u\n2', name="broken.csv")
        with pytest.raises(SchemaError):
            load_csv(broken, {"protected_col": "g", "positive_value": "u"})

    def test_missing_file_propagates(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(str(tmp_path / "absent.csv"),
                     {"protected_col": "g", "positive_value": "u"})

    def test_save_load_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        ds = Dataset(X=rng.standard_normal((12, 3)),
                     z=np.where(rng.random(12) < 0.5, 1.0, -1.0),
                     y=rng.standard_normal(12))
        ds.z[0], ds.z[1] = 1.0, -1.0
        path = str(tmp_path / "round.csv")
        save_csv(ds, path)
        back = load_csv(path, {"protected_col": "z", "positive_value": "1.0",
                               "label_col": "y"})
        assert np.array_equal(back.X, ds.X)
        assert np.array_equal(back.z, ds.z)
        assert np.array_equal(back.y, ds.y)


class TestNormalize:
    def test_postconditions(self):
        rng = np.random.default_rng(1)
        ds = Dataset(X=rng.standard_normal((50, 4)) * 7 + 3,
                     z=np.concatenate([np.ones(25), -np.ones(25)]))
        out, scaler = normalize(ds)
        assert np.abs(out.X.mean(axis=0)).max() < 1e-10
        assert np.allclose(out.X.std(axis=0, ddof=1), 1.0)
        assert np.allclose(scaler.apply(ds.X), out.X)

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        ds = Dataset(X=rng.standard_normal((30, 3)),
                     z=np.concatenate([np.ones(15), -np.ones(15)]))
        once, _ = normalize(ds)
        twice, _ = normalize(once)
        assert np.allclose(once.X, twice.X, atol=1e-12)

    def test_constant_column_dropped_with_warning(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((20, 3))
        X[:, 1] = 4.2
        ds = Dataset(X=X, z=np.concatenate([np.ones(10), -np.ones(10)]),
                     feature_names=("a", "b", "c"))
        with pytest.warns(UserWarning, match="constant"):
            out, scaler = normalize(ds)
        assert out.feature_names == ("a", "c")
        assert out.p == 2
        assert np.array_equal(scaler.kept, [0, 2])

    def test_all_constant_rejected(self):
        ds = Dataset(X=np.full((5, 2), 3.0), z=[1, -1, 1, -1, 1])
        with pytest.raises(DegenerateFeatures):
            normalize(ds)

    def test_single_row_rejected(self):
        ds0 = Dataset(X=np.array([[1.0], [2.0]]), z=[1.0, -1.0])
        one = ds0.take(np.array([0, 1]))
        tiny = Dataset(X=np.array([[1.0], [2.0]]), z=[1.0, -1.0])
        # two rows is the boundary; it normalizes fine
        normalize(tiny)
        with pytest.raises(DegenerateProtectedClass):
            one.take(np.array([0]))


class TestSplit:
    def _ds(self, n_pos, n_neg, seed=0):
        rng = np.random.default_rng(seed)
        n = n_pos + n_neg
        X = np.arange(n, dtype=np.float64)[:, None]  # unique row ids
        z = np.concatenate([np.ones(n_pos), -np.ones(n_neg)])
        perm = rng.permutation(n)
        return Dataset(X=X[perm], z=z[perm])

    def test_exact_sizes_and_partition(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n_pos = int(rng.integers(5, 40))
            n_neg = int(rng.integers(5, 40))
            frac = float(rng.uniform(0.3, 0.8))
            ds = self._ds(n_pos, n_neg, seed=int(rng.integers(1000)))
            tr, te = split(ds, SplitSpec(train_fraction=frac, seed=1))
            n = n_pos + n_neg
            assert tr.n == int(round(frac * n))
            assert tr.n + te.n == n
            ids = np.concatenate([tr.X[:, 0], te.X[:, 0]])
            assert np.array_equal(np.sort(ids), np.arange(n, dtype=float))

    def test_stratification_balance(self):
        ds = self._ds(30, 70)
        tr, te = split(ds, SplitSpec(train_fraction=0.6, seed=2))
        # largest remainder on (30, 70) at 60 train rows: 18 + 42
        assert int((tr.z > 0).sum()) == 18
        assert int((tr.z < 0).sum()) == 42
        assert (te.z > 0).any() and (te.z < 0).any()

    def test_deterministic_and_seed_sensitive(self):
        ds = self._ds(25, 25)
        a1, _ = split(ds, SplitSpec(seed=7))
        a2, _ = split(ds, SplitSpec(seed=7))
        b1, _ = split(ds, SplitSpec(seed=8))
        assert np.array_equal(a1.X, a2.X)
        assert not np.array_equal(a1.X, b1.X)

    def test_unstratified_path(self):
        ds = self._ds(4, 46)
        tr, te = split(ds, SplitSpec(train_fraction=0.5, seed=3,
                                     stratify=False))
        assert tr.n == 25 and te.n == 25

    def test_tiny_class_raises(self):
        ds = self._ds(1, 20)
        with pytest.raises(StratificationError):
            split(ds, SplitSpec(train_fraction=0.5, seed=0))

    def test_degenerate_fraction_raises(self):
        ds = self._ds(10, 10)
        with pytest.raises(StratificationError):
            split(ds, SplitSpec(train_fraction=0.999, seed=0))


class TestSubsample:
    def test_small_input_unchanged(self):
        ds = Dataset(X=np.zeros((5, 1)), z=[1, -1, 1, -1, 1])
        assert subsample_rows(ds, 10) is ds

    def test_cap_and_class_floor(self):
        rng = np.random.default_rng(5)
        n = 200
        X = np.arange(n, dtype=np.float64)[:, None]
        z = np.concatenate([np.ones(4), -np.ones(n - 4)])
        ds = Dataset(X=X, z=z)
        sub = subsample_rows(ds, 50, seed=0)
        assert sub.n == 50
        assert (sub.z > 0).any() and (sub.z < 0).any()
        # sorted indices preserve the original relative order
        assert np.all(np.diff(sub.X[:, 0]) > 0)

    def test_deterministic(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((120, 2))
        z = np.where(rng.random(120) < 0.5, 1.0, -1.0)
        z[0], z[1] = 1.0, -1.0
        ds = Dataset(X=X, z=z)
        s1 = subsample_rows(ds, 40, seed=3)
        s2 = subsample_rows(ds, 40, seed=3)
        assert np.array_equal(s1.X, s2.X)


class TestGenerators:
    def test_two_gaussians_shape_and_balance(self):
        ds = synth_two_gaussians(n_per_class=200, seed=0)
        assert ds.X.shape == (400, 3)
        assert int((ds.z > 0).sum()) == 200
        assert ds.provenance["generator"] == "two_gaussians"

    def test_two_gaussians_gap_geometry(self):
        # mean and covariance gaps point along (1,1,1)/sqrt(3); the
        # orthogonal plane stays fair up to sampling noise
        ds = synth_two_gaussians(n_per_class=2000, seed=1)
        g = np.ones(3) / np.sqrt(3)
        h2 = np.array([1.0, -1.0, 0.0]) / np.sqrt(2)
        gap = ds.X[ds.z > 0].mean(axis=0) - ds.X[ds.z < 0].mean(axis=0)
        assert gap @ g == pytest.approx(4.0, abs=0.25)
        assert abs(gap @ h2) < 0.15
        var_plus = np.var(ds.X[ds.z > 0] @ g)
        var_minus = np.var(ds.X[ds.z < 0] @ g)
        assert var_plus > var_minus + 2.0

    def test_two_gaussians_seeded(self):
        a = synth_two_gaussians(n_per_class=50, seed=9)
        b = synth_two_gaussians(n_per_class=50, seed=9)
        c = synth_two_gaussians(n_per_class=50, seed=10)
        assert np.array_equal(a.X, b.X)
        assert not np.array_equal(a.X, c.X)

    def test_two_gaussians_custom_params(self):
        mu = np.zeros(2)
        sig = np.eye(2)
        ds = synth_two_gaussians(n_per_class=30, means=(mu, mu),
                                 covariances=(sig, sig), seed=0)
        assert ds.X.shape == (60, 2)
        with pytest.raises(InvalidArgument):
            synth_two_gaussians(n_per_class=1)

    def test_activity_profiles(self):
        ds = synth_activity_profiles(n=400, buckets=48, seed=2)
        assert ds.X.shape == (400, 48)
        assert (ds.z > 0).any() and (ds.z < 0).any()
        hours = 24.0 * (np.arange(48) + 0.5) / 48
        evening = (np.abs(hours - 20.0) < 2.0)
        morning = (np.abs(hours - 8.0) < 2.0)
        old = ds.X[ds.z > 0].mean(axis=0)
        young = ds.X[ds.z < 0].mean(axis=0)
        # the older class tilts toward the evening peak, the younger
        # toward the morning peak
        assert old[evening].mean() > young[evening].mean()
        assert young[morning].mean() > old[morning].mean()

    def test_activity_profiles_validation(self):
        with pytest.raises(InvalidArgument):
            synth_activity_profiles(n=2)
        with pytest.raises(InvalidArgument):
            synth_activity_profiles(n=10, age_mix=1.5)

    def test_activity_profiles_seeded(self):
        a = synth_activity_profiles(n=50, buckets=24, seed=4)
        b = synth_activity_profiles(n=50, buckets=24, seed=4)
        assert np.array_equal(a.X, b.X)
        assert np.array_equal(a.z, b.z)
