"""Batch command line interface.

Every command resolves its arguments into a plain JSON-serializable config,
runs, and records a manifest (run-manifest/1) holding the resolved config,
seeds, input digests and output names. ``--from-manifest`` re-dispatches a
recorded run; all outputs except the manifest itself (which carries wall
clock fields) are byte-identical on rerun.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 solver
non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np
import pandas as pd

from . import __version__, _svg, data_io, fairness, fpca, learners
from ._inner import BACKEND
from .errors import (
    ConfigurationError,
    DegenerateFeatures,
    DegenerateLabels,
    DegenerateProtectedClass,
    DegenerateVariance,
    DimensionMismatch,
    EmptyCluster,
    EmptyDataset,
    FairPcaError,
    InvalidArgument,
    InvalidDimension,
    InvalidKernel,
    NotPositiveSemidefinite,
    NumericalFailure,
    PreconditionViolated,
    SchemaError,
    StratificationError,
)
from .fpca import FpcaConfig, FpcaModel
from .kernels import KernelSpec
from .sdp import SolverSettings

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_SOLVER = 4

_CONFIG_ERRORS = (ConfigurationError, InvalidArgument, InvalidDimension,
                  InvalidKernel, SchemaError)
_DATA_ERRORS = (EmptyDataset, DegenerateProtectedClass, DegenerateFeatures,
                DegenerateLabels, DegenerateVariance, StratificationError,
                DimensionMismatch, EmptyCluster, FileNotFoundError)
_SOLVER_ERRORS = (NumericalFailure, PreconditionViolated,
                  NotPositiveSemidefinite)

_VARIANTS = ("unconstrained", "mean", "both")
_DEFAULT_DELTAS = (0.0, 0.1, 0.3, 0.5)
_DEFAULT_MUS = (0.0, 0.001, 0.01, 0.1)
_SWEEP_MU_CAP = 0.1


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------

def _read_config_file(path: str) -> dict:
    """Config files are configuration: missing or unparsable exits 2."""
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from exc


def _dataset_spec_from_args(args) -> dict:
    if getattr(args, "dataset_config", None):
        spec = _read_config_file(args.dataset_config)
        if "generator" not in spec and "path" not in spec:
            raise ConfigurationError(
                "dataset config needs either 'generator' or 'path'")
        return spec
    if not getattr(args, "input", None):
        raise ConfigurationError("need --input or --dataset-config")
    if not getattr(args, "protected_col", None) \
            or getattr(args, "positive_value", None) is None:
        raise ConfigurationError(
            "--input needs --protected-col and --positive-value")
    spec = {"path": args.input, "protected_col": args.protected_col,
            "positive_value": args.positive_value}
    if getattr(args, "label_col", None):
        spec["label_col"] = args.label_col
    if getattr(args, "label_positive", None) is not None:
        spec["label_positive"] = args.label_positive
    if getattr(args, "drop_cols", None):
        spec["drop_cols"] = [c for c in args.drop_cols.split(",") if c]
    return spec


def _load_dataset(spec: dict, seed: int) -> data_io.Dataset:
    if "generator" in spec:
        params = dict(spec.get("params", {}))
        params.setdefault("seed", seed)
        gen = spec["generator"]
        if gen == "two_gaussians":
            return data_io.synth_two_gaussians(**params)
        if gen == "activity_profiles":
            return data_io.synth_activity_profiles(**params)
        raise ConfigurationError(f"unknown generator {gen!r}")
    # schema keys may sit at the top level or under a nested "schema" block
    schema = dict(spec["schema"]) if isinstance(spec.get("schema"), dict) \
        else spec
    return data_io.load_csv(spec["path"], schema)


def _kernel_from_cfg(doc: dict | None) -> KernelSpec | None:
    if not doc:
        return None
    return KernelSpec.from_dict(doc)


def _fpca_config(cfg: dict, extras=()) -> FpcaConfig:
    delta = cfg.get("delta")
    return FpcaConfig(
        d=int(cfg["dim"]),
        delta=np.inf if delta is None else float(delta),
        mu=float(cfg.get("mu", 0.0)),
        constraints=tuple(cfg.get("constraints", ())),
        kernel=_kernel_from_cfg(cfg.get("kernel")),
        extra_protected=extras,
        joint_fairness=bool(cfg.get("joint_fairness", False)),
    )


def _solver_settings(cfg: dict) -> SolverSettings:
    tol = cfg.get("solver_tol")
    tol = 1e-5 if tol is None else float(tol)
    return SolverSettings(eps_abs=tol, eps_rel=tol)


def _variant_config(cfg: dict, variant: str, extras=()) -> FpcaConfig:
    base = {"dim": cfg["dim"], "kernel": cfg.get("kernel"),
            "joint_fairness": cfg.get("joint_fairness", False)}
    if variant == "unconstrained":
        base.update(delta=None, mu=0.0, constraints=())
    elif variant == "mean":
        base.update(delta=cfg.get("delta", 0.0), mu=0.0,
                    constraints=("mean",))
    elif variant == "both":
        base.update(delta=cfg.get("delta", 0.0), mu=cfg.get("mu", 0.01),
                    constraints=("mean", "covariance"))
    else:
        raise ConfigurationError(f"unknown variant {variant!r}")
    return _fpca_config(base, extras)


def _repr_cell(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_repr_cell(v) for v in row) + "\n")


def _write_reduced_csv(path: str, U: np.ndarray, z=None, y=None) -> None:
    header = [f"u{j}" for j in range(U.shape[1])]
    if z is not None:
        header.append("z")
    if y is not None:
        header.append("y")
    rows = []
    for i in range(U.shape[0]):
        row = [float(v) for v in U[i]]
        if z is not None:
            row.append(float(z[i]))
        if y is not None:
            row.append(float(y[i]))
        rows.append(row)
    _write_csv(path, header, rows)


def _pct_var(model: FpcaModel, ds_test: data_io.Dataset) -> float:
    """Percent of test variance captured by the model's components."""
    Xt = model.scaler.apply(ds_test.X)
    U = Xt @ model.V
    num = float(U.var(axis=0, ddof=1).sum())
    den = float(Xt.var(axis=0, ddof=1).sum())
    return 100.0 * num / den if den > 0 else 0.0


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _collect_input_paths(obj) -> list[str]:
    found = []
    if isinstance(obj, dict):
        for v in obj.values():
            found.extend(_collect_input_paths(v))
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            found.extend(_collect_input_paths(v))
    elif isinstance(obj, str) and os.path.isfile(obj):
        found.append(obj)
    return found


def _write_manifest(out_dir: str, command: str, cfg: dict,
                    outputs: list[str], started: str, elapsed: float) -> None:
    doc = {
        "format": "run-manifest/1",
        "tool": "fairpca",
        "version": __version__,
        "backend": BACKEND,
        "command": command,
        "config": cfg,
        "input_digests": {p: _sha256(p)
                          for p in sorted(set(_collect_input_paths(cfg)))},
        "outputs": sorted(outputs),
        "started_utc": started,
        "elapsed_seconds": elapsed,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w",
              encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Command runners (cfg dict -> list of output filenames)
# ---------------------------------------------------------------------------

def _run_fit(cfg: dict, out_dir: str) -> list[str]:
    ds = _load_dataset(cfg["dataset"], cfg["seed"])
    config = _fpca_config(cfg, extras=ds.extras)
    model = fpca.fit(ds, config, solver_settings=_solver_settings(cfg),
                     seed=cfg["seed"])
    model_path = os.path.join(out_dir, "model.json")
    model.to_json_file(model_path)
    with open(os.path.join(out_dir, "diagnostics.json"), "w",
              encoding="utf-8") as fh:
        json.dump(fpca._json_safe(model.diagnostics), fh, indent=1)
        fh.write("\n")
    return ["model.json", "diagnostics.json"]


def _run_transform(cfg: dict, out_dir: str) -> list[str]:
    model = FpcaModel.from_json_file(cfg["model"])
    ds = _load_dataset(cfg["dataset"], cfg["seed"])
    U = model.transform(ds.X)
    _write_reduced_csv(os.path.join(out_dir, "reduced.csv"), U, ds.z, ds.y)
    return ["reduced.csv"]


def _run_evaluate(cfg: dict, out_dir: str) -> list[str]:
    ds = _load_dataset(cfg["dataset"], cfg["seed"])
    report = fairness.fairness_report(
        ds.X, ds.z, families=tuple(cfg["families"]),
        kernel=_kernel_from_cfg(cfg.get("kernel")),
        cv_folds=int(cfg.get("cv_folds", 5)), seed=cfg["seed"],
        slack=float(cfg.get("slack", 0.05)))
    report.to_json_file(os.path.join(out_dir, "fairness_report.json"))
    return ["fairness_report.json"]


def _benchmark_metrics(model, te, seed):
    U_te = model.transform(te.X)
    pct = _pct_var(model, te)
    d_lin, _ = fairness.delta_linear_svm(U_te, te.z, seed=seed)
    d_rbf, _ = fairness.delta_kernel_svm(U_te, te.z, seed=seed)
    d_ks = fairness.delta_threshold_family(U_te, te.z)
    return pct, d_lin, d_rbf, d_ks


def _run_benchmark(cfg: dict, out_dir: str) -> list[str]:
    rows = []
    for entry in cfg["datasets"]:
        name = entry.get("name") or entry.get("path") or entry.get("generator")
        merged = {"dim": cfg["dim"], "delta": cfg.get("delta", 0.0),
                  "mu": cfg.get("mu", 0.01)}
        for key in ("dim", "delta", "mu"):
            if key in entry:
                merged[key] = entry[key]
        try:
            ds = _load_dataset(entry, cfg["seed"])
            acc = {v: [] for v in _VARIANTS}
            for split_i in range(int(cfg.get("splits", 5))):
                seed_i = cfg["seed"] + split_i
                tr, te = data_io.split(ds, data_io.SplitSpec(seed=seed_i))
                for variant in _VARIANTS:
                    vcfg = _variant_config(
                        {**merged, "solver_tol": cfg.get("solver_tol")},
                        variant, extras=tr.extras)
                    model = fpca.fit(tr, vcfg,
                                     solver_settings=_solver_settings(cfg),
                                     seed=seed_i)
                    acc[variant].append(
                        _benchmark_metrics(model, te, seed_i))
            for variant in _VARIANTS:
                vals = np.array(acc[variant])
                rows.append([name, variant,
                             float(vals[:, 0].mean()),
                             float(vals[:, 1].mean()),
                             float(vals[:, 2].mean()),
                             float(vals[:, 3].mean()), ""])
        except (FairPcaError, FileNotFoundError) as exc:
            rows.append([name, "", "", "", "", "",
                         f"{type(exc).__name__}: {exc}"])
    _write_csv(os.path.join(out_dir, "benchmark.csv"),
               ["dataset", "variant", "pct_var", "delta_lin", "delta_rbf",
                "ks", "failure"], rows)
    return ["benchmark.csv"]


def _run_sweep(cfg: dict, out_dir: str) -> list[str]:
    deltas = [float(v) for v in cfg["deltas"]]
    mus = [float(v) for v in cfg["mus"]]
    if any(m > _SWEEP_MU_CAP for m in mus):
        raise ConfigurationError(
            f"sweep mu values are capped at {_SWEEP_MU_CAP}")
    ds = _load_dataset(cfg["dataset"], cfg["seed"])
    resplits = int(cfg.get("resplits", 10))

    cells = [("mean", delta, None) for delta in deltas]
    cells += [("both", delta, mu) for delta in deltas for mu in mus]
    acc = {cell: [] for cell in cells}
    for split_i in range(resplits):
        seed_i = cfg["seed"] + split_i
        tr, te = data_io.split(ds, data_io.SplitSpec(seed=seed_i))
        for variant, delta, mu in cells:
            vcfg = _fpca_config({"dim": cfg["dim"], "delta": delta,
                                 "mu": 0.0 if mu is None else mu,
                                 "constraints": ["mean"] if variant == "mean"
                                 else ["mean", "covariance"],
                                 "kernel": cfg.get("kernel")},
                                extras=tr.extras)
            model = fpca.fit(tr, vcfg,
                             solver_settings=_solver_settings(cfg),
                             seed=seed_i)
            U_te = model.transform(te.X)
            d_lin, _ = fairness.delta_linear_svm(U_te, te.z, seed=seed_i)
            acc[(variant, delta, mu)].append((_pct_var(model, te), d_lin))
    rows = []
    for variant, delta, mu in cells:
        vals = np.array(acc[(variant, delta, mu)])
        rows.append([variant, float(delta),
                     "" if mu is None else float(mu),
                     float(vals[:, 0].mean()), float(vals[:, 1].mean())])
    rows.sort(key=lambda r: (r[0], r[1], -1.0 if r[2] == "" else r[2]))
    _write_csv(os.path.join(out_dir, "sweep.csv"),
               ["variant", "delta", "mu", "pct_var", "delta_lin"], rows)
    return ["sweep.csv"]


def _run_cluster(cfg: dict, out_dir: str) -> list[str]:
    ds = _load_dataset(cfg["dataset"], cfg["seed"])
    tr, te = data_io.split(ds, data_io.SplitSpec(seed=cfg["seed"]))
    k = int(cfg["k"])
    report = {"format": "cluster-report/1", "k": k, "dim": cfg["dim"],
              "variants": {}}
    outputs = []
    for variant in cfg.get("variants", list(_VARIANTS)):
        vcfg = _variant_config(cfg, variant, extras=tr.extras)
        model = fpca.fit(tr, vcfg, solver_settings=_solver_settings(cfg),
                         seed=cfg["seed"])
        U_tr = model.transform(tr.X)
        U_te = model.transform(te.X)
        km = learners.kmeans(U_tr, k, restarts=10, seed=cfg["seed"])
        assign = km.assign(U_te)
        stddev = learners.cluster_composition_stddev(assign, te.z,
                                                     n_clusters=k)
        d2 = ((U_te[:, None, :] - km.centers[None]) ** 2).sum(axis=2)
        inertia_test = float(d2.min(axis=1).mean())
        comp = []
        sizes = []
        for j in range(k):
            members = assign == j
            sizes.append(int(members.sum()))
            comp.append(100.0 * float((te.z[members] > 0).mean())
                        if members.any() else None)
        name = f"assignments_{variant}.csv"
        _write_csv(os.path.join(out_dir, name), ["row", "cluster"],
                   [[int(i), int(assign[i])] for i in range(assign.shape[0])])
        outputs.append(name)
        report["variants"][variant] = {
            "composition_pct_positive": comp,
            "composition_stddev": float(stddev),
            "cluster_sizes": sizes,
            "inertia_train": float(km.inertia),
            "inertia_test": inertia_test,
        }
    with open(os.path.join(out_dir, "cluster_report.json"), "w",
              encoding="utf-8") as fh:
        json.dump(report, fh, indent=1)
        fh.write("\n")
    outputs.append("cluster_report.json")
    return outputs


def _run_plot(cfg: dict, out_dir: str) -> list[str]:
    path = cfg["input"]
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise SchemaError(f"cannot parse {path}: {exc}") from exc
    if frame.shape[0] == 0:
        raise EmptyDataset(f"{path} has no rows")
    kind = cfg.get("kind") or (
        "sweep" if {"variant", "delta", "mu"} <= set(frame.columns)
        else "scatter")
    if kind == "sweep":
        svg = _plot_sweep(frame)
    else:
        svg = _plot_scatter(frame, cfg)
    with open(os.path.join(out_dir, "plot.svg"), "w", encoding="utf-8") as fh:
        fh.write(svg)
    return ["plot.svg"]


def _plot_sweep(frame: pd.DataFrame) -> str:
    ycol = "delta_lin"
    curves = []
    mean_rows = frame[frame["variant"] == "mean"]
    if len(mean_rows):
        pts = [(float(r["delta"]), float(r[ycol]))
               for _, r in mean_rows.iterrows()]
        curves.append(("mean only", "#d62728", None, pts))
    both_rows = frame[frame["variant"] == "both"]
    dashes = ["2,3", "5,3", "8,3", "11,3"]
    for i, mu in enumerate(sorted(both_rows["mu"].dropna().unique())):
        sel = both_rows[both_rows["mu"] == mu]
        pts = [(float(r["delta"]), float(r[ycol]))
               for _, r in sel.iterrows()]
        curves.append((f"mu={mu:g}", "#1f77b4", dashes[i % len(dashes)], pts))
    if not curves:
        raise EmptyDataset("sweep CSV has no mean/both rows")
    return _svg.curves_svg(curves, "delta", "separation (linear SVM)",
                           "fairness/utility sweep")


def _plot_scatter(frame: pd.DataFrame, cfg: dict) -> str:
    zcol = cfg.get("protected_col", "z")
    if zcol not in frame.columns:
        raise SchemaError(f"column {zcol!r} not in plot input")
    feat = [c for c in frame.columns if c not in (zcol, "y")]
    if len(feat) != 2:
        raise DimensionMismatch(
            f"scatter needs exactly 2 feature columns, found {len(feat)}")
    U = frame[feat].to_numpy(dtype=np.float64)
    z = np.where(frame[zcol].to_numpy(dtype=np.float64) > 0, 1.0, -1.0)
    line = None
    if (z > 0).any() and (z < 0).any():
        try:
            model = learners.train_linear_svm(U, z, seed=int(cfg["seed"]))
            line = (float(model.w[0]), float(model.w[1]), float(model.b))
        except DegenerateLabels:
            line = None
    return _svg.scatter_svg(U, z, line=line)


_RUNNERS = {
    "fit": _run_fit,
    "transform": _run_transform,
    "evaluate": _run_evaluate,
    "benchmark": _run_benchmark,
    "sweep": _run_sweep,
    "cluster": _run_cluster,
    "plot": _run_plot,
}


# ---------------------------------------------------------------------------
# Argument parsing and resolution
# ---------------------------------------------------------------------------

def _add_dataset_args(sub):
    sub.add_argument("--input", help="CSV file with features and labels")
    sub.add_argument("--dataset-config",
                     help="JSON dataset spec (path+schema or generator)")
    sub.add_argument("--protected-col")
    sub.add_argument("--positive-value")
    sub.add_argument("--label-col")
    sub.add_argument("--label-positive")
    sub.add_argument("--drop-cols", help="comma separated columns to drop")


def _add_model_args(sub):
    sub.add_argument("--dim", type=int, required=True)
    sub.add_argument("--delta", default=None,
                     help="mean-constraint bound; 'inf' disables the row")
    sub.add_argument("--mu", type=float, default=0.0)
    sub.add_argument("--constraints", default="",
                     help="comma subset of mean,covariance (empty = none)")
    sub.add_argument("--kernel", default=None,
                     choices=["linear", "gaussian", "polynomial"])
    sub.add_argument("--bandwidth", type=float, default=None)
    sub.add_argument("--degree", type=int, default=2)
    sub.add_argument("--coef", type=float, default=1.0)
    sub.add_argument("--joint-fairness", action="store_true")


def _parse_delta(raw) -> float | None:
    if raw is None:
        return None
    if isinstance(raw, str) and raw.strip().lower() in ("inf", "none", ""):
        return None
    return float(raw)


def _kernel_cfg_from_args(args) -> dict | None:
    if not getattr(args, "kernel", None):
        return None
    doc = {"kind": args.kernel, "bandwidth": args.bandwidth,
           "degree": args.degree, "coef": args.coef}
    KernelSpec.from_dict(doc)  # validate eagerly
    return doc


def _resolve_fit(args) -> dict:
    constraints = [c for c in (args.constraints or "").split(",")
                   if c and c != "none"]
    return {"dataset": _dataset_spec_from_args(args),
            "dim": args.dim,
            "delta": _parse_delta(args.delta),
            "mu": args.mu,
            "constraints": constraints,
            "kernel": _kernel_cfg_from_args(args),
            "joint_fairness": bool(args.joint_fairness)}


def _resolve_transform(args) -> dict:
    return {"model": args.model,
            "dataset": _dataset_spec_from_args(args)}


def _resolve_evaluate(args) -> dict:
    spec = {"path": args.input,
            "protected_col": args.protected_col or "z",
            "positive_value": (args.positive_value
                               if args.positive_value is not None else "1.0")}
    fams = [f for f in (args.families or "").split(",") if f] or \
        list((fairness.THRESHOLD, fairness.LINEAR_SVM, fairness.KERNEL_SVM))
    return {"dataset": spec, "families": fams, "slack": args.slack,
            "cv_folds": args.cv_folds}


def _resolve_benchmark(args) -> dict:
    doc = _read_config_file(args.config)
    if "datasets" not in doc or not doc["datasets"]:
        raise ConfigurationError("benchmark config needs a 'datasets' list")
    return {"datasets": doc["datasets"],
            "dim": doc.get("dim", 2),
            "delta": doc.get("delta", 0.0),
            "mu": doc.get("mu", 0.01),
            "splits": doc.get("splits", 5)}


def _resolve_sweep(args) -> dict:
    deltas = [float(v) for v in (args.deltas or "").split(",") if v != ""] \
        or list(_DEFAULT_DELTAS)
    mus = [float(v) for v in (args.mus or "").split(",") if v != ""] \
        or list(_DEFAULT_MUS)
    return {"dataset": _dataset_spec_from_args(args), "dim": args.dim,
            "deltas": deltas, "mus": mus, "resplits": args.resplits}


def _resolve_cluster(args) -> dict:
    variants = [v for v in (args.variants or "").split(",") if v] \
        or list(_VARIANTS)
    for v in variants:
        if v not in _VARIANTS:
            raise ConfigurationError(f"unknown variant {v!r}")
    return {"dataset": _dataset_spec_from_args(args), "dim": args.dim,
            "k": args.k, "delta": _parse_delta(args.delta) or 0.0,
            "mu": args.mu, "variants": variants}


def _resolve_plot(args) -> dict:
    return {"input": args.input, "kind": args.kind,
            "protected_col": args.protected_col or "z"}


_RESOLVERS = {
    "fit": _resolve_fit,
    "transform": _resolve_transform,
    "evaluate": _resolve_evaluate,
    "benchmark": _resolve_benchmark,
    "sweep": _resolve_sweep,
    "cluster": _resolve_cluster,
    "plot": _resolve_plot,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairpca",
        description="Fair PCA reductions, fairness estimation and batch "
                    "benchmarks")
    parser.add_argument("--seed", type=int, default=None,
                        help="global seed (default 0, or the manifest value)")
    parser.add_argument("--solver-tol", type=float, default=None)
    parser.add_argument("--json-errors", action="store_true")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--from-manifest", default=None,
                        help="re-run a recorded manifest")
    sub = parser.add_subparsers(dest="command")

    p_fit = sub.add_parser("fit", help="fit a fair PCA model")
    _add_dataset_args(p_fit)
    _add_model_args(p_fit)

    p_tr = sub.add_parser("transform", help="project rows with a model")
    p_tr.add_argument("--model", required=True)
    _add_dataset_args(p_tr)

    p_ev = sub.add_parser("evaluate", help="fairness report for a CSV")
    p_ev.add_argument("--input", required=True)
    p_ev.add_argument("--protected-col", default="z")
    p_ev.add_argument("--positive-value", default=None)
    p_ev.add_argument("--families", default="",
                      help="comma subset of threshold,linear-svm,kernel-svm")
    p_ev.add_argument("--slack", type=float, default=0.05)
    p_ev.add_argument("--cv-folds", type=int, default=5)

    p_bm = sub.add_parser("benchmark", help="multi-dataset comparison table")
    p_bm.add_argument("--config", required=True)

    p_sw = sub.add_parser("sweep", help="delta/mu grid over resplits")
    _add_dataset_args(p_sw)
    p_sw.add_argument("--dim", type=int, required=True)
    p_sw.add_argument("--deltas", default="")
    p_sw.add_argument("--mus", default="")
    p_sw.add_argument("--resplits", type=int, default=10)

    p_cl = sub.add_parser("cluster", help="k-means on reduced variants")
    _add_dataset_args(p_cl)
    p_cl.add_argument("--dim", type=int, required=True)
    p_cl.add_argument("--k", type=int, required=True)
    p_cl.add_argument("--delta", default="0")
    p_cl.add_argument("--mu", type=float, default=0.01)
    p_cl.add_argument("--variants", default="")

    p_pl = sub.add_parser("plot", help="SVG scatter or sweep curves")
    p_pl.add_argument("--input", required=True)
    p_pl.add_argument("--kind", choices=["scatter", "sweep"], default=None)
    p_pl.add_argument("--protected-col", default="z")

    return parser


def _fail(exc: Exception, code: int, json_errors: bool) -> int:
    if json_errors:
        doc = {"error": type(exc).__name__, "message": str(exc),
               "exit_code": code}
        print(json.dumps(doc), file=sys.stderr)
    else:
        print(f"fairpca: {type(exc).__name__}: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    json_errors = bool(args.json_errors)
    try:
        if args.from_manifest:
            doc = _read_config_file(args.from_manifest)
            if doc.get("format") != "run-manifest/1":
                raise ConfigurationError(
                    f"{args.from_manifest} is not a run manifest")
            command = doc["command"]
            cfg = doc["config"]
        else:
            if not args.command:
                parser.print_usage(sys.stderr)
                raise ConfigurationError("no command given")
            command = args.command
            cfg = _RESOLVERS[command](args)
        if args.seed is not None:
            cfg["seed"] = int(args.seed)
        cfg.setdefault("seed", 0)
        if args.solver_tol is not None:
            cfg["solver_tol"] = float(args.solver_tol)
        cfg.setdefault("solver_tol", None)

        out_dir = args.out if args.out is not None else "."
        os.makedirs(out_dir, exist_ok=True)
        started = datetime.now(timezone.utc).isoformat()
        t0 = time.perf_counter()
        outputs = _RUNNERS[command](cfg, out_dir)
        _write_manifest(out_dir, command, cfg, outputs, started,
                        time.perf_counter() - t0)
        return 0
    except _CONFIG_ERRORS as exc:
        return _fail(exc, EXIT_CONFIG, json_errors)
    except _DATA_ERRORS as exc:
        return _fail(exc, EXIT_DATA, json_errors)
    except _SOLVER_ERRORS as exc:
        return _fail(exc, EXIT_SOLVER, json_errors)
    except FairPcaError as exc:
        return _fail(exc, EXIT_SOLVER, json_errors)


if __name__ == "__main__":
    sys.exit(main())
