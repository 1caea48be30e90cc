"""Experiment orchestration: generate, sparsify, measure, persist CSV.

One raw CSV row is emitted per (instance, method, budget fraction,
repetition); a companion summary CSV holds per-(instance, method, budget)
means and standard deviations. Identical configs produce byte-identical
CSVs: trial seeds derive arithmetically from the base seed, rows are
written in sorted job order regardless of worker scheduling, and floats
are serialized with repr. Wall-clock timings are therefore only recorded
when explicitly enabled.
"""

from __future__ import annotations

import csv
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .generators import (
    HIER_PRESETS,
    SBM_PRESETS,
    HierSbmConfig,
    LfrConfig,
    SbmConfig,
    generate_hier_sbm,
    generate_lfr,
    generate_sbm,
)
from .graph import (
    Graph,
    LaplacianVariant,
    Partition,
    indicator_matrix,
    laplacian,
    load_edge_list,
    load_partition,
    rho_of_partition,
)
from .metrics import bound_reff, bound_uniform, principal_angles
from .resistance import DisconnectedGraphError, resistance_profile
from .sparsify import (
    RankMode,
    SampleMethod,
    SparsifyConfig,
    quadratic_form_certificate,
    sparsify_reff,
    sparsify_uniform,
)
from .spectral import eig_sym, structure_stats

__all__ = [
    "ExperimentConfig",
    "InstanceSpec",
    "TrialRecord",
    "load_experiment_config",
    "run_experiment",
    "run_experiment_to_files",
    "summarize",
    "write_raw_csv",
    "write_summary_csv",
]

RAW_COLUMNS = [
    "graph_id",
    "generator",
    "param_label",
    "method",
    "requested_q",
    "kept_edges",
    "seed",
    "sin_theta_max",
    "frob_misalignment",
    "upsilon",
    "kappa",
    "rho",
    "lambda_k1",
    "gap",
    "bound_uniform",
    "bound_reff",
    "cert_pass_fraction",
    "runtime_ms",
    "error",
]

SUMMARY_COLUMNS = [
    "param_label",
    "generator",
    "method",
    "budget_fraction",
    "requested_q",
    "n_trials",
    "sin_theta_max_mean",
    "sin_theta_max_sd",
    "frob_misalignment_mean",
    "frob_misalignment_sd",
    "kept_edges_mean",
    "cert_pass_fraction_mean",
]

_METHOD_NAMES = {
    "uniform": SampleMethod.UNIFORM,
    "effective_resistance": SampleMethod.EFFECTIVE_RESISTANCE,
}


@dataclass(frozen=True)
class InstanceSpec:
    """One experiment panel: a generator (or file pair) plus its label."""

    kind: str  # sbm | hier | lfr | files
    label: str
    generator: SbmConfig | HierSbmConfig | LfrConfig | None = None
    edges_path: str | None = None
    partition_path: str | None = None

    def materialize(self) -> tuple[Graph, Partition, str]:
        """Build (graph, ground-truth partition, graph id)."""
        if self.kind == "sbm":
            g, p = generate_sbm(self.generator)
            gid = f"sbm-{self.label}-s{self.generator.seed}"
        elif self.kind == "hier":
            g, p, _sub = generate_hier_sbm(self.generator)  # top-level partition
            gid = f"hier-{self.label}-s{self.generator.seed}"
        elif self.kind == "lfr":
            g, p = generate_lfr(self.generator)
            gid = f"lfr-{self.label}-s{self.generator.seed}"
        elif self.kind == "files":
            g = load_edge_list(self.edges_path)
            p = load_partition(self.partition_path, n=g.n)
            gid = f"files-{Path(self.edges_path).stem}"
        else:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        return g, p, gid


@dataclass(frozen=True)
class ExperimentConfig:
    instances: tuple[InstanceSpec, ...]
    k: int
    output: str
    methods: tuple[str, ...] = ("uniform", "effective_resistance")
    budget_sweep: tuple[float, ...] = (0.05, 0.1, 0.2, 0.4, 0.8)
    epsilon: float = 0.5
    repetitions: int = 20
    base_seed: int = 0
    cert_vectors: int = 50
    rank_mode: str = "full"
    record_timings: bool = False

    def __post_init__(self):
        if not self.instances:
            raise ValueError("at least one instance required")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if not self.budget_sweep:
            raise ValueError("empty budget sweep")
        prev = 0.0
        for f in self.budget_sweep:
            if not 0.0 < f <= 1.0:
                raise ValueError(f"budget fraction {f} not in (0,1]")
            if f <= prev:
                raise ValueError("budget sweep must be strictly ascending")
            prev = f
        for mth in self.methods:
            if mth not in _METHOD_NAMES:
                raise ValueError(f"unknown method {mth!r}")
        if self.rank_mode not in ("full", "rank_nk"):
            raise ValueError(f"unknown rank_mode {self.rank_mode!r}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0,1), got {self.epsilon}")


@dataclass(frozen=True)
class TrialRecord:
    graph_id: str
    generator: str
    param_label: str
    method: str
    requested_q: int
    kept_edges: int | None
    seed: int
    sin_theta_max: float
    frob_misalignment: float
    upsilon: float
    kappa: float
    rho: float
    lambda_k1: float
    gap: float
    bound_uniform: float
    bound_reff: float
    cert_pass_fraction: float
    runtime_ms: float | None
    error: str = ""
    budget_fraction: float = 0.0  # carried for summaries, not a raw CSV column


def _generator_section(table: dict) -> InstanceSpec:
    kind = table.get("kind")
    label = str(table.get("label", kind))
    if kind == "sbm":
        if "preset" in table:
            p_intra, p_inter = SBM_PRESETS[table["preset"]]
        else:
            p_intra, p_inter = table["p_intra"], table["p_inter"]
        gen = SbmConfig(
            cluster_sizes=tuple(table["sizes"]),
            p_intra=float(p_intra),
            p_inter=float(p_inter),
            seed=int(table["seed"]),
        )
    elif kind == "hier":
        if "preset" in table:
            ps, pis, pit = HIER_PRESETS[table["preset"]]
        else:
            ps, pis, pit = (
                table["p_intra_sub"],
                table["p_inter_sub"],
                table["p_inter_top"],
            )
        gen = HierSbmConfig(
            n_top=int(table.get("n_top", 4)),
            n_sub_per_top=int(table.get("n_sub_per_top", 4)),
            nodes_per_sub=int(table.get("nodes_per_sub", 50)),
            p_intra_sub=float(ps),
            p_inter_sub=float(pis),
            p_inter_top=float(pit),
            seed=int(table["seed"]),
        )
    elif kind == "lfr":
        gen = LfrConfig(
            n=int(table["n"]),
            tau1=float(table.get("tau1", 2.5)),
            tau2=float(table.get("tau2", 1.5)),
            mu=float(table["mu"]),
            avg_degree=float(table.get("avg_degree", 20)),
            max_degree=int(table.get("max_degree", 50)),
            min_community=int(table.get("min_community", 30)),
            max_community=int(table.get("max_community", 100)),
            seed=int(table["seed"]),
        )
    elif kind == "files":
        return InstanceSpec(
            kind="files",
            label=label,
            edges_path=str(table["edges"]),
            partition_path=str(table["partition"]),
        )
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    return InstanceSpec(kind=kind, label=label, generator=gen)


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    """Parse a TOML experiment file: one [experiment] table plus [[instance]] tables."""
    with Path(path).open("rb") as fh:
        doc = tomllib.load(fh)
    exp = doc.get("experiment", {})
    instances = tuple(_generator_section(t) for t in doc.get("instance", []))
    kwargs = {}
    for key in (
        "k",
        "output",
        "epsilon",
        "repetitions",
        "base_seed",
        "cert_vectors",
        "rank_mode",
        "record_timings",
    ):
        if key in exp:
            kwargs[key] = exp[key]
    if "methods" in exp:
        kwargs["methods"] = tuple(exp["methods"])
    if "budget_sweep" in exp:
        kwargs["budget_sweep"] = tuple(float(f) for f in exp["budget_sweep"])
    return ExperimentConfig(instances=instances, **kwargs)


def _worker_count() -> int:
    env = os.environ.get("CLSPARSE_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(4, os.cpu_count() or 1))


@dataclass
class _InstanceContext:
    """Shared per-instance data reused by every trial on that instance."""

    graph: Graph
    indicators: np.ndarray
    lap_unnorm: np.ndarray
    stats_fields: dict
    profile: object | None
    profile_error: str
    k: int


def _prepare_instance(spec: InstanceSpec, k: int, need_profile: bool) -> tuple[_InstanceContext, str]:
    g, part, gid = spec.materialize()
    if part.k != k:
        raise ValueError(
            f"instance {gid}: partition has k={part.k}, experiment expects k={k}"
        )
    rho = rho_of_partition(g, part)
    # zero-degree vertices are tolerated here so sparse random instances
    # still produce rows; the strict constructor is for library callers
    spec_norm = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED, zero_degree_ok=True))
    stats = structure_stats(spec_norm, rho, k)
    indicators = indicator_matrix(part)
    lap_un = laplacian(g, LaplacianVariant.UNNORMALIZED)

    fields = {
        "upsilon": stats.upsilon,
        "kappa": stats.kappa,
        "rho": stats.rho,
        "lambda_k1": stats.lambda_k1,
        "stats": stats,
    }

    profile = None
    profile_error = ""
    if need_profile:
        try:
            profile = resistance_profile(g, k)
        except DisconnectedGraphError as exc:
            profile_error = str(exc)
    ctx = _InstanceContext(
        graph=g,
        indicators=indicators,
        lap_unnorm=lap_un,
        stats_fields=fields,
        profile=profile,
        profile_error=profile_error,
        k=k,
    )
    return ctx, gid


def _run_trial(
    ctx: _InstanceContext,
    cfg: ExperimentConfig,
    method: str,
    fraction: float,
    seed: int,
) -> dict:
    t0 = time.perf_counter()
    g = ctx.graph
    k = ctx.k
    q = max(1, math.ceil(fraction * g.m))
    out: dict = {"requested_q": q, "seed": seed}

    sp_method = _METHOD_NAMES[method]
    sp_cfg = SparsifyConfig(method=sp_method, budget=q, seed=seed, epsilon=cfg.epsilon)
    if sp_method is SampleMethod.UNIFORM:
        result = sparsify_uniform(g, sp_cfg)
    else:
        if ctx.profile is None:
            raise DisconnectedGraphError(ctx.profile_error or "no resistance profile")
        mode = RankMode.FULL if cfg.rank_mode == "full" else RankMode.RANK_NK
        result = sparsify_reff(g, ctx.profile, sp_cfg, rank_mode=mode)
    out["kept_edges"] = result.kept_edges

    sparse_lap_norm = laplacian(
        result.graph, LaplacianVariant.NORMALIZED, zero_degree_ok=True
    )
    spec_tilde = eig_sym(sparse_lap_norm)
    angles = principal_angles(spec_tilde.bottom(k), ctx.indicators)
    out["sin_theta_max"] = angles.sin_theta_max
    out["frob_misalignment"] = angles.frob_misalignment
    out["gap"] = float(spec_tilde.eigenvalues[k] - spec_tilde.eigenvalues[k - 1])

    lap_tilde_un = laplacian(result.graph, LaplacianVariant.UNNORMALIZED)
    cert = quadratic_form_certificate(
        ctx.lap_unnorm,
        lap_tilde_un,
        cfg.epsilon,
        trials=cfg.cert_vectors,
        seed=seed,
    )
    out["cert_pass_fraction"] = cert.pass_fraction
    out["runtime_ms"] = (time.perf_counter() - t0) * 1000.0
    return out


def run_experiment(cfg: ExperimentConfig) -> tuple[list[TrialRecord], list[dict]]:
    """Execute every trial and return (raw records, summary rows) in order."""
    jobs: list[tuple[int, int, str, float, int]] = []  # (job_id, inst_idx, method, fraction, rep)
    job_id = 0
    for inst_idx in range(len(cfg.instances)):
        for method in cfg.methods:
            for fraction in cfg.budget_sweep:
                for _rep in range(cfg.repetitions):
                    jobs.append((job_id, inst_idx, method, fraction, _rep))
                    job_id += 1

    need_profile = "effective_resistance" in cfg.methods
    contexts: list[tuple[_InstanceContext, str]] = [
        _prepare_instance(spec, cfg.k, need_profile) for spec in cfg.instances
    ]

    def execute(job: tuple[int, int, str, float, int]) -> tuple[int, dict]:
        jid, inst_idx, method, fraction, _rep = job
        ctx, _gid = contexts[inst_idx]
        seed = cfg.base_seed + jid
        try:
            res = _run_trial(ctx, cfg, method, fraction, seed)
            res["error"] = ""
        except Exception as exc:  # record and continue; one bad trial must not kill the run
            res = {
                "requested_q": max(1, math.ceil(fraction * ctx.graph.m)),
                "seed": seed,
                "kept_edges": None,
                "sin_theta_max": math.nan,
                "frob_misalignment": math.nan,
                "gap": math.nan,
                "cert_pass_fraction": math.nan,
                "runtime_ms": None,
                "error": f"{type(exc).__name__}: {exc}",
            }
        return jid, res

    workers = _worker_count()
    results: dict[int, dict] = {}
    if workers == 1:
        for job in jobs:
            jid, res = execute(job)
            results[jid] = res
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for jid, res in pool.map(execute, jobs):
                results[jid] = res

    records: list[TrialRecord] = []
    for jid, inst_idx, method, fraction, _rep in jobs:
        ctx, gid = contexts[inst_idx]
        spec = cfg.instances[inst_idx]
        res = results[jid]
        stats = ctx.stats_fields["stats"]
        if stats.upsilon_finite and stats.kappa_defined:
            b_unif = bound_uniform(cfg.k, stats, cfg.epsilon)
            b_reff = bound_reff(cfg.k, stats, cfg.epsilon)
        elif stats.upsilon_finite:
            b_unif, b_reff = math.nan, bound_reff(cfg.k, stats, cfg.epsilon)
        else:
            b_unif, b_reff = math.nan, math.nan
        records.append(
            TrialRecord(
                graph_id=gid,
                generator=spec.kind,
                param_label=spec.label,
                method=method,
                requested_q=res["requested_q"],
                kept_edges=res["kept_edges"],
                seed=res["seed"],
                sin_theta_max=res["sin_theta_max"],
                frob_misalignment=res["frob_misalignment"],
                upsilon=ctx.stats_fields["upsilon"],
                kappa=ctx.stats_fields["kappa"],
                rho=ctx.stats_fields["rho"],
                lambda_k1=ctx.stats_fields["lambda_k1"],
                gap=res["gap"],
                bound_uniform=b_unif,
                bound_reff=b_reff,
                cert_pass_fraction=res["cert_pass_fraction"],
                runtime_ms=res["runtime_ms"] if cfg.record_timings else None,
                error=res["error"],
                budget_fraction=fraction,
            )
        )

    summary = summarize(records)
    return records, summary


def summarize(records: Iterable[TrialRecord]) -> list[dict]:
    """Group raw rows by (instance, method, budget) and attach mean/sd columns.

    The standard deviation uses ddof=1 (the shaded-band convention); a
    single-trial group reports sd 0. Errored trials are excluded from the
    statistics but counted in n_trials.
    """
    groups: dict[tuple, list[TrialRecord]] = {}
    order: list[tuple] = []
    for r in records:
        key = (r.param_label, r.generator, r.method, r.budget_fraction)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r)

    rows = []
    for key in order:
        grp = groups[key]
        ok = [r for r in grp if not r.error]

        def col(name: str) -> np.ndarray:
            return np.asarray([getattr(r, name) for r in ok], dtype=float)

        def mean_sd(name: str) -> tuple[float, float]:
            vals = col(name)
            if len(vals) == 0:
                return math.nan, math.nan
            mean = float(vals.mean())
            sd = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
            return mean, sd

        st_mean, st_sd = mean_sd("sin_theta_max")
        fr_mean, fr_sd = mean_sd("frob_misalignment")
        kept_mean = float(col("kept_edges").mean()) if ok else math.nan
        cert_mean = float(col("cert_pass_fraction").mean()) if ok else math.nan
        rows.append(
            {
                "param_label": key[0],
                "generator": key[1],
                "method": key[2],
                "budget_fraction": key[3],
                "requested_q": grp[0].requested_q,
                "n_trials": len(grp),
                "sin_theta_max_mean": st_mean,
                "sin_theta_max_sd": st_sd,
                "frob_misalignment_mean": fr_mean,
                "frob_misalignment_sd": fr_sd,
                "kept_edges_mean": kept_mean,
                "cert_pass_fraction_mean": cert_mean,
            }
        )
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))  # plain float repr even for numpy scalars
    return str(value)


def write_raw_csv(records: Iterable[TrialRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        fh.write("# schema=1\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RAW_COLUMNS)
        for r in records:
            writer.writerow([_fmt(getattr(r, c)) for c in RAW_COLUMNS])


def write_summary_csv(rows: Iterable[dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        fh.write("# schema=1\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])


def run_experiment_to_files(cfg: ExperimentConfig) -> tuple[Path, Path]:
    """Run the experiment and write ``<output>.csv`` and ``<output>.summary.csv``."""
    records, summary = run_experiment(cfg)
    out = Path(cfg.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    raw_path = out.with_name(out.name + ".csv")
    summary_path = out.with_name(out.name + ".summary.csv")
    write_raw_csv(records, raw_path)
    write_summary_csv(summary, summary_path)
    return raw_path, summary_path
