"""Command-line interface: generate, analyze, sparsify, experiment, verify."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

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
    save_edge_list,
    save_partition,
)
from .harness import load_experiment_config, run_experiment_to_files
from .metrics import principal_angles
from .resistance import (
    DisconnectedGraphError,
    resistance_profile,
    verify_effres_bounds,
    verify_relative_probabilities,
)
from .sparsify import (
    RankMode,
    SampleMethod,
    SparsifyConfig,
    quadratic_form_certificate,
    sparsify_reff,
    sparsify_uniform,
)
from .spectral import (
    alignment_frobenius,
    eig_sym,
    structure_residuals_part1,
    structure_stats,
)
from .verify import run_suites


def _print_instance_summary(g: Graph, p: Partition) -> None:
    rho = rho_of_partition(g, p)
    spec = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED, zero_degree_ok=True))
    stats = structure_stats(spec, rho, p.k)
    print(f"n={g.n} m={g.m} k={p.k}")
    print(f"rho={stats.rho:.6g} upsilon={stats.upsilon:.6g} kappa={stats.kappa:.6g}")


def _cmd_generate(args: argparse.Namespace) -> int:
    out = Path(args.output)
    if args.model == "sbm":
        if args.preset:
            p_intra, p_inter = SBM_PRESETS[args.preset]
        else:
            if args.p_intra is None or args.p_inter is None:
                raise SystemExit("sbm requires --preset or both --p-intra and --p-inter")
            p_intra, p_inter = args.p_intra, args.p_inter
        sizes = tuple(int(s) for s in args.sizes.split(","))
        cfg = SbmConfig(cluster_sizes=sizes, p_intra=p_intra, p_inter=p_inter, seed=args.seed)
        g, part = generate_sbm(cfg)
        extra = {}
    elif args.model == "hier":
        if args.preset:
            ps, pis, pit = HIER_PRESETS[args.preset]
        else:
            if None in (args.p_intra_sub, args.p_inter_sub, args.p_inter_top):
                raise SystemExit(
                    "hier requires --preset or all of --p-intra-sub/--p-inter-sub/--p-inter-top"
                )
            ps, pis, pit = args.p_intra_sub, args.p_inter_sub, args.p_inter_top
        cfg = HierSbmConfig(
            n_top=args.n_top,
            n_sub_per_top=args.n_sub_per_top,
            nodes_per_sub=args.nodes_per_sub,
            p_intra_sub=ps,
            p_inter_sub=pis,
            p_inter_top=pit,
            seed=args.seed,
        )
        g, part, sub = generate_hier_sbm(cfg)
        extra = {"sub": sub}
    else:  # lfr
        cfg = LfrConfig(
            n=args.n,
            tau1=args.tau1,
            tau2=args.tau2,
            mu=args.mu,
            avg_degree=args.avg_degree,
            max_degree=args.max_degree,
            min_community=args.min_community,
            max_community=args.max_community,
            seed=args.seed,
        )
        g, part = generate_lfr(cfg)
        extra = {}

    out.parent.mkdir(parents=True, exist_ok=True)
    edges_path = out.with_name(out.name + ".edges")
    part_path = out.with_name(out.name + ".part")
    save_edge_list(g, edges_path)
    save_partition(part, part_path)
    print(f"wrote {edges_path} and {part_path}")
    if "sub" in extra:
        sub_path = out.with_name(out.name + ".sub.part")
        save_partition(extra["sub"], sub_path)
        print(f"wrote {sub_path} (sub-cluster level)")
    _print_instance_summary(g, part)
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    g = load_edge_list(args.edges)
    part = load_partition(args.partition, n=g.n)
    k = args.k if args.k is not None else part.k
    if not 1 <= k < g.n:
        raise SystemExit(f"k={k} out of range for n={g.n}")

    rho = rho_of_partition(g, part)
    spec_norm = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED, zero_degree_ok=True))
    stats_norm = structure_stats(spec_norm, rho, k)
    cmat = indicator_matrix(part)
    print(f"n={g.n} m={g.m} k={k}")
    print(
        f"rho={stats_norm.rho:.6g} upsilon={stats_norm.upsilon:.6g} "
        f"kappa={stats_norm.kappa:.6g} lambda_k1={stats_norm.lambda_k1:.6g}"
    )
    if part.k == k:
        resid = structure_residuals_part1(spec_norm, cmat, k)
        align = alignment_frobenius(spec_norm.dominant(k), cmat)
        angles = principal_angles(spec_norm.bottom(k), cmat)
        print(f"part1 residuals max={resid.max():.6g} (bound 1/upsilon={1.0 / stats_norm.upsilon:.6g})")
        print(f"part2 alignment |V_nk^T C|_F^2 = {align:.6g} (bound k/upsilon={k / stats_norm.upsilon:.6g})")
        print(f"sin_theta_max={angles.sin_theta_max:.6g}")
    else:
        print(f"partition has k={part.k}; structure residuals need k to match, skipped")

    try:
        profile = resistance_profile(g, k)
    except DisconnectedGraphError as exc:
        print(f"resistance section skipped: {exc}")
        return 0
    spec_un = eig_sym(laplacian(g, LaplacianVariant.UNNORMALIZED))
    stats_un = structure_stats(spec_un, rho, k)
    bounds = verify_effres_bounds(g, part, spec_un, stats_un)
    relprob = verify_relative_probabilities(profile, stats_un)
    print(
        f"effres bounds (intra edges): upper pass {bounds.upper_pass_rate:.3f}, "
        f"lower pass {bounds.lower_pass_rate:.3f}"
        + (" [vacuous]" if bounds.vacuous else "")
    )
    print(
        f"relative probabilities: pass "
        f"{min(relprob.lower_pass_rate, relprob.upper_pass_rate):.3f}, "
        f"ratio range [{relprob.ratio_min:.3f}, {relprob.ratio_max:.3f}]"
        + (" [vacuous]" if relprob.vacuous else "")
    )
    if args.csv_dir:
        csv_dir = Path(args.csv_dir)
        csv_dir.mkdir(parents=True, exist_ok=True)
        bounds.write_csv(csv_dir / "effres_bounds.csv")
        relprob.write_csv(csv_dir / "relative_probabilities.csv")
        print(f"wrote verifier CSVs to {csv_dir}")
    return 0


def _cmd_sparsify(args: argparse.Namespace) -> int:
    g = load_edge_list(args.edges)
    if args.fraction is not None:
        q = max(1, math.ceil(args.fraction * g.m))
    elif args.budget is not None:
        q = args.budget
    else:
        raise SystemExit("one of --budget or --fraction is required")
    method = SampleMethod(args.method)
    cfg = SparsifyConfig(method=method, budget=q, seed=args.seed, epsilon=args.epsilon)
    if method is SampleMethod.UNIFORM:
        result = sparsify_uniform(g, cfg)
    else:
        k = args.k if args.k is not None else 1
        profile = resistance_profile(g, k)
        mode = RankMode(args.rank_mode)
        result = sparsify_reff(g, profile, cfg, rank_mode=mode)
    save_edge_list(result.graph, args.output)
    print(
        f"kept {result.kept_edges}/{g.m} edges (requested q={q}) -> {args.output}"
    )
    if args.certificate:
        lap = laplacian(g, LaplacianVariant.UNNORMALIZED)
        lap_t = laplacian(result.graph, LaplacianVariant.UNNORMALIZED)
        cert = quadratic_form_certificate(
            lap, lap_t, args.epsilon, trials=args.cert_vectors, seed=args.seed
        )
        cert.write_csv(args.certificate)
        print(
            f"certificate pass fraction {cert.pass_fraction:.3f} "
            f"({cert.skipped} skipped) -> {args.certificate}"
        )
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    cfg = load_experiment_config(args.config)
    raw_path, summary_path = run_experiment_to_files(cfg)
    print(f"wrote {raw_path} and {summary_path}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    results = run_suites(
        names=args.suite or None,
        graphs=args.graphs,
        seeds=args.seeds,
        inject_bug=args.inject_bug,
    )
    all_ok = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: {res.detail}")
        all_ok = all_ok and res.passed
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clsparse",
        description="Structure-preserving spectral sparsification toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a benchmark graph with ground truth")
    gen_sub = gen.add_subparsers(dest="model", required=True)

    g_sbm = gen_sub.add_parser("sbm", help="planted-partition block model")
    g_sbm.add_argument("--sizes", default="200,200,200,200", help="comma-separated cluster sizes")
    g_sbm.add_argument("--p-intra", type=float, dest="p_intra")
    g_sbm.add_argument("--p-inter", type=float, dest="p_inter")
    g_sbm.add_argument("--preset", choices=sorted(SBM_PRESETS))
    g_sbm.add_argument("--seed", type=int, required=True)
    g_sbm.add_argument("-o", "--output", required=True)
    g_sbm.set_defaults(func=_cmd_generate)

    g_hier = gen_sub.add_parser("hier", help="two-level hierarchical block model")
    g_hier.add_argument("--n-top", type=int, default=4)
    g_hier.add_argument("--n-sub-per-top", type=int, default=4)
    g_hier.add_argument("--nodes-per-sub", type=int, default=50)
    g_hier.add_argument("--p-intra-sub", type=float, dest="p_intra_sub")
    g_hier.add_argument("--p-inter-sub", type=float, dest="p_inter_sub")
    g_hier.add_argument("--p-inter-top", type=float, dest="p_inter_top")
    g_hier.add_argument("--preset", choices=sorted(HIER_PRESETS))
    g_hier.add_argument("--seed", type=int, required=True)
    g_hier.add_argument("-o", "--output", required=True)
    g_hier.set_defaults(func=_cmd_generate)

    g_lfr = gen_sub.add_parser("lfr", help="LFR-style benchmark with mixing parameter mu")
    g_lfr.add_argument("--n", type=int, default=800)
    g_lfr.add_argument("--tau1", type=float, default=2.5)
    g_lfr.add_argument("--tau2", type=float, default=1.5)
    g_lfr.add_argument("--mu", type=float, required=True)
    g_lfr.add_argument("--avg-degree", type=float, default=20)
    g_lfr.add_argument("--max-degree", type=int, default=50)
    g_lfr.add_argument("--min-community", type=int, default=30)
    g_lfr.add_argument("--max-community", type=int, default=100)
    g_lfr.add_argument("--seed", type=int, required=True)
    g_lfr.add_argument("-o", "--output", required=True)
    g_lfr.set_defaults(func=_cmd_generate)

    ana = sub.add_parser("analyze", help="clusterability and resistance report for a graph")
    ana.add_argument("--edges", required=True)
    ana.add_argument("--partition", required=True)
    ana.add_argument("--k", type=int)
    ana.add_argument("--csv-dir", help="persist verifier reports as CSV here")
    ana.set_defaults(func=_cmd_analyze)

    spa = sub.add_parser("sparsify", help="sample a reweighted sparsifier")
    spa.add_argument("--edges", required=True)
    spa.add_argument(
        "--method",
        choices=[m.value for m in SampleMethod],
        default="uniform",
    )
    spa.add_argument("--budget", type=int, help="edge budget q")
    spa.add_argument("--fraction", type=float, help="budget as a fraction of m")
    spa.add_argument("--seed", type=int, required=True)
    spa.add_argument("--epsilon", type=float, default=0.5)
    spa.add_argument("--k", type=int, help="rank split for the resistance profile")
    spa.add_argument(
        "--rank-mode", choices=[m.value for m in RankMode], default="full", dest="rank_mode"
    )
    spa.add_argument("--certificate", help="write a quadratic-form certificate CSV here")
    spa.add_argument("--cert-vectors", type=int, default=200, dest="cert_vectors")
    spa.add_argument("-o", "--output", required=True)
    spa.set_defaults(func=_cmd_sparsify)

    exp = sub.add_parser("experiment", help="run a TOML-configured sweep to CSV")
    exp.add_argument("--config", required=True)
    exp.set_defaults(func=_cmd_experiment)

    ver = sub.add_parser("verify", help="run randomized invariant suites")
    ver.add_argument("--suite", action="append", help="suite name (repeatable); default all")
    ver.add_argument("--graphs", type=int, help="corpus size for graph-based suites")
    ver.add_argument("--seeds", type=int, help="Monte Carlo seed count for the unbiased suite")
    ver.add_argument(
        "--inject-bug",
        action="store_true",
        dest="inject_bug",
        help="negative control: corrupt a leverage sum and expect failure",
    )
    ver.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
