"""Command-line entry point.

Exit codes: 0 success, 2 invalid arguments or config, 3 runtime failure,
4 a reproduction check failed.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import warnings

from . import analysis, centrality, expt, market, netgraph, reproduce
from .agents import AgentParams
from .errors import ConfigError, DegenerateSpec, GraphFormatError, TradenetError

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_CHECK = 0, 2, 3, 4
OUTPUT_ENV = "TRADENET_OUTPUT_DIR"


def _out_dir(arg: str | None) -> str:
    path = arg or os.environ.get(OUTPUT_ENV) or "."
    os.makedirs(path, exist_ok=True)
    return path


def _metrics_line(g: netgraph.Graph) -> str:
    parts = [f"n={g.n}", f"edges={g.edge_count}",
             f"apl={netgraph.average_path_length(g):.6f}",
             f"clustering={netgraph.clustering_coefficient(g):.6f}",
             f"diameter={netgraph.diameter(g)}"]
    if g.has_terminals:
        parts += [f"S={g.source}", f"D={g.destination}", f"M={netgraph.node_disjoint_paths(g)}"]
    return " ".join(parts)


# ---------------------------------------------------------------- subcommands


def cmd_generate(args) -> int:
    spec = netgraph.NetworkSpec(args.n, args.k, args.p, args.seed)
    try:
        g = netgraph.generate_ws(spec)
    except DegenerateSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    offset = expt.default_sd_offset(args.n) if args.sd_offset is None else args.sd_offset
    rng = random.Random(args.seed)
    g = g.with_terminals(*expt.choose_sd_pair(g, offset, rng))
    if args.out:
        netgraph.store(g, args.out)
    print(_metrics_line(g))
    return EXIT_OK


def cmd_metrics(args) -> int:
    g = netgraph.load(args.graph)
    print(_metrics_line(g))
    if args.csv:
        centrality.write_measures_csv(args.csv, g, args.alpha, centrality.enumerate_paths(g, args.cap))
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = expt.load_config(args.config)
    out = _out_dir(args.out_dir)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        runs = expt.run_batch_logs(config, jobs=args.jobs)
        stats = expt.summarize_batch(config, [log for _, log in runs])
    entries = [(log.replication, t + 1, o, log.prices[t])
               for _, log in runs for t, o in enumerate(log.outcomes)]
    market.write_round_log(os.path.join(out, "rounds.csv"), entries)
    market.write_node_log(os.path.join(out, "nodes.csv"), entries,
                          {log.replication: g for g, log in runs})
    expt.write_summary_csv(os.path.join(out, "summary.csv"), stats)
    pooled = stats[-1]
    if pooled.warning:
        print(f"warning: {pooled.warning}", file=sys.stderr)
    print(reproduce.summary_table({"pooled": pooled}), end="")
    return EXIT_OK


def cmd_longrun(args) -> int:
    g = netgraph.load(args.graph)
    params = AgentParams(args.sigma, args.rho)
    cost = expt.run_longrun(g, params, args.rounds, seed=args.seed)
    print(f"final_cost={cost!r} rounds={args.rounds} M={netgraph.node_disjoint_paths(g)}")
    return EXIT_OK


def cmd_lemma(args) -> int:
    checks = reproduce.lemma_checks(args.probe_rounds, args.rho, args.seed)
    print(reproduce.format_report("parallel-path divergence grid", checks), end="")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK


def _regression_outputs(records, out: str) -> str:
    sub = analysis.restrict_M(records)
    models = {
        "Model with Clustering Coefficient": analysis.cost_regression(sub, "clustering"),
        "Model with Average Path Length": analysis.cost_regression(sub, "apl"),
    }
    text = analysis.format_regression_table(models)
    with open(os.path.join(out, "regression.txt"), "w", encoding="utf-8") as fh:
        fh.write(text)
    analysis.write_regression_csv(os.path.join(out, "regression.csv"), models)
    return text


def cmd_analyze(args) -> int:
    records = expt.read_longrun_csv(args.dataset)
    print(_regression_outputs(records, _out_dir(args.out_dir)), end="")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    out = _out_dir(args.out_dir)
    if args.target == "lemma":
        checks = reproduce.lemma_checks(args.rounds or 1000, seed=args.seed)
        report = reproduce.format_report("parallel-path divergence grid", checks)
    elif args.target in ("table2", "table3"):
        checks, rows = [], {}
        for n, k in reproduce.TABLE_SETTINGS[args.target]:
            batches = reproduce.topology_comparison(n, k, args.reps or 100, args.rounds or 15,
                                                    args.seed, args.jobs)
            rows[f"R {n}"] = batches[1.0][-1]
            rows[f"SW {n}"] = batches[0.1][-1]
            checks += reproduce.topology_checks(n, k, batches)
            for p, stats in batches.items():
                expt.write_summary_csv(os.path.join(out, f"{args.target}_n{n}_p{p:g}.csv"), stats)
        report = reproduce.summary_table(rows) + "\n" + reproduce.format_report(args.target, checks)
    else:
        records = expt.longrun_ensemble(networks_per_config=args.reps or 225,
                                        rounds=args.rounds or 1000, seed=args.seed, jobs=args.jobs)
        expt.write_longrun_csv(os.path.join(out, "fig6_dataset.csv"), records)
        checks = reproduce.longrun_checks(records)
        report = (_regression_outputs(records, out) + "\n"
                  + reproduce.format_report("threshold-free long run", checks))
    with open(os.path.join(out, f"{args.target}_report.txt"), "w", encoding="utf-8") as fh:
        fh.write(report)
    print(report, end="")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tradenet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a Watts-Strogatz graph file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sd-offset", type=int, default=None,
                   help="S-D distance at least diameter minus this (default 2 below 50 nodes, else 1)")
    p.add_argument("--out", help="graph file to write")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("metrics", help="structural metrics and per-node centralities")
    p.add_argument("graph")
    p.add_argument("--alpha", type=float, action="append", default=[])
    p.add_argument("--csv", help="write per-node sd measures here")
    p.add_argument("--cap", type=int, default=centrality.DEFAULT_PATH_CAP)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="run a batch described by a JSON config")
    p.add_argument("config")
    p.add_argument("--out-dir")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("longrun", help="threshold-free run from zero prices")
    p.add_argument("graph")
    p.add_argument("--rounds", type=int, default=10**4)
    p.add_argument("--sigma", type=float, default=expt.LONGRUN_AGENTS.sigma)
    p.add_argument("--rho", type=float, default=expt.LONGRUN_AGENTS.rho)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_longrun)

    p = sub.add_parser("lemma", help="divergence grid on parallel-path graphs")
    p.add_argument("--probe-rounds", type=int, default=1000)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_lemma)

    p = sub.add_parser("analyze", help="cost regressions on a long-run dataset CSV")
    p.add_argument("dataset")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("reproduce", help="run a reproduction protocol and check it")
    p.add_argument("target", choices=["table2", "table3", "fig6", "lemma"])
    p.add_argument("--reps", type=int, help="replications (tables) or networks per (n, p) (fig6)")
    p.add_argument("--rounds", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GraphFormatError, DegenerateSpec) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TradenetError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
