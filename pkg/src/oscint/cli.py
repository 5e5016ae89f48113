"""Command-line interface.

Subcommands: gen-data, train, eval, sweep, search, table2, flops, rp-solve.
Global flags --config/--seed/--out apply to every subcommand.  Exit codes:
0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import dataset as ds_mod
from . import harness, mlp
from .config import load_config
from .errors import OscintError
from .integrands import IntegrandFamily
from .metrics import normalized_mse
from .quadrature import QuadratureRule, flop_cost
from .rayleigh_plesset import rp_solve

__all__ = ["main", "cli_main"]


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors, per the package convention."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="oscint", description=__doc__)
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--seed", type=int, help="base random seed")
    parser.add_argument("--out", help="output directory")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    families = [f.value for f in IntegrandFamily]

    p = sub.add_parser("gen-data", parents=[], help="write a dataset CSV")
    p.add_argument("--family", required=True, choices=families)
    p.add_argument("--m", type=int, default=1000, help="sample count")
    p.add_argument("--n-in", type=int, default=16, help="inputs per sample")
    p.add_argument("--file", help="output file (default <out>/<family>_data.csv)")

    p = sub.add_parser("train", help="fit a model on a dataset CSV and save it")
    p.add_argument("--data", required=True, help="dataset CSV from gen-data")
    p.add_argument("--hidden", type=int, default=3)
    p.add_argument("--neurons", type=int, default=5)
    p.add_argument("--model", help="output file (default <out>/model.txt)")

    p = sub.add_parser("eval", help="print NMSE of a saved model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)

    p = sub.add_parser("sweep", help="run classical + network sweeps, emit report CSV")
    p.add_argument("--report", help="output file (default <out>/sweep_report.csv)")

    p = sub.add_parser("search", help="hyperparameter grid search")
    p.add_argument("--family", choices=families)
    p.add_argument("--table", help="output file (default <out>/search_table.csv)")

    p = sub.add_parser("table2", help="alpha benchmark across the configured families")
    p.add_argument("--table", help="output file (default <out>/table2.csv)")
    p.add_argument("--report", help="sweep rows file (default <out>/table2_report.csv)")

    p = sub.add_parser("flops", help="print FLOP cost of a rule or a network")
    p.add_argument("--rule", choices=[r.value for r in QuadratureRule])
    p.add_argument("--nn", action="store_true", help="network cost instead of a rule")
    p.add_argument("-N", type=int, help="neurons per hidden layer")
    p.add_argument("-H", dest="hidden", type=int, help="hidden layer count")
    p.add_argument("--nq", type=int, required=True)
    p.add_argument("--mode", choices=[m.value for m in mlp.FlopMode], default="paper")

    p = sub.add_parser("rp-solve", help="solve the bubble ODE, write the trajectory CSV")
    p.add_argument("--rho", type=float, default=750.0)
    p.add_argument("--file", help="output file (default <out>/rp_trajectory.csv)")

    return parser


def _out_path(args, attr: str, default_name: str) -> Path:
    explicit = getattr(args, attr, None)
    if explicit:
        return Path(explicit)
    out_dir = Path(args.out) if args.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / default_name


def _cmd_gen_data(args, cfg) -> int:
    family = IntegrandFamily(args.family)
    data = ds_mod.build_dataset(
        family, args.m, args.n_in, cfg.domain_for(family), cfg.seed,
        rp_config=cfg.rp, truth_floor_rel=cfg.truth_floor_rel,
        param_box=cfg.param_overrides.get(family),
    )
    path = _out_path(args, "file", f"{family.value}_data.csv")
    ds_mod.write_csv(data, path)
    print(f"wrote {len(data)} samples to {path}")
    return 0


def _cmd_train(args, cfg) -> int:
    data = ds_mod.read_csv(args.data)
    parts = ds_mod.split(data, cfg.split_ratios, seed=cfg.seed)
    arch = mlp.Architecture(data.n_in, args.hidden, args.neurons)
    train_cfg = dataclasses.replace(cfg.train, seed=cfg.seed)
    net, report = mlp.train(mlp.init(arch, cfg.seed), parts, train_cfg)
    path = _out_path(args, "model", "model.txt")
    mlp.save(net, path)
    preds = mlp.forward(net, parts.test.inputs)
    print(
        f"trained {report.epochs_run} epochs; val NMSE {report.final_val_nmse:.3e}; "
        f"test NMSE {normalized_mse(preds, parts.test.truths):.3e}; saved {path}"
    )
    return 0


def _cmd_eval(args, cfg) -> int:
    net = mlp.load(args.model)
    data = ds_mod.read_csv(args.data)
    preds = mlp.forward(net, data.inputs)
    print(f"{normalized_mse(preds, data.truths):.17g}")
    return 0


def _cmd_sweep(args, cfg) -> int:
    report = harness.run_quadrature_sweep(cfg)
    nn_report = harness.run_nn_sweep(cfg)
    report.extend(nn_report.rows)
    path = _out_path(args, "report", "sweep_report.csv")
    harness.emit_report(report, path)
    print(f"wrote {len(report.rows)} rows to {path}")
    return 0


def _cmd_search(args, cfg) -> int:
    family = IntegrandFamily(args.family) if args.family else cfg.families[0]
    result = harness.hyperparameter_search(cfg, family)
    path = _out_path(args, "table", "search_table.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("hidden_layers,neurons,val_nmse,flops_paper,flops_exact,epochs\n")
        for h, n, val, fp, fe, epochs in result.table:
            fh.write(f"{h},{n},{val:.17g},{fp},{fe},{epochs}\n")
    status = "feasible" if result.feasible else "INFEASIBLE (best effort)"
    print(
        f"best architecture: H={result.best.hidden_layers} N={result.best.neurons} "
        f"({status}); table in {path}"
    )
    return 0


def _cmd_table2(args, cfg) -> int:
    rows, report = harness.reproduce_table2(cfg)
    table_path = _out_path(args, "table", "table2.csv")
    with open(table_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("family,target_nmse,flops_nn,flops_qm,alpha,gain,reference_alpha,status\n")
        for r in rows:
            if r.result:
                fh.write(
                    f"{r.family.value},{r.result.target_nmse:.17g},{r.result.flops_nn},"
                    f"{r.result.flops_qm},{r.result.alpha:.17g},{r.result.gain:.17g},"
                    f"{r.reference_alpha},{r.status}\n"
                )
            else:
                status = r.status.replace(",", ";")
                fh.write(f"{r.family.value},{cfg.target_nmse:.17g},,,,,{r.reference_alpha},{status}\n")
    print(f"{'family':<8} {'alpha':>8} {'gain':>8} {'reference':>9}  status")
    for r in rows:
        if r.result:
            print(
                f"{r.family.value:<8} {r.result.alpha:>8.2f} {r.result.gain:>8.2f} "
                f"{r.reference_alpha:>9.2f}  {r.status}"
            )
        else:
            print(f"{r.family.value:<8} {'-':>8} {'-':>8} {r.reference_alpha:>9.2f}  {r.status}")
    report_path = _out_path(args, "report", "table2_report.csv")
    harness.emit_report(report, report_path)
    print(f"table in {table_path}; sweep rows in {report_path}")
    return 0


def _cmd_flops(args, cfg) -> int:
    if args.nn:
        if args.N is None or args.hidden is None:
            print("flops --nn requires -N and -H", file=sys.stderr)
            return 1
        print(mlp.nn_flops(args.N, args.hidden, args.nq, mlp.FlopMode(args.mode)))
        return 0
    if not args.rule:
        print("flops requires either --rule or --nn", file=sys.stderr)
        return 1
    print(flop_cost(QuadratureRule(args.rule), args.nq))
    return 0


def _cmd_rp_solve(args, cfg) -> int:
    config = dataclasses.replace(cfg.rp, rho=args.rho)
    trajectory = rp_solve(config)
    path = _out_path(args, "file", "rp_trajectory.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# rho={config.rho:.17g}\n")
        fh.write(f"# horizon_s={config.T:.17g}\n")
        fh.write("t,radius,radial_velocity\n")
        for t, r, v in zip(
            trajectory.times, trajectory.radii, trajectory.radial_velocities
        ):
            fh.write(f"{t:.17g},{r:.17g},{v:.17g}\n")
    print(f"wrote {trajectory.times.size} steps to {path}")
    return 0


_COMMANDS = {
    "gen-data": _cmd_gen_data,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "search": _cmd_search,
    "table2": _cmd_table2,
    "flops": _cmd_flops,
    "rp-solve": _cmd_rp_solve,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    try:
        cfg = load_config(args.config, seed=args.seed, out_dir=args.out)
    except (OSError, ValueError) as exc:
        print(f"oscint: config error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args, cfg)
    except OscintError as exc:
        print(f"oscint: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"oscint: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
