"""Experiment orchestration: sweeps, hyperparameter search, benchmark table.

A sweep pits the trained network against the three Newton-Cotes rules on
the *same* test samples per family (shared dataset seed), so the resulting
accuracy-vs-FLOPs curves are paired.  Rows that fail (diverged training,
odd Simpson panel count, solver failures) are recorded with a non-ok status
instead of aborting, keeping reports comparable across runs.

Every cell derives its own random stream from (base seed, family, cell
index); two runs of the same config produce byte-identical reports.
OSCINT_WORKERS > 1 runs independent training cells in a thread pool; rows
are sorted before emission so parallelism never changes the output.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .config import ExperimentConfig, worker_count
from .dataset import build_dataset, split, with_n_in
from .errors import (
    DivergedLoss,
    IoFailure,
    NonPositiveRadius,
    SimpsonOddCount,
    StiffnessFailure,
    TargetUnreachable,
)
from .integrands import IntegrandFamily, eval_family, param_space
from .metrics import (
    AlphaResult,
    Method,
    MethodCurve,
    OscPoint,
    best_quadrature_flops,
    flops_at_accuracy,
    normalized_mse,
)
from .mlp import Architecture, FlopMode, forward, init, nn_flops, train
from .quadrature import QuadratureRule, flop_cost, integrate, make_grid

__all__ = [
    "ReportRow",
    "SweepReport",
    "SearchResult",
    "Table2Row",
    "REFERENCE_ALPHA",
    "run_quadrature_sweep",
    "run_nn_sweep",
    "hyperparameter_search",
    "reproduce_table2",
    "oscillatoriness_cell",
    "emit_report",
    "parse_report",
]

REPORT_HEADER = (
    "family,method,n_q,hidden_layers,neurons,flops_paper,flops_exact,"
    "train_nmse,val_nmse,test_nmse,epochs,seed,status"
)

# benchmark gain values the six families are compared against in the
# summary table (higher alpha = cheaper network at equal accuracy)
REFERENCE_ALPHA = {
    IntegrandFamily.BESSEL: 6.01,
    IntegrandFamily.EVAN_WEBSTER_1: 17.72,
    IntegrandFamily.RAYLEIGH_PLESSET: 23.46,
    IntegrandFamily.EVAN_WEBSTER_2: 19.60,
    IntegrandFamily.SINE: 0.91,
    IntegrandFamily.EXPONENTIAL: 0.60,
}

_RULE_METHOD = {
    QuadratureRule.TRAPEZOID: Method.TRAPEZOID,
    QuadratureRule.MIDPOINT: Method.MIDPOINT,
    QuadratureRule.SIMPSON: Method.SIMPSON,
}


@dataclass(frozen=True)
class ReportRow:
    family: str
    method: str
    n_q: int
    hidden_layers: int
    neurons: int
    flops_paper: int
    flops_exact: int
    train_nmse: Optional[float]
    val_nmse: Optional[float]
    test_nmse: Optional[float]
    epochs: int
    seed: int
    status: str = "ok"


@dataclass
class SweepReport:
    rows: List[ReportRow] = field(default_factory=list)

    def sorted_rows(self) -> List[ReportRow]:
        return sorted(self.rows, key=lambda r: (r.family, r.method, r.n_q))

    def extend(self, rows) -> None:
        self.rows.extend(rows)


def _derived_seed(base: int, *key: int) -> int:
    seq = np.random.SeedSequence(int(base), spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1, dtype=np.uint64)[0] % (1 << 63))


def _family_index(family: IntegrandFamily) -> int:
    return list(IntegrandFamily).index(family)


def _family_test_split(cfg: ExperimentConfig, family: IntegrandFamily):
    """Base dataset (single-input) and the shared split permutation seed."""
    fidx = _family_index(family)
    data_seed = _derived_seed(cfg.seed, fidx, 0)
    split_seed = _derived_seed(cfg.seed, fidx, 1)
    base = build_dataset(
        family,
        cfg.samples_for(family),
        1,
        cfg.domain_for(family),
        data_seed,
        rp_config=cfg.rp,
        truth_floor_rel=cfg.truth_floor_rel,
        param_box=cfg.param_overrides.get(family),
    )
    return base, split_seed


def _quadrature_predictions(
    family: IntegrandFamily,
    rule: QuadratureRule,
    params: np.ndarray,
    domain,
    n_q: int,
    rp_config,
    param_box,
) -> np.ndarray:
    grid = make_grid(rule, domain[0], domain[1], n_q)
    preds = np.empty(params.shape[0])
    for i in range(params.shape[0]):
        values = eval_family(
            family, params[i], grid.abscissae, domain=domain,
            rp_config=rp_config, strict=param_box is None,
        )
        preds[i] = integrate(rule, values, grid.dx)
    return preds


def _quadrature_cells(cfg, family, test_ds) -> Tuple[List[ReportRow], List[MethodCurve]]:
    domain = cfg.domain_for(family)
    param_box = cfg.param_overrides.get(family)
    rows = []
    curves = []
    for rule in QuadratureRule:
        points = []
        for n_q in cfg.quad_n_q_sweep:
            try:
                preds = _quadrature_predictions(
                    family, rule, test_ds.params, domain, n_q, cfg.rp, param_box
                )
                nmse = normalized_mse(preds, test_ds.truths)
            except (SimpsonOddCount, StiffnessFailure, NonPositiveRadius) as exc:
                rows.append(
                    ReportRow(
                        family=family.value, method=rule.value, n_q=n_q,
                        hidden_layers=0, neurons=0,
                        flops_paper=flop_cost(rule, n_q),
                        flops_exact=flop_cost(rule, n_q),
                        train_nmse=None, val_nmse=None, test_nmse=None,
                        epochs=0, seed=cfg.seed,
                        status="failed: " + type(exc).__name__,
                    )
                )
                continue
            flops = flop_cost(rule, n_q)
            points.append((n_q, flops, nmse))
            rows.append(
                ReportRow(
                    family=family.value, method=rule.value, n_q=n_q,
                    hidden_layers=0, neurons=0,
                    flops_paper=flops, flops_exact=flops,
                    train_nmse=None, val_nmse=None, test_nmse=nmse,
                    epochs=0, seed=cfg.seed, status="ok",
                )
            )
        if len(points) >= 2:
            curves.append(MethodCurve(method=_RULE_METHOD[rule], points=tuple(points)))
    return rows, curves


def _nn_cell(cfg, family, base, split_seed, n_q, arch_h, arch_n):
    fidx = _family_index(family)
    ds = with_n_in(base, n_q, rp_config=cfg.rp)
    parts = split(ds, cfg.split_ratios, seed=split_seed)
    arch = Architecture(n_q, arch_h, arch_n)
    flops_p = nn_flops(arch_n, arch_h, n_q, FlopMode.PAPER)
    flops_e = nn_flops(arch_n, arch_h, n_q, FlopMode.EXACT)
    best = None  # (val_nmse, net, report)
    diverged_epoch = 0
    for restart in range(max(1, int(cfg.restarts))):
        cell_seed = _derived_seed(cfg.seed, fidx, 2, int(n_q), restart)
        train_cfg = dataclasses.replace(cfg.train, seed=cell_seed)
        try:
            net, report = train(init(arch, cell_seed), parts, train_cfg)
        except DivergedLoss as exc:
            diverged_epoch = exc.epoch or 0
            continue
        # the returned net is the best-validation snapshot, so rank restarts
        # by that same number, not by the last epoch
        snapshot_val = float(report.val_nmse_history.min())
        if best is None or snapshot_val < best[0]:
            best = (snapshot_val, net, report)
    if best is None:
        row = ReportRow(
            family=family.value, method=Method.NEURAL_NET.value, n_q=n_q,
            hidden_layers=arch_h, neurons=arch_n,
            flops_paper=flops_p, flops_exact=flops_e,
            train_nmse=None, val_nmse=None, test_nmse=None,
            epochs=diverged_epoch, seed=cfg.seed, status="failed: DivergedLoss",
        )
        return row, None, None
    _, net, report = best
    preds = forward(net, parts.test.inputs)
    test_nmse = normalized_mse(preds, parts.test.truths)
    row = ReportRow(
        family=family.value, method=Method.NEURAL_NET.value, n_q=n_q,
        hidden_layers=arch_h, neurons=arch_n,
        flops_paper=flops_p, flops_exact=flops_e,
        train_nmse=report.final_train_nmse, val_nmse=report.final_val_nmse,
        test_nmse=test_nmse, epochs=report.epochs_run, seed=cfg.seed, status="ok",
    )
    return row, (n_q, test_nmse), net


def _nn_cells(cfg, family, base, split_seed) -> Tuple[List[ReportRow], Optional[MethodCurve]]:
    arch_h, arch_n = cfg.arch_hidden, cfg.arch_neurons
    workers = worker_count()
    results = []
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_nn_cell, cfg, family, base, split_seed, n_q, arch_h, arch_n)
                for n_q in cfg.n_q_sweep
            ]
            results = [f.result() for f in futures]
    else:
        results = [
            _nn_cell(cfg, family, base, split_seed, n_q, arch_h, arch_n)
            for n_q in cfg.n_q_sweep
        ]
    rows = [row for row, _, _ in results]
    points = []
    for row, point, _ in results:
        if point is not None:
            n_q, nmse = point
            points.append(
                (n_q, nn_flops(arch_n, arch_h, n_q, cfg.flop_mode), nmse)
            )
    curve = (
        MethodCurve(method=Method.NEURAL_NET, points=tuple(points))
        if len(points) >= 2
        else None
    )
    return rows, curve


def run_quadrature_sweep(cfg: ExperimentConfig) -> SweepReport:
    """Newton-Cotes test-set NMSE and FLOPs for every family and n_q."""
    report = SweepReport()
    for family in cfg.families:
        base, split_seed = _family_test_split(cfg, family)
        parts = split(base, cfg.split_ratios, seed=split_seed)
        rows, _ = _quadrature_cells(cfg, family, parts.test)
        report.extend(rows)
    return report


def run_nn_sweep(cfg: ExperimentConfig) -> SweepReport:
    """Train one model per (family, n_q) and record its test NMSE and FLOPs."""
    report = SweepReport()
    for family in cfg.families:
        base, split_seed = _family_test_split(cfg, family)
        rows, _ = _nn_cells(cfg, family, base, split_seed)
        report.extend(rows)
    return report


@dataclass(frozen=True)
class SearchResult:
    best: Architecture
    feasible: bool
    table: Tuple[Tuple[int, int, float, int, int, int], ...]
    # rows: (hidden, neurons, val_nmse, flops_paper, flops_exact, epochs)


def hyperparameter_search(
    cfg: ExperimentConfig, family: Optional[IntegrandFamily] = None
) -> SearchResult:
    """Grid search over (hidden layers, neurons).

    Selection follows the dual criterion: validation NMSE at or below the
    target, then minimal aggregate (PAPER-mode) FLOPs, ties broken by
    validation NMSE.  When nothing reaches the target the best-NMSE
    architecture is returned flagged infeasible.
    """
    family = family if family is not None else cfg.families[0]
    base, split_seed = _family_test_split(cfg, family)
    ds = with_n_in(base, cfg.search_n_in, rp_config=cfg.rp)
    parts = split(ds, cfg.split_ratios, seed=split_seed)
    fidx = _family_index(family)
    table = []
    for h in cfg.hidden_grid:
        for n in cfg.neuron_grid:
            arch = Architecture(cfg.search_n_in, h, n)
            val, epochs = math.inf, 0
            for restart in range(max(1, int(cfg.restarts))):
                cell_seed = _derived_seed(cfg.seed, fidx, 3, h, n, restart)
                train_cfg = dataclasses.replace(cfg.train, seed=cell_seed)
                try:
                    _, report = train(init(arch, cell_seed), parts, train_cfg)
                except DivergedLoss:
                    continue
                snapshot_val = float(report.val_nmse_history.min())
                if snapshot_val < val:
                    val, epochs = snapshot_val, report.epochs_run
            table.append(
                (h, n, val,
                 nn_flops(n, h, cfg.search_n_in, FlopMode.PAPER),
                 nn_flops(n, h, cfg.search_n_in, FlopMode.EXACT),
                 epochs)
            )
    feasible = [row for row in table if row[2] <= cfg.target_nmse]
    if feasible:
        h, n, val, _, _, _ = min(feasible, key=lambda r: (r[3], r[2]))
        return SearchResult(
            best=Architecture(cfg.search_n_in, h, n), feasible=True, table=tuple(table)
        )
    h, n, val, _, _, _ = min(table, key=lambda r: r[2])
    return SearchResult(
        best=Architecture(cfg.search_n_in, h, n), feasible=False, table=tuple(table)
    )


@dataclass(frozen=True)
class Table2Row:
    family: IntegrandFamily
    result: Optional[AlphaResult]
    reference_alpha: float
    status: str


def reproduce_table2(cfg: ExperimentConfig) -> Tuple[List[Table2Row], SweepReport]:
    """Alpha at the target accuracy for every configured family.

    Combines the network sweep and the classical sweeps through the
    FLOPs-at-accuracy extraction; families where either side cannot reach
    the target are recorded with a non-ok status instead of aborting.
    """
    rows: List[Table2Row] = []
    report = SweepReport()
    for family in cfg.families:
        base, split_seed = _family_test_split(cfg, family)
        parts = split(base, cfg.split_ratios, seed=split_seed)
        quad_rows, quad_curves = _quadrature_cells(cfg, family, parts.test)
        nn_rows, nn_curve = _nn_cells(cfg, family, base, split_seed)
        report.extend(quad_rows)
        report.extend(nn_rows)
        reference = REFERENCE_ALPHA.get(family, math.nan)
        if nn_curve is None:
            rows.append(Table2Row(family, None, reference, "failed: no network curve"))
            continue
        try:
            flops_nn = flops_at_accuracy(nn_curve, cfg.target_nmse)
            flops_qm, _ = best_quadrature_flops(quad_curves, cfg.target_nmse)
        except TargetUnreachable as exc:
            rows.append(Table2Row(family, None, reference, f"unreachable: {exc}"))
            continue
        rows.append(
            Table2Row(
                family,
                AlphaResult.build(family, cfg.target_nmse, flops_nn, flops_qm),
                reference,
                "ok",
            )
        )
    return rows, report


def oscillatoriness_cell(
    family: IntegrandFamily,
    grid_value: float,
    target_nmse: float,
    cfg: ExperimentConfig,
    seed: int = 0,
) -> OscPoint:
    """Alpha for one oscillatoriness level of a parametric family.

    The cell's parameter box keeps the family's original per-parameter
    widths but shifts every center by the ratio of ``grid_value`` to the
    first parameter's center, so "twice the grid value" means "twice as
    oscillatory" while the training task stays comparable across cells.
    """
    base_space = cfg.param_overrides.get(family, param_space(family))
    centers = [(lo + hi) / 2.0 for lo, hi in base_space]
    widths = [hi - lo for lo, hi in base_space]
    factor = float(grid_value) / centers[0]
    box = []
    for center, width in zip(centers, widths):
        lo = center * factor - width / 2.0
        lo = max(lo, width * 1e-2)
        box.append((lo, lo + width))
    cell_cfg = cfg.replace(
        param_overrides={**cfg.param_overrides, family: tuple(box)},
        seed=_derived_seed(cfg.seed, int(seed), int(round(grid_value * 1e6)) % (1 << 31)),
    )
    base, split_seed = _family_test_split(cell_cfg, family)
    parts = split(base, cell_cfg.split_ratios, seed=split_seed)
    _, quad_curves = _quadrature_cells(cell_cfg, family, parts.test)
    _, nn_curve = _nn_cells(cell_cfg, family, base, split_seed)
    if nn_curve is None:
        return OscPoint(grid_value, None, None, None, "no network curve")
    try:
        flops_nn = flops_at_accuracy(nn_curve, target_nmse)
        flops_qm, _ = best_quadrature_flops(quad_curves, target_nmse)
    except TargetUnreachable as exc:
        return OscPoint(grid_value, None, None, None, f"unreachable: {exc}")
    return OscPoint(
        grid_value,
        AlphaResult.build(family, target_nmse, flops_nn, flops_qm).alpha,
        flops_nn,
        flops_qm,
        "",
    )


def default_oscillatoriness_grid(family: IntegrandFamily, points: int = 5) -> List[float]:
    """Log-spaced grid from the family's parameter minimum to 4x its maximum."""
    lo, hi = param_space(family)[0]
    return list(np.geomspace(lo, 4.0 * hi, points))


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def emit_report(report: SweepReport, path) -> None:
    """Deterministic CSV: fixed header, rows sorted by family, method, n_q."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(REPORT_HEADER + "\n")
            for r in report.sorted_rows():
                cells = [
                    r.family, r.method, r.n_q, r.hidden_layers, r.neurons,
                    r.flops_paper, r.flops_exact, r.train_nmse, r.val_nmse,
                    r.test_nmse, r.epochs, r.seed, r.status,
                ]
                fh.write(",".join(_fmt_cell(c) for c in cells) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write report to {path}: {exc}") from exc


def parse_report(path) -> SweepReport:
    """Read back an emitted report; inverse of emit_report."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh]
    except OSError as exc:
        raise IoFailure(f"cannot read report from {path}: {exc}") from exc
    if not lines or lines[0] != REPORT_HEADER:
        raise IoFailure(f"{path} does not carry the sweep report header")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        c = line.split(",")
        if len(c) != 13:
            raise IoFailure(f"bad report row: {line!r}")
        rows.append(
            ReportRow(
                family=c[0], method=c[1], n_q=int(c[2]),
                hidden_layers=int(c[3]), neurons=int(c[4]),
                flops_paper=int(c[5]), flops_exact=int(c[6]),
                train_nmse=float(c[7]) if c[7] else None,
                val_nmse=float(c[8]) if c[8] else None,
                test_nmse=float(c[9]) if c[9] else None,
                epochs=int(c[10]), seed=int(c[11]), status=c[12],
            )
        )
    return SweepReport(rows=rows)
