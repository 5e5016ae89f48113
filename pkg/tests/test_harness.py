import numpy as np
import pytest

from oscint.config import ExperimentConfig, load_config, worker_count
from oscint.errors import IoFailure
from oscint.harness import (
    REPORT_HEADER,
    ReportRow,
    SweepReport,
    emit_report,
    hyperparameter_search,
    oscillatoriness_cell,
    parse_report,
    reproduce_table2,
    run_nn_sweep,
    run_quadrature_sweep,
)
from oscint.integrands import IntegrandFamily
from oscint.metrics import alpha_vs_oscillatoriness
from oscint.mlp import FlopMode, TrainConfig, nn_flops
from oscint.quadrature import QuadratureRule, flop_cost

F = IntegrandFamily

FAST_TRAIN = TrainConfig(
    learning_rate=1e-3, batch_size=64, max_epochs=150, stagnation_window=150, seed=0
)


def small_cfg(**kwargs) -> ExperimentConfig:
    defaults = dict(
        families=(F.SINE,),
        n_q_sweep=(1, 2, 4, 8),
        samples=300,
        train=FAST_TRAIN,
        seed=3,
    )
    defaults.update(kwargs)
    defaults.setdefault("quad_n_q_sweep", defaults["n_q_sweep"])
    return ExperimentConfig(**defaults)


class TestQuadratureSweep:
    def test_rows_and_flops(self):
        cfg = small_cfg(n_q_sweep=(1, 2, 4, 8, 1024))
        report = run_quadrature_sweep(cfg)
        by_method = {}
        for row in report.rows:
            by_method.setdefault(row.method, []).append(row)
        assert set(by_method) == {"trapezoid", "midpoint", "simpson"}
        for row in report.rows:
            rule = QuadratureRule(row.method)
            assert row.flops_paper == flop_cost(rule, row.n_q)
        # Simpson cannot run odd panel counts; the row is kept, marked failed
        simpson_1 = [r for r in by_method["simpson"] if r.n_q == 1]
        assert simpson_1 and simpson_1[0].status.startswith("failed")
        assert simpson_1[0].test_nmse is None

    def test_smooth_family_converges(self):
        cfg = small_cfg(families=(F.EXPONENTIAL,), n_q_sweep=(1, 2, 4, 1024))
        report = run_quadrature_sweep(cfg)
        trap_rows = {r.n_q: r for r in report.rows if r.method == "trapezoid"}
        assert trap_rows[1024].test_nmse <= 1e-6
        assert trap_rows[1].test_nmse > trap_rows[1024].test_nmse

    def test_oscillatory_single_panel_is_bad(self):
        cfg = small_cfg(n_q_sweep=(1, 2, 1024))
        report = run_quadrature_sweep(cfg)
        trap_rows = {r.n_q: r for r in report.rows if r.method == "trapezoid"}
        assert trap_rows[1].test_nmse >= 1e-2

    def test_smooth_curve_nonincreasing_past_preasymptotics(self):
        cfg = small_cfg(families=(F.EXPONENTIAL,), n_q_sweep=(4, 8, 16, 32, 64, 128))
        report = run_quadrature_sweep(cfg)
        for method in ("trapezoid", "midpoint", "simpson"):
            nmse = [r.test_nmse for r in report.sorted_rows()
                    if r.method == method and r.status == "ok"]
            assert all(b <= a * (1 + 1e-9) for a, b in zip(nmse, nmse[1:]))


class TestNnSweep:
    def test_rows_complete_and_deterministic(self):
        cfg = small_cfg()
        a = run_nn_sweep(cfg)
        b = run_nn_sweep(cfg)
        assert a.rows == b.rows
        assert {r.n_q for r in a.rows} == {1, 2, 4, 8}
        for row in a.rows:
            assert row.method == "nn"
            assert row.flops_paper == nn_flops(row.neurons, row.hidden_layers, row.n_q)
            assert row.flops_exact == nn_flops(
                row.neurons, row.hidden_layers, row.n_q, FlopMode.EXACT
            )
            assert row.status == "ok"
            assert np.isfinite(row.test_nmse)

    def test_single_input_cell_runs(self):
        cfg = small_cfg(n_q_sweep=(1, 2))
        report = run_nn_sweep(cfg)
        row = next(r for r in report.rows if r.n_q == 1)
        assert row.status == "ok" and np.isfinite(row.test_nmse)


class TestEmitReport:
    def test_round_trip(self, tmp_path):
        cfg = small_cfg(n_q_sweep=(1, 2))
        report = run_nn_sweep(cfg)
        path = tmp_path / "report.csv"
        emit_report(report, path)
        back = parse_report(path)
        assert back.rows == report.sorted_rows()

    def test_empty_report_is_header_only(self, tmp_path):
        path = tmp_path / "report.csv"
        emit_report(SweepReport(), path)
        assert path.read_text() == REPORT_HEADER + "\n"

    def test_byte_identical_across_runs(self, tmp_path):
        cfg = small_cfg(n_q_sweep=(1, 2))
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_report(run_nn_sweep(cfg), p1)
        emit_report(run_nn_sweep(cfg), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_row_order_is_sorted(self, tmp_path):
        rows = [
            ReportRow("sine", "nn", 4, 1, 1, 1, 1, None, None, 0.5, 1, 0),
            ReportRow("exp", "nn", 2, 1, 1, 1, 1, None, None, 0.5, 1, 0),
            ReportRow("sine", "nn", 2, 1, 1, 1, 1, None, None, 0.5, 1, 0),
        ]
        path = tmp_path / "report.csv"
        emit_report(SweepReport(rows=rows), path)
        parsed = parse_report(path)
        keys = [(r.family, r.method, r.n_q) for r in parsed.rows]
        assert keys == sorted(keys)

    def test_parse_rejects_garbage(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("nope\n")
        with pytest.raises(IoFailure):
            parse_report(path)


class TestSearch:
    def test_singleton_grid(self):
        cfg = small_cfg(
            hidden_grid=(1,), neuron_grid=(4,), search_n_in=4, target_nmse=1e6
        )
        result = hyperparameter_search(cfg)
        assert result.feasible
        assert result.best.hidden_layers == 1 and result.best.neurons == 4
        assert len(result.table) == 1

    def test_zero_target_is_infeasible(self):
        cfg = small_cfg(hidden_grid=(1,), neuron_grid=(2, 3), search_n_in=4,
                        target_nmse=0.0)
        result = hyperparameter_search(cfg)
        assert not result.feasible
        assert result.best.neurons in (2, 3)

    def test_prefers_cheaper_feasible_arch(self):
        cfg = small_cfg(
            hidden_grid=(1, 2), neuron_grid=(2, 4), search_n_in=4, target_nmse=1e6
        )
        result = hyperparameter_search(cfg)
        # everything is feasible at an absurd target, so the smallest
        # aggregate-FLOPs architecture must win
        assert (result.best.hidden_layers, result.best.neurons) == (1, 2)


class TestTable2:
    def test_structure_and_reference_column(self):
        cfg = small_cfg(families=(F.SINE, F.EXPONENTIAL), n_q_sweep=(1, 2, 4, 8, 16))
        rows, report = reproduce_table2(cfg)
        assert [r.family for r in rows] == [F.SINE, F.EXPONENTIAL]
        assert rows[0].reference_alpha == pytest.approx(0.91)
        assert rows[1].reference_alpha == pytest.approx(0.60)
        assert len(report.rows) > 0
        for r in rows:
            if r.result is not None:
                assert r.result.alpha == pytest.approx(
                    abs(r.result.flops_nn - r.result.flops_qm) / r.result.flops_nn
                )

    def test_exponential_alpha_small_when_reachable(self):
        cfg = small_cfg(
            families=(F.EXPONENTIAL,),
            n_q_sweep=(1, 2, 4, 8, 16),
            samples=500,
            train=TrainConfig(learning_rate=1e-3, batch_size=64, max_epochs=400,
                              stagnation_window=400, seed=0),
        )
        rows, _ = reproduce_table2(cfg)
        row = rows[0]
        if row.result is not None:
            assert row.result.alpha <= 1.5


class TestOscillatoriness:
    def test_singleton_grid_cell(self):
        cfg = small_cfg(n_q_sweep=(1, 2, 4, 8, 16), samples=400, target_nmse=1e6)
        points = alpha_vs_oscillatoriness(F.SINE, [10.0], 1e6, config=cfg, seed=0)
        assert len(points) == 1
        assert points[0].parameter == 10.0
        assert points[0].reachable
        assert points[0].alpha is not None

    def test_unreachable_cell_flagged_not_raised(self):
        cfg = small_cfg(n_q_sweep=(1, 2), samples=200, target_nmse=1e-12)
        point = oscillatoriness_cell(F.SINE, 10.0, 1e-12, cfg, seed=0)
        assert not point.reachable
        assert "unreachable" in point.note or "curve" in point.note


class TestConfig:
    def test_defaults_mirror_search_space(self):
        cfg = ExperimentConfig()
        assert cfg.hidden_grid == (1, 2, 3, 4, 5)
        assert cfg.neuron_grid == (1, 2, 3, 4, 5, 6, 7)
        assert cfg.sample_grid == (100, 1000, 10000)
        assert cfg.learning_rate_grid == (1e-5, 1e-4, 1e-3)
        assert cfg.holdout_grid == (0.1, 0.15, 0.2)
        assert cfg.n_q_sweep == tuple(2**p for p in range(14))
        assert cfg.samples == 10_000
        assert cfg.target_nmse == 1e-3
        assert cfg.train.learning_rate == 1e-4

    def test_toml_round_trip(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text(
            """
[family]
names = ["sine", "rp"]

[family.sine]
domain = [0.0, 2.0]
param_0 = [6.0, 12.0]

[domain]
s1 = -1.0
s2 = 3.0

[sweep]
n_q = [1, 2, 4]
samples = 123
target_nmse = 5e-3
flop_mode = "paper"

[train]
learning_rate = 2e-3
batch_size = 16

[rp]
rho = 600.0
horizon_s = 5e-6
drive_freq_hz = 20000.0
"""
        )
        cfg = load_config(path, seed=77)
        assert cfg.families == (F.SINE, F.RAYLEIGH_PLESSET)
        assert cfg.domain == (-1.0, 3.0)
        assert cfg.domain_for(F.SINE) == (0.0, 2.0)
        assert cfg.param_overrides[F.SINE] == ((6.0, 12.0),)
        assert cfg.n_q_sweep == (1, 2, 4)
        assert cfg.quad_n_q_sweep == tuple(2**p for p in range(14))
        assert cfg.samples == 123
        assert cfg.target_nmse == 5e-3
        assert cfg.flop_mode is FlopMode.PAPER
        assert cfg.train.learning_rate == 2e-3
        assert cfg.train.batch_size == 16
        assert cfg.rp.rho == 600.0
        assert cfg.rp.T == 5e-6
        assert cfg.rp.drive_angular_frequency == pytest.approx(2 * np.pi * 20000.0)
        assert cfg.seed == 77

    def test_bad_family_name(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text('[family]\nnames = ["sinus"]\n')
        with pytest.raises(ValueError):
            load_config(path)

    def test_worker_count_env(self, monkeypatch):
        monkeypatch.delenv("OSCINT_WORKERS", raising=False)
        assert worker_count() == 1
        monkeypatch.setenv("OSCINT_WORKERS", "4")
        assert worker_count() == 4
        monkeypatch.setenv("OSCINT_WORKERS", "zero")
        with pytest.raises(ValueError):
            worker_count()

    def test_workers_do_not_change_results(self, monkeypatch, tmp_path):
        cfg = small_cfg(n_q_sweep=(1, 2, 4))
        monkeypatch.delenv("OSCINT_WORKERS", raising=False)
        serial = run_nn_sweep(cfg)
        monkeypatch.setenv("OSCINT_WORKERS", "3")
        parallel = run_nn_sweep(cfg)
        assert serial.sorted_rows() == parallel.sorted_rows()
