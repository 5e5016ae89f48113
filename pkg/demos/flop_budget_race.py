#!/usr/bin/env python3
"""Accuracy-versus-budget race: trained network against Newton-Cotes rules.

For each family the harness trains one model per input count, measures
every method's normalized MSE on the same held-out samples, then reads off
the cheapest budget reaching the target accuracy.  alpha > 1 means the
quadrature rules need more than double the network's operations.
"""

from oscint import ExperimentConfig, IntegrandFamily, TrainConfig
from oscint.harness import emit_report, reproduce_table2

cfg = ExperimentConfig(
    families=(IntegrandFamily.SINE, IntegrandFamily.EXPONENTIAL),
    n_q_sweep=(1, 2, 4, 8, 16, 32),
    samples=2048,
    train=TrainConfig(learning_rate=3e-4, batch_size=128, max_epochs=2500,
                      stagnation_window=400, seed=0),
    seed=5,
)

print("running the two quick families (sine, exp); the oscillatory ones")
print("take minutes each - use the CLI with a config file for the full set\n")
rows, report = reproduce_table2(cfg)

print(f"{'family':<6} {'alpha':>7} {'gain':>7} {'F_nn':>7} {'F_qm':>7}  status")
for r in rows:
    if r.result:
        print(
            f"{r.family.value:<6} {r.result.alpha:>7.2f} {r.result.gain:>7.2f} "
            f"{r.result.flops_nn:>7} {r.result.flops_qm:>7}  {r.status}"
        )
    else:
        print(f"{r.family.value:<6} {'-':>7} {'-':>7} {'-':>7} {'-':>7}  {r.status}")

emit_report(report, "flop_budget_race_report.csv")
print("\nper-method sweep rows written to flop_budget_race_report.csv")
print("(gain = F_qm / F_nn: above 1 the network is the cheaper integrator)")
