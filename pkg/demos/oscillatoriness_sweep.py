#!/usr/bin/env python3
"""How the cost comparison moves as the integrand gets more oscillatory.

Each grid value trains models on a sine band of the family's original
width centered there, then compares the cheapest budgets reaching NMSE
1e-3.  The direction-aware ratio gain = F_qm / F_nn rises steadily with
the oscillation rate: fixed-weight rules must pay per oscillation, the
network pays per input.  The folded figure alpha = |F_nn - F_qm| / F_nn
hides that direction, which is why reports carry both.
"""

from oscint import ExperimentConfig, IntegrandFamily, TrainConfig
from oscint.metrics import alpha_vs_oscillatoriness

cfg = ExperimentConfig(
    families=(IntegrandFamily.SINE,),
    n_q_sweep=(1, 2, 4, 8, 16, 32),
    samples=2048,
    train=TrainConfig(learning_rate=3e-4, batch_size=128, max_epochs=2000,
                      stagnation_window=300, seed=0),
    seed=1,
)

grid = [5.0, 15.0, 45.0, 135.0]
print("sine bands of width 10 centered at k; this takes a few minutes\n")
points = alpha_vs_oscillatoriness(IntegrandFamily.SINE, grid, 1e-3, config=cfg)

print(f"{'k':>6} {'alpha':>8} {'gain':>8} {'F_nn':>7} {'F_qm':>7}")
for p in points:
    if p.reachable:
        gain = p.flops_qm / p.flops_nn
        print(f"{p.parameter:>6g} {p.alpha:>8.3f} {gain:>8.3f} {p.flops_nn:>7} {p.flops_qm:>7}")
    else:
        print(f"{p.parameter:>6g} {'-':>8} {'-':>8} {p.note}")
