#!/usr/bin/env python3
"""Train the network integrator on the sine family and compare budgets.

A (3 hidden layers x 5 neurons) network reading 16 fixed samples of
sin(k x) learns the integral over k in [5, 15] to a normalized MSE well
below 1e-3.  The interesting part is the cost comparison at that accuracy:
per-inference the network costs a few hundred operations, while Simpson
needs only a few dozen for this mildly oscillatory family - the network
only wins once the integrand oscillates much faster than its input grid.
"""

import numpy as np

from oscint import (
    Architecture,
    FlopMode,
    IntegrandFamily,
    QuadratureRule,
    TrainConfig,
    build_dataset,
    eval_family,
    flop_cost,
    forward,
    init,
    integrate,
    make_grid,
    nn_flops,
    normalized_mse,
    split,
    train,
)

FAMILY = IntegrandFamily.SINE
DOMAIN = (0.0, 1.0)
N_IN = 16

print("building 4096 samples (16 inputs each, trapezoid@2^13 truths)...")
data = build_dataset(FAMILY, 4096, N_IN, DOMAIN, seed=7)
parts = split(data, (0.8, 0.1, 0.1), seed=7)

# tiny ReLU networks sometimes land in dead-unit optima, so train a few
# seeds and keep the best validation score (the harness does the same)
print("training (3x5 ReLU network, best of 3 seeds)...")
net = report = None
for seed in (7, 8, 9):
    cfg = TrainConfig(learning_rate=3e-4, batch_size=128, max_epochs=3000,
                      stagnation_window=400, seed=seed)
    candidate, rep = train(init(Architecture(N_IN, 3, 5), seed=seed), parts, cfg)
    print(f"  seed {seed}: val NMSE {rep.final_val_nmse:.3e} after {rep.epochs_run} epochs")
    if report is None or rep.final_val_nmse < report.final_val_nmse:
        net, report = candidate, rep

preds = forward(net, parts.test.inputs)
test_nmse = normalized_mse(preds, parts.test.truths)
print(f"epochs run        : {report.epochs_run} (best val at {report.best_epoch})")
print(f"final train NMSE  : {report.final_train_nmse:.3e}")
print(f"test NMSE         : {test_nmse:.3e}")

print("\nsample predictions vs surrogate truths:")
for i in range(5):
    k = parts.test.params[i, 0]
    print(f"  k = {k:7.3f}: predicted {preds[i]: .6f}, truth {parts.test.truths[i]: .6f}")

# what does the same accuracy cost the classical rules on these test samples?
print("\nSimpson NMSE on the same test samples:")
for n_q in (2, 4, 8, 16, 32):
    grid = make_grid(QuadratureRule.SIMPSON, *DOMAIN, n_q)
    q = np.array(
        [integrate(QuadratureRule.SIMPSON,
                   eval_family(FAMILY, p, grid.abscissae), grid.dx)
         for p in parts.test.params]
    )
    print(f"  n_q {n_q:>3} ({flop_cost(QuadratureRule.SIMPSON, n_q):>4} FLOPs): "
          f"NMSE {normalized_mse(q, parts.test.truths):.3e}")

print(f"\nnetwork inference cost: {nn_flops(5, 3, N_IN, FlopMode.EXACT)} FLOPs "
      f"(exact count), {nn_flops(5, 3, N_IN, FlopMode.PAPER)} (aggregate formula)")
