#!/usr/bin/env python3
"""Convergence orders and operation costs of the three Newton-Cotes rules.

Halving the spacing should cut the trapezoid/midpoint error ~4x (order 2)
and the Simpson error ~16x (order 4).  The FLOP column is the exact cost
model used everywhere in this package: 2n+1 / 3n+1 / ceil(4.5n+2).
"""

import math

import numpy as np

from oscint import QuadratureRule, empirical_order, flop_cost, integrate, make_grid

EXACT = math.e - 1.0  # integral of exp(x) over [0, 1]

print("integrating exp(x) on [0, 1]\n")
print(f"{'rule':<10} {'n_q':>6} {'estimate':>20} {'abs error':>12} {'FLOPs':>8}")
for rule in QuadratureRule:
    for n_q in (4, 16, 64, 256, 1024):
        grid = make_grid(rule, 0.0, 1.0, n_q)
        est = integrate(rule, np.exp(grid.abscissae), grid.dx)
        print(
            f"{rule.value:<10} {n_q:>6} {est:>20.15f} "
            f"{abs(est - EXACT):>12.3e} {flop_cost(rule, n_q):>8}"
        )
    print()

print("observed orders between n=64 and n=128 (against the analytic value):")
for rule in QuadratureRule:
    p = empirical_order(rule, np.exp, (0.0, 1.0), 64, reference=EXACT)
    print(f"  {rule.value:<10} order {p:.3f}")

# an oscillatory integrand needs many more points before the asymptotic
# rates kick in; that gap is the whole premise of the trained integrator
k = 40.0
exact = (1.0 - math.cos(k)) / k
print(f"\nintegrating sin({k:g} x) on [0, 1] (exact {exact:.10f}):")
print(f"{'n_q':>6} {'trapezoid error':>16} {'simpson error':>16}")
for n_q in (4, 8, 16, 32, 64, 128, 256):
    errs = []
    for rule in (QuadratureRule.TRAPEZOID, QuadratureRule.SIMPSON):
        grid = make_grid(rule, 0.0, 1.0, n_q)
        est = integrate(rule, np.sin(k * grid.abscissae), grid.dx)
        errs.append(abs(est - exact))
    print(f"{n_q:>6} {errs[0]:>16.3e} {errs[1]:>16.3e}")
