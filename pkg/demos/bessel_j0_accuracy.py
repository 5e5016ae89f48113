#!/usr/bin/env python3
"""Accuracy of the polynomial/asymptotic J0 against an exact series.

The evaluator switches from a rational polynomial in x^2 to the Hankel
asymptotic form at |x| = 8.  The reference below sums the Maclaurin series
in exact rational arithmetic, so the only error in it is the truncation,
driven below 1e-45.
"""

from fractions import Fraction

import numpy as np

from oscint import bessel_j0


def j0_series(xf: float) -> float:
    x = Fraction(xf)
    q = x * x / 4
    term = Fraction(1)
    total = Fraction(1)
    k = 0
    while True:
        k += 1
        term = term * q / (k * k)
        total = total - term if k % 2 == 1 else total + term
        if k > xf / 2 + 2 and term < Fraction(1, 10**45):
            return float(total)


print(f"{'x':>10} {'bessel_j0':>22} {'series':>22} {'abs err':>10}")
for x in (0.0, 0.5, 2.404825557695773, 5.0, 7.999, 8.001, 10.0, 50.0, 175.0):
    mine = bessel_j0(x)
    ref = j0_series(x)
    print(f"{x:>10.4f} {mine:>22.15f} {ref:>22.15f} {abs(mine - ref):>10.2e}")

grid = np.linspace(0.0, 200.0, 401)
worst = max(abs(bessel_j0(float(x)) - j0_series(float(x))) for x in grid)
print(f"\nworst absolute error on [0, 200] (401-point grid): {worst:.2e}")
print("the integrand families need |x| up to 175; the contract is 1e-7")
