"""Composite Newton-Cotes rules on uniform grids with their FLOP cost model.

Three rules are provided: trapezoid and Simpson on endpoint-inclusive nodes,
midpoint on panel centers.  ``n_q`` always counts panels, so the spacing is
``dx = (s2 - s1) / n_q`` for every rule; trapezoid/Simpson evaluate the
integrand at ``n_q + 1`` nodes, midpoint at ``n_q`` nodes.

The FLOP costs are the closed forms ``2*n_q + 1`` (trapezoid),
``3*n_q + 1`` (midpoint) and ``ceil(4.5*n_q + 2)`` (Simpson), counting the
multiply-accumulate work of the weighted sums.  They depend only on the rule
and the panel count, never on the integrand values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Tuple

import numpy as np

from .errors import InvalidDomain, LengthMismatch, SimpsonOddCount, ZeroError

__all__ = [
    "QuadratureRule",
    "Grid",
    "make_grid",
    "integrate",
    "flop_cost",
    "empirical_order",
]


class QuadratureRule(Enum):
    TRAPEZOID = "trapezoid"
    MIDPOINT = "midpoint"
    SIMPSON = "simpson"


@dataclass(frozen=True)
class Grid:
    """Abscissae of one rule on ``[s1, s2]`` with ``n_q`` panels."""

    rule: QuadratureRule
    s1: float
    s2: float
    n_q: int
    abscissae: np.ndarray

    @property
    def dx(self) -> float:
        return (self.s2 - self.s1) / self.n_q


def make_grid(rule: QuadratureRule, s1: float, s2: float, n_q: int) -> Grid:
    """Build the evaluation grid of ``rule`` on ``[s1, s2]`` with ``n_q`` panels.

    Trapezoid and Simpson grids include both endpoints (``n_q + 1`` nodes);
    the midpoint grid has the ``n_q`` panel centers ``s1 + (k - 1/2) dx``.
    Simpson requires an even panel count.
    """
    if not (math.isfinite(s1) and math.isfinite(s2)) or s1 >= s2:
        raise InvalidDomain(f"need s1 < s2, got [{s1}, {s2}]")
    n_q = int(n_q)
    if n_q < 1:
        raise InvalidDomain(f"need n_q >= 1, got {n_q}")
    if rule is QuadratureRule.SIMPSON and n_q % 2 != 0:
        raise SimpsonOddCount(f"Simpson needs an even panel count, got {n_q}")
    dx = (s2 - s1) / n_q
    if rule is QuadratureRule.MIDPOINT:
        nodes = s1 + (np.arange(n_q) + 0.5) * dx
    else:
        nodes = np.linspace(s1, s2, n_q + 1)
    return Grid(rule, float(s1), float(s2), n_q, nodes)


def _n_panels(rule: QuadratureRule, n_values: int) -> int:
    if rule is QuadratureRule.MIDPOINT:
        if n_values < 1:
            raise LengthMismatch("midpoint needs at least one value")
        return n_values
    if n_values < 2:
        raise LengthMismatch(f"{rule.value} needs at least two values")
    n_q = n_values - 1
    if rule is QuadratureRule.SIMPSON and n_q % 2 != 0:
        raise LengthMismatch(
            f"Simpson needs an odd value count (even panels), got {n_values}"
        )
    return n_q


def integrate(rule: QuadratureRule, values: np.ndarray, dx: float) -> float:
    """Weighted sum of sampled integrand values with spacing ``dx``.

    ``values`` must match the rule's grid for some panel count: ``n_q + 1``
    values for trapezoid/Simpson (even ``n_q`` for Simpson), ``n_q`` values
    for midpoint.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise LengthMismatch(f"values must be one-dimensional, got shape {v.shape}")
    if dx <= 0:
        raise InvalidDomain(f"need dx > 0, got {dx}")
    _n_panels(rule, v.size)
    if rule is QuadratureRule.TRAPEZOID:
        total = np.add.reduce((v[:-1] + v[1:]) * 0.5)
    elif rule is QuadratureRule.MIDPOINT:
        total = np.add.reduce(v)
    else:
        total = np.add.reduce((v[:-2:2] + 4.0 * v[1:-1:2] + v[2::2]) / 3.0)
    return float(total * dx)


def flop_cost(rule: QuadratureRule, n_q: int) -> int:
    """Operation count of one integral evaluation with ``n_q`` panels."""
    n_q = int(n_q)
    if n_q < 1:
        raise InvalidDomain(f"need n_q >= 1, got {n_q}")
    if rule is QuadratureRule.TRAPEZOID:
        return 2 * n_q + 1
    if rule is QuadratureRule.MIDPOINT:
        return 3 * n_q + 1
    return math.ceil(4.5 * n_q + 2)


def _rule_integral(
    rule: QuadratureRule, f: Callable[[np.ndarray], np.ndarray], s1: float, s2: float, n_q: int
) -> float:
    grid = make_grid(rule, s1, s2, n_q)
    return integrate(rule, np.asarray(f(grid.abscissae), dtype=float), grid.dx)


def empirical_order(
    rule: QuadratureRule,
    integrand: Callable[[np.ndarray], np.ndarray],
    domain: Tuple[float, float],
    n_coarse: int,
    reference: float | None = None,
) -> float:
    """Observed convergence order between ``n_coarse`` and ``2*n_coarse`` panels.

    Returns ``log2(err(n) / err(2n))`` against ``reference``; when no
    reference value is supplied one is computed with Simpson's rule on 2^16
    panels, which is far below the measured errors for any smooth integrand
    at usable ``n_coarse``.  Raises ZeroError if the fine error underflows
    (the integrand is integrated exactly and no order can be measured).
    """
    s1, s2 = domain
    n_coarse = int(n_coarse)
    if n_coarse < 4:
        raise InvalidDomain(f"need n_coarse >= 4, got {n_coarse}")
    if rule is QuadratureRule.SIMPSON and n_coarse % 2 != 0:
        raise SimpsonOddCount(f"Simpson needs an even panel count, got {n_coarse}")
    if reference is None:
        reference = _rule_integral(QuadratureRule.SIMPSON, integrand, s1, s2, 2**16)
    err_coarse = abs(_rule_integral(rule, integrand, s1, s2, n_coarse) - reference)
    err_fine = abs(_rule_integral(rule, integrand, s1, s2, 2 * n_coarse) - reference)
    if err_fine == 0.0 or err_coarse == 0.0:
        raise ZeroError(
            f"{rule.value} integrates this function exactly at n={n_coarse}; "
            "no order measurable"
        )
    return math.log2(err_coarse / err_fine)
