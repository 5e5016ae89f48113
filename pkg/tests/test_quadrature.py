import math

import numpy as np
import pytest

from oscint.errors import InvalidDomain, LengthMismatch, SimpsonOddCount, ZeroError
from oscint.quadrature import (
    Grid,
    QuadratureRule,
    empirical_order,
    flop_cost,
    integrate,
    make_grid,
)

TRAP = QuadratureRule.TRAPEZOID
MID = QuadratureRule.MIDPOINT
SIMP = QuadratureRule.SIMPSON


class TestMakeGrid:
    def test_trapezoid_nodes(self):
        g = make_grid(TRAP, 0.0, 1.0, 4)
        np.testing.assert_allclose(g.abscissae, [0.0, 0.25, 0.5, 0.75, 1.0], atol=0)
        assert g.dx == 0.25

    def test_midpoint_nodes(self):
        g = make_grid(MID, 0.0, 1.0, 2)
        np.testing.assert_allclose(g.abscissae, [0.25, 0.75], atol=0)

    def test_simpson_counts_nodes(self):
        g = make_grid(SIMP, 0.0, 2.0, 4)
        assert g.abscissae.size == 5
        assert g.abscissae[0] == 0.0 and g.abscissae[-1] == 2.0

    def test_simpson_odd_rejected(self):
        with pytest.raises(SimpsonOddCount):
            make_grid(SIMP, 0.0, 1.0, 3)

    @pytest.mark.parametrize("s1,s2", [(1.0, 1.0), (2.0, 1.0), (np.inf, 1.0)])
    def test_invalid_domain(self, s1, s2):
        with pytest.raises(InvalidDomain):
            make_grid(TRAP, s1, s2, 4)

    def test_nodes_inside_domain_and_increasing(self):
        for rule in QuadratureRule:
            g = make_grid(rule, -2.0, 3.0, 8)
            assert np.all(np.diff(g.abscissae) > 0)
            assert g.abscissae[0] >= -2.0 and g.abscissae[-1] <= 3.0


class TestIntegrate:
    @pytest.mark.parametrize("rule", list(QuadratureRule))
    def test_constant_is_exact(self, rule):
        g = make_grid(rule, 0.0, 1.0, 8)
        v = np.full(g.abscissae.size, 1.0)
        assert integrate(rule, v, g.dx) == pytest.approx(1.0, abs=1e-15)

    def test_simpson_exact_for_quadratic(self):
        g = make_grid(SIMP, 0.0, 1.0, 2)
        v = g.abscissae**2
        assert integrate(SIMP, v, g.dx) == pytest.approx(1.0 / 3.0, abs=1e-16)

    def test_trapezoid_sin10_at_2to13(self):
        # analytic antiderivative oracle: integral of sin(10 x) on [0, 1]
        exact = (1.0 - math.cos(10.0)) / 10.0
        g = make_grid(TRAP, 0.0, 1.0, 2**13)
        got = integrate(TRAP, np.sin(10.0 * g.abscissae), g.dx)
        # leading Euler-Maclaurin term (dx^2/12)(f'(1)-f'(0)) = 2.284e-8
        assert abs(got - exact) < 5e-8

    @pytest.mark.parametrize("rule", list(QuadratureRule))
    def test_linearity(self, rule):
        rng = np.random.default_rng(7)
        g = make_grid(rule, 0.0, 1.0, 16)
        n = g.abscissae.size
        for _ in range(10):
            v, w = rng.normal(size=(2, n))
            a, b = rng.normal(size=2)
            lhs = integrate(rule, a * v + b * w, g.dx)
            rhs = a * integrate(rule, v, g.dx) + b * integrate(rule, w, g.dx)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)

    def test_rules_agree_on_smooth_function(self):
        exact = math.e - 1.0
        for rule in QuadratureRule:
            g = make_grid(rule, 0.0, 1.0, 64)
            got = integrate(rule, np.exp(g.abscissae), g.dx)
            assert got == pytest.approx(exact, rel=1e-3)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            integrate(SIMP, np.ones(4), 0.1)  # even node count = odd panels
        with pytest.raises(LengthMismatch):
            integrate(TRAP, np.ones(1), 0.1)

    def test_bad_dx(self):
        with pytest.raises(InvalidDomain):
            integrate(TRAP, np.ones(5), 0.0)


class TestFlopCost:
    @pytest.mark.parametrize(
        "rule,n_q,expected",
        [(TRAP, 8, 17), (MID, 8, 25), (SIMP, 8, 38), (TRAP, 1, 3), (SIMP, 3, 16)],
    )
    def test_values(self, rule, n_q, expected):
        assert flop_cost(rule, n_q) == expected

    def test_closed_forms_over_sweep(self):
        for p in range(14):
            n = 2**p
            assert flop_cost(TRAP, n) == 2 * n + 1
            assert flop_cost(MID, n) == 3 * n + 1
            assert flop_cost(SIMP, n) == math.ceil(4.5 * n + 2)

    def test_cost_ignores_values(self):
        # cost is a pure function of (rule, n_q); nothing else to pass in
        assert flop_cost(TRAP, 100) == flop_cost(TRAP, 100)


class TestEmpiricalOrder:
    def test_trapezoid_second_order(self):
        p = empirical_order(TRAP, np.exp, (0.0, 1.0), 64, reference=math.e - 1.0)
        assert abs(p - 2.0) < 0.1

    def test_midpoint_second_order(self):
        # composite midpoint converges at second order despite its
        # one-panel first-order reputation
        p = empirical_order(MID, np.exp, (0.0, 1.0), 64, reference=math.e - 1.0)
        assert abs(p - 2.0) < 0.1

    def test_simpson_fourth_order(self):
        p = empirical_order(SIMP, np.exp, (0.0, 1.0), 64, reference=math.e - 1.0)
        assert abs(p - 4.0) < 0.2

    def test_internal_reference(self):
        p = empirical_order(TRAP, np.exp, (0.0, 1.0), 64)
        assert abs(p - 2.0) < 0.1

    def test_zero_error(self):
        with pytest.raises(ZeroError):
            # straight line: trapezoid is exact, reference too
            empirical_order(TRAP, lambda x: x, (0.0, 1.0), 64, reference=0.5)


def test_grid_is_frozen():
    g = make_grid(TRAP, 0.0, 1.0, 4)
    assert isinstance(g, Grid)
    with pytest.raises(AttributeError):
        g.n_q = 8
