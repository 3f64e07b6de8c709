"""Panel-Gauss quadrature: exactness, invariants, error contracts."""

import numpy as np
import pytest

from rellich_lab.errors import InputError, NumericsError
from rellich_lab.quadrature import (Interval, make_log_rule, make_rule,
                                    weighted_inner, weighted_norm_sq)


def test_two_point_rule_integrates_cubic_exactly():
    rule = make_rule(Interval(1.0, 3.0), panels=1, nodes_per_panel=2)
    val = weighted_inner(lambda r: r**3, lambda r: np.ones_like(r), 0.0, rule)
    assert val.real == pytest.approx(20.0, rel=1e-14)


def test_constant_integral():
    rule = make_rule(Interval(1.0, 2.0), panels=4, nodes_per_panel=16)
    val = weighted_inner(lambda r: np.ones_like(r), lambda r: np.ones_like(r), 0.0, rule)
    assert abs(val.real - 1.0) < 1e-14


def test_inverse_square_weight():
    rule = make_rule(Interval(0.5, 4.0), panels=8, nodes_per_panel=32)
    val = weighted_inner(lambda r: np.ones_like(r), lambda r: np.ones_like(r), -2.0, rule)
    assert val.real == pytest.approx(1.75, rel=1e-12)


def test_weights_positive_and_sum_to_width():
    for maker in (make_rule, make_log_rule):
        rule = maker(Interval(0.2, 7.0), panels=5, nodes_per_panel=12)
        assert np.all(rule.weights > 0)
        assert np.all((rule.nodes > 0.2) & (rule.nodes < 7.0))
        assert np.sum(rule.weights) == pytest.approx(6.8, rel=1e-12)


def test_polynomial_exactness_per_panel():
    # degree 2*npp - 1 polynomials are integrated exactly panel by panel,
    # hence globally
    npp = 4
    rule = make_rule(Interval(1.0, 2.0), panels=3, nodes_per_panel=npp)
    rng = np.random.Generator(np.random.Philox(key=1))
    coeffs = rng.uniform(-1, 1, size=2 * npp)
    poly = np.polynomial.Polynomial(coeffs)
    exact = poly.integ()(2.0) - poly.integ()(1.0)
    val = weighted_inner(poly, lambda r: np.ones_like(r), 0.0, rule).real
    assert val == pytest.approx(exact, rel=1e-12)


def test_weighted_inner_monomials():
    rule = make_rule(Interval(1.0, 2.0), panels=2, nodes_per_panel=8)
    val = weighted_inner(lambda r: r, lambda r: r, 1.0, rule)
    assert val.real == pytest.approx((2.0**4 - 1.0) / 4.0, rel=1e-13)
    one = weighted_inner(lambda r: np.ones_like(r), lambda r: np.ones_like(r), 0.0, rule)
    assert one.real == pytest.approx(1.0, rel=1e-14)


def test_self_convergence_against_refined_rule():
    from rellich_lab.profiles import bump
    g = bump(2.0, 1.0, 1.3)
    coarse = make_rule(g.support, panels=8, nodes_per_panel=32)
    fine = make_rule(g.support, panels=16, nodes_per_panel=64)
    for alpha in (-3.0, 0.0, 2.5):
        a = weighted_inner(g.value, g.value, alpha, coarse).real
        b = weighted_inner(g.value, g.value, alpha, fine).real
        assert a == pytest.approx(b, rel=1e-12)


def test_doubling_resolution_is_stable():
    from rellich_lab.profiles import bump
    g = bump(1.5, 0.4, 1.0)
    r1 = make_rule(g.support)
    r2 = make_rule(g.support, panels=16, nodes_per_panel=64)
    v1 = weighted_norm_sq(g.value, 1.0, r1)
    v2 = weighted_norm_sq(g.value, 1.0, r2)
    assert abs(v1 - v2) < 1e-11 * abs(v2)


def test_conjugate_symmetry_exact():
    rule = make_rule(Interval(1.0, 2.0), panels=2, nodes_per_panel=6)
    rng = np.random.Generator(np.random.Philox(key=3))
    p = rng.standard_normal(rule.nodes.size) + 1j * rng.standard_normal(rule.nodes.size)
    q = rng.standard_normal(rule.nodes.size) + 1j * rng.standard_normal(rule.nodes.size)
    assert weighted_inner(p, q, 1.5, rule) == np.conjugate(weighted_inner(q, p, 1.5, rule))


def test_linearity_first_slot():
    rule = make_rule(Interval(1.0, 3.0))
    rng = np.random.Generator(np.random.Philox(key=4))
    p1 = rng.standard_normal(rule.nodes.size)
    p2 = rng.standard_normal(rule.nodes.size)
    q = rng.standard_normal(rule.nodes.size)
    a, b = 0.7, -2.3
    lhs = weighted_inner(a * p1 + b * p2, q, -1.0, rule)
    rhs = a * weighted_inner(p1, q, -1.0, rule) + b * weighted_inner(p2, q, -1.0, rule)
    assert abs(lhs - rhs) <= 1e-13 * abs(rhs)


def test_norm_examples():
    rule = make_rule(Interval(1.0, 2.0))
    assert weighted_norm_sq(lambda r: np.zeros_like(r), 0.0, rule) == 0.0
    assert weighted_norm_sq(lambda r: np.ones_like(r), 2.0, rule) == pytest.approx(
        7.0 / 3.0, rel=1e-13)
    rng = np.random.Generator(np.random.Philox(key=5))
    for _ in range(10):
        p = rng.standard_normal(rule.nodes.size)
        assert weighted_norm_sq(p, rng.uniform(-4, 4), rule) >= 0.0


def test_interval_validation():
    with pytest.raises(InputError):
        Interval(2.0, 1.0)
    with pytest.raises(InputError):
        Interval(0.0, 1.0)
    with pytest.raises(InputError):
        Interval(-1.0, 1.0)
    with pytest.raises(InputError):
        Interval(1.0, float("inf"))


def test_rule_parameter_validation():
    with pytest.raises(InputError):
        make_rule(Interval(1.0, 2.0), panels=0)
    with pytest.raises(InputError):
        make_rule(Interval(1.0, 2.0), nodes_per_panel=1)
    with pytest.raises(InputError):
        make_log_rule(Interval(1.0, 2.0), panels=0)


def test_nonfinite_sample_reports_node_index():
    rule = make_rule(Interval(1.0, 2.0), panels=1, nodes_per_panel=4)
    bad = np.array([1.0, np.nan, 1.0, 1.0])
    with pytest.raises(NumericsError, match="index 1"):
        weighted_inner(bad, bad, 0.0, rule)


def test_sample_shape_mismatch():
    rule = make_rule(Interval(1.0, 2.0), panels=1, nodes_per_panel=4)
    with pytest.raises(InputError):
        weighted_inner(np.ones(3), np.ones(4), 0.0, rule)


def test_log_rule_wide_span_accuracy():
    rule = make_log_rule(Interval(1e-3, 1e3), panels=60, nodes_per_panel=24)
    val = weighted_inner(lambda r: np.ones_like(r), lambda r: np.ones_like(r), -2.0, rule)
    assert val.real == pytest.approx(1e3 - 1e-3, rel=1e-12)
