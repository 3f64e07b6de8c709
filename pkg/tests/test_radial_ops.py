"""Half-line operators: constants, mode contexts, Laplacians."""

import numpy as np
import pytest

from rellich_lab.errors import InputError
from rellich_lab.profiles import bump, random_profile, windowed_poly
from rellich_lab.quadrature import make_rule
from rellich_lab.radial_ops import (ModeContext, mode_eigenvalue, mode_laplacian,
                                    radial_laplacian, rellich_constant,
                                    shifted_radial_laplacian)


def test_rellich_constant_values():
    assert rellich_constant(4) == 0.0
    assert rellich_constant(5) == 1.25
    assert rellich_constant(5) ** 2 == 1.5625
    assert rellich_constant(3) == -0.75
    with pytest.raises(InputError):
        rellich_constant(1)


def test_mode_eigenvalue_values():
    for n in range(2, 9):
        assert mode_eigenvalue(n, 0) == 0.0
    assert mode_eigenvalue(3, 1) == 2.0
    assert mode_eigenvalue(5, 2) == 10.0
    with pytest.raises(InputError):
        mode_eigenvalue(5, -1)


def test_mode_context_invariants():
    for n in range(2, 11):
        for ell in range(0, 5):
            ctx = ModeContext(n, ell)
            assert ctx.lam >= 0.0
            assert (ctx.lam == 0.0) == (ell == 0)
            assert (ctx.rellich == 0.0) == (n == 4)
    with pytest.raises(InputError):
        ModeContext(1, 0)
    with pytest.raises(InputError):
        ModeContext(4, -2)


def test_radial_laplacian_polynomial_identity():
    g = windowed_poly([0.0, 0.0, 1.0], 0.5, 3.5, 0.5)   # r^2 on the plateau
    op = radial_laplacian(g, 3)
    r = np.linspace(1.2, 2.8, 21)
    assert np.max(np.abs(op(r) - 6.0)) < 1e-12


def test_radial_laplacian_bump_peak():
    g = bump(2.0, 1.0, 1.0)
    op = radial_laplacian(g, 4)
    # derivative vanishes at the peak, so only g'' survives
    assert op(np.array([2.0]))[0] == pytest.approx(g.deriv2(2.0), rel=1e-14)


def test_radial_laplacian_constant_window():
    g = windowed_poly([1.0], 0.5, 3.5, 0.5)
    op = radial_laplacian(g, 5)
    r = np.linspace(1.1, 2.9, 13)
    assert np.max(np.abs(op(r))) == 0.0


def test_shifted_equals_lower_dimension():
    g = bump(2.0, 0.8, 1.0)
    r = np.linspace(1.3, 2.7, 29)
    assert np.array_equal(shifted_radial_laplacian(g, 5)(r), radial_laplacian(g, 3)(r))
    assert np.allclose(shifted_radial_laplacian(g, 4)(r),
                       g.deriv2(r) + g.deriv1(r) / r, rtol=0, atol=1e-15)
    with pytest.raises(InputError):
        shifted_radial_laplacian(g, 3)


def test_shifted_polynomial_identity():
    g = windowed_poly([0.0, 0.0, 1.0], 0.5, 3.5, 0.5)
    op = shifted_radial_laplacian(g, 6)
    r = np.linspace(1.2, 2.8, 11)
    assert np.max(np.abs(op(r) - 8.0)) < 1e-12


def test_mode_laplacian_degree_zero_identical():
    g = random_profile(2)
    rule = make_rule(g.support)
    a = mode_laplacian(g, ModeContext(5, 0))(rule.nodes)
    b = radial_laplacian(g, 5)(rule.nodes)
    assert np.array_equal(a, b)


def test_mode_laplacian_harmonic_profiles():
    # r Y_1 is harmonic in n = 3: the window is exactly 1 on the plateau
    g = windowed_poly([0.0, 1.0], 0.5, 3.5, 0.5)
    op = mode_laplacian(g, ModeContext(3, 1))
    r = np.linspace(1.2, 2.8, 17)
    assert np.max(np.abs(op(r))) < 1e-12
    # r^2 in n = 5 with lam = 4: 2 + 8 - 4 = 6
    g2 = windowed_poly([0.0, 0.0, 1.0], 0.5, 3.5, 0.5)
    op2 = mode_laplacian(g2, ModeContext(5, 1))
    assert np.max(np.abs(op2(r) - 6.0)) < 1e-12


@pytest.mark.parametrize("n,ell", [(3, 1), (4, 2), (6, 3), (7, 2)])
def test_harmonic_profile_annihilation(n, ell):
    g = windowed_poly([0.0] * ell + [1.0], 0.5, 3.5, 0.5)
    op = mode_laplacian(g, ModeContext(n, ell))
    r = np.linspace(1.1, 2.9, 41)
    scale = np.max(np.abs(g.value(r) / r**2)) * ModeContext(n, ell).lam
    assert np.max(np.abs(op(r))) <= 1e-12 * max(scale, 1.0)


def test_operator_linearity():
    g1 = bump(1.8, 0.5, 1.0)
    g2 = bump(2.3, 0.6, 1.0)
    from rellich_lab.profiles import linear_combination
    a, b = 1.7, -0.4
    combo = linear_combination([g1, g2], [a, b])
    r = np.linspace(1.31, 2.89, 50)
    ctx = ModeContext(5, 2)
    for op in (lambda g: radial_laplacian(g, 5),
               lambda g: shifted_radial_laplacian(g, 5),
               lambda g: mode_laplacian(g, ctx)):
        direct = op(combo)(r)
        summed = a * op(g1)(r) + b * op(g2)(r)
        scale = np.max(np.abs(direct))
        assert np.max(np.abs(direct - summed)) <= 1e-13 * max(scale, 1.0)
