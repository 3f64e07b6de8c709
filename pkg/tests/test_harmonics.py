"""Zonal harmonics: recurrence values, ODE residuals, orthogonality."""

import math

import numpy as np
import pytest

from rellich_lab.errors import InputError
from rellich_lab.harmonics import (sphere_area, weighted_pair_integral, zonal,
                                   zonal_ode_residual, zonal_sphere_norm_sq)


def test_degree_zero_and_one():
    for n in (2, 3, 5, 9):
        z0 = zonal(n, 0)
        assert np.array_equal(z0.coeffs, [1.0])
        z1 = zonal(n, 1)
        assert np.array_equal(z1.coeffs, [0.0, 1.0])


def test_legendre_p2():
    z = zonal(3, 2)
    assert np.allclose(z.coeffs, [-0.5, 0.0, 1.5], rtol=0, atol=1e-15)


def test_chebyshev_case():
    # n = 2 zonal harmonics are Chebyshev polynomials: z(cos a) = cos(l a)
    z = zonal(2, 3)
    for a in (0.3, 1.1, 2.0):
        assert z.value(math.cos(a)) == pytest.approx(math.cos(3 * a), rel=1e-12)


def test_normalization_at_one():
    for n in (2, 3, 4, 7, 10):
        for ell in range(0, 9):
            assert zonal(n, ell).value(1.0) == pytest.approx(1.0, rel=1e-12)


def test_degree_guard():
    zonal(3, 64)
    with pytest.raises(InputError):
        zonal(3, 65)
    with pytest.raises(InputError):
        zonal(1, 2)


def test_ode_residual_examples():
    assert zonal_ode_residual(zonal(4, 0)) == 0.0
    assert zonal_ode_residual(zonal(3, 2)) < 1e-12
    assert zonal_ode_residual(zonal(5, 3)) < 1e-10


def test_ode_residual_certifies_eigenvalue():
    # the residual blows up if the eigenvalue were off by one unit
    z = zonal(5, 3)
    t = np.linspace(-1, 1, 1002)[1:-1]
    lam_wrong = 3 * (3 + 5 - 2) + 1
    res = (1 - t * t) * z.deriv2(t) - 4 * t * z.deriv1(t) + lam_wrong * z.value(t)
    assert np.max(np.abs(res)) / np.max(np.abs(z.value(t))) > 0.1


@pytest.mark.parametrize("n", [3, 4, 5, 7, 10])
def test_orthogonality(n):
    zs = [zonal(n, ell) for ell in range(9)]
    diags = [weighted_pair_integral(z, z) for z in zs]
    for i in range(9):
        for j in range(i + 1, 9):
            off = weighted_pair_integral(zs[i], zs[j])
            assert abs(off) <= 1e-10 * math.sqrt(diags[i] * diags[j])


def test_weight_integral_known_values():
    # n = 3: plain Lebesgue weight
    assert weighted_pair_integral(zonal(3, 0), zonal(3, 0)) == pytest.approx(2.0, rel=1e-12)
    assert weighted_pair_integral(zonal(3, 2), zonal(3, 2)) == pytest.approx(0.4, rel=1e-12)
    # n = 4: semicircle weight
    assert weighted_pair_integral(zonal(4, 0), zonal(4, 0)) == pytest.approx(
        math.pi / 2.0, rel=1e-12)
    with pytest.raises(InputError):
        weighted_pair_integral(zonal(2, 1), zonal(2, 1))
    with pytest.raises(InputError):
        weighted_pair_integral(zonal(3, 1), zonal(4, 1))


def test_sphere_areas():
    assert sphere_area(1) == pytest.approx(2 * math.pi, rel=1e-14)
    assert sphere_area(2) == pytest.approx(4 * math.pi, rel=1e-14)
    assert sphere_area(3) == pytest.approx(2 * math.pi**2, rel=1e-14)


def test_zonal_sphere_norm():
    # constant harmonic: norm^2 equals the sphere area
    assert zonal_sphere_norm_sq(zonal(3, 0)) == pytest.approx(4 * math.pi, rel=1e-12)
    # n = 3, l = 1: 2*pi * int t^2 dt = 4*pi/3
    assert zonal_sphere_norm_sq(zonal(3, 1)) == pytest.approx(4 * math.pi / 3.0, rel=1e-12)
