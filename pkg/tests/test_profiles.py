"""Profile families: closed-form derivatives, supports, serialization."""

import json
import math

import numpy as np
import pytest

from rellich_lab.errors import InputError
from rellich_lab.profiles import (SampledProfile, bump, linear_combination,
                                  profile_from_dict, profile_from_json,
                                  random_profile, star, windowed_poly)


def central_diff(f, r, h=1e-5):
    return (f(r + h) - f(r - h)) / (2 * h)


def central_diff2(f, r, h=1e-5):
    return (f(r + h) - 2 * f(r) + f(r - h)) / h**2


def test_bump_peak_value():
    g = bump(2.0, 1.0, 1.0)
    assert g.value(2.0) == pytest.approx(math.exp(-1.0), rel=1e-15)


def test_bump_endpoint_exact_zero():
    g = bump(2.0, 1.0, 1.0)
    for r in (1.0, 3.0, 0.5, 3.5):
        assert g.value(r) == 0.0
        assert g.deriv1(r) == 0.0
        assert g.deriv2(r) == 0.0


def test_bump_second_derivative_matches_finite_difference():
    g = bump(2.0, 1.0, 1.0)
    fd = central_diff2(g.value, 2.5)
    assert g.deriv2(2.5) == pytest.approx(fd, rel=1e-8)


def test_bump_support_floor():
    with pytest.raises(InputError):
        bump(1.0, 1.0, 1.0)
    with pytest.raises(InputError):
        bump(2.0, -0.5, 1.0)


@pytest.mark.parametrize("make", [
    lambda: bump(2.0, 0.7, -1.3),
    lambda: windowed_poly([1.0, -0.5, 2.0], 0.5, 3.0, 0.8),
    lambda: random_profile(11),
])
def test_derivatives_match_finite_differences(make):
    g = make()
    lo, hi = g.support.lo, g.support.hi
    pad = 0.05 * (hi - lo)
    r = np.linspace(lo + pad, hi - pad, 100)
    scale = np.max(np.abs(g.value(r)))
    d1 = g.deriv1(r)
    d2 = g.deriv2(r)
    fd1 = central_diff(g.value, r)
    fd2 = central_diff2(g.value, r)
    assert np.max(np.abs(d1 - fd1)) <= 1e-7 * max(np.max(np.abs(d1)), scale)
    assert np.max(np.abs(d2 - fd2)) <= 1e-6 * max(np.max(np.abs(d2)), scale)


def test_endpoint_vanishing_all_families():
    profiles = [bump(2.0, 0.7, 1.0),
                windowed_poly([0.0, 1.0], 0.5, 3.0, 0.6),
                random_profile(3)]
    for g in profiles:
        interior = np.linspace(g.support.lo, g.support.hi, 64)[1:-1]
        scale = np.max(np.abs(g.value(interior)))
        for r in (g.support.lo, g.support.hi):
            assert abs(g.value(r)) < 1e-12 * scale
            assert abs(g.deriv1(r)) < 1e-12 * scale
            assert abs(g.deriv2(r)) < 1e-12 * scale


def test_windowed_poly_plateau_is_exact():
    g = windowed_poly([0.0, 0.0, 1.0], 0.5, 3.0, 0.5)
    r = np.linspace(1.05, 2.45, 33)
    assert np.array_equal(g.value(r), r**2)
    assert np.array_equal(g.deriv1(r), 2 * r)
    assert np.array_equal(g.deriv2(r), np.full_like(r, 2.0))


def test_windowed_poly_validation():
    with pytest.raises(InputError):
        windowed_poly([1.0], 1e-4, 2.0, 0.1)      # below support floor
    with pytest.raises(InputError):
        windowed_poly([1.0], 0.5, 2.0, 2.0)       # ramp too wide
    with pytest.raises(InputError):
        windowed_poly([], 0.5, 2.0, 0.1)


def test_random_profile_deterministic():
    a = random_profile(42)
    b = random_profile(42)
    assert a.to_json() == b.to_json()
    c = random_profile(43)
    assert a.to_json() != c.to_json()


def test_random_profile_support_is_hull():
    g = random_profile(7, n_components=3)
    los = [p.support.lo for p in g.components]
    his = [p.support.hi for p in g.components]
    assert g.support.lo == min(los)
    assert g.support.hi == max(his)


def test_random_profile_range_validation():
    with pytest.raises(InputError):
        random_profile(0, center_range=(3.0, 1.0))
    with pytest.raises(InputError):
        random_profile(0, center_range=(0.5, 1.0), width_range=(0.6, 0.9))
    with pytest.raises(InputError):
        random_profile(0, center_range=(999.0, 1000.0), width_range=(0.5, 2.0))
    with pytest.raises(InputError):
        random_profile(0, n_components=0)


def test_combination_derivative_linearity():
    g = random_profile(19, n_components=3)
    rng = np.random.Generator(np.random.Philox(key=99))
    r = rng.uniform(g.support.lo, g.support.hi, 100)
    direct = g.deriv1(r)
    summed = sum(c * comp.deriv1(r) for c, comp in zip(g.coefficients, g.components))
    assert np.max(np.abs(direct - summed)) <= 1e-13 * max(1.0, np.max(np.abs(direct)))


def test_star_profile():
    g = bump(2.0, 1.0, 1.0)
    r = np.linspace(1.2, 2.8, 17)
    # n = 4: the weight coefficient vanishes
    assert np.array_equal(star(g, 4).value(r), g.deriv1(r))
    # n = 6 at the peak: derivative vanishes, value is e^{-1}/2
    assert star(g, 6).value(2.0) == pytest.approx(math.exp(-1.0) / 2.0, rel=1e-14)
    # n = 2: g' - g/r
    assert np.allclose(star(g, 2).value(r), g.deriv1(r) - g.value(r) / r,
                       rtol=0, atol=1e-15)
    with pytest.raises(InputError):
        star(g, 1)


@pytest.mark.parametrize("make", [
    lambda: bump(1.7, 0.5, -0.8),
    lambda: windowed_poly([0.2, -1.0, 0.3], 0.4, 2.5, 0.7),
    lambda: random_profile(5, n_components=2),
])
def test_json_round_trip_bit_exact(make):
    g = make()
    doc = json.loads(g.to_json())
    assert set(doc) == {"family", "parameters", "support"}
    h = profile_from_json(g.to_json())
    assert h.to_json() == g.to_json()
    r = np.linspace(g.support.lo, g.support.hi, 37)
    assert np.array_equal(g.value(r), h.value(r))


def test_profile_from_dict_rejects_unknown_family():
    with pytest.raises(InputError):
        profile_from_dict({"family": "mystery", "parameters": {}, "support": [1, 2]})


def test_linear_combination_validation():
    g = bump(2.0, 0.5, 1.0)
    with pytest.raises(InputError):
        linear_combination([])
    with pytest.raises(InputError):
        linear_combination([g], [1.0, 2.0])


def test_sampled_profile_matches_analytic():
    g = bump(2.0, 0.9, 1.0)
    radii = np.linspace(g.support.lo, g.support.hi, 600)
    s = SampledProfile(radii, g.value(radii))
    r = np.linspace(1.4, 2.6, 25)
    scale = np.max(np.abs(g.value(r)))
    assert np.max(np.abs(s.value(r) - g.value(r))) < 1e-9 * scale
    assert np.max(np.abs(s.deriv1(r) - g.deriv1(r))) < 1e-6 * np.max(np.abs(g.deriv1(r)))
    assert np.max(np.abs(s.deriv2(r) - g.deriv2(r))) < 1e-4 * np.max(np.abs(g.deriv2(r)))


def test_sampled_profile_validation():
    with pytest.raises(InputError):
        SampledProfile([1.0, 2.0], [0.0, 0.0])
    radii = np.linspace(1.0, 2.0, 50)
    with pytest.raises(InputError):
        SampledProfile(radii[::-1], np.zeros(50))
