"""Zonal spherical harmonics via the ultraspherical recurrence.

The degree-l zonal harmonic on the (n-1)-sphere is a polynomial Z_l in
t = x_n/|x|, normalized here so Z_l(1) = 1.  With that normalization the
three-term recurrence is

    Z_0 = 1,  Z_1 = t,
    Z_l = ((2l + n - 4) t Z_{l-1} - (l - 1) Z_{l-2}) / (l + n - 3),

which specializes to Legendre (n = 3) and Chebyshev (n = 2) and stays
non-degenerate for all n >= 2.  The residual of the ultraspherical ODE
certifies the eigenvalue l(l+n-2) independently of any tabulated value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .quadrature import Interval, make_rule

MAX_DEGREE = 64

_P = np.polynomial.polynomial


@dataclass(frozen=True)
class ZonalPolynomial:
    """Zonal harmonic of degree ell on the (n-1)-sphere, Z(1) = 1."""

    n: int
    ell: int
    coeffs: np.ndarray          # ascending monomial coefficients in t

    def value(self, t):
        return _P.polyval(np.asarray(t, dtype=float), self.coeffs)

    def deriv1(self, t):
        return _P.polyval(np.asarray(t, dtype=float), _P.polyder(self.coeffs))

    def deriv2(self, t):
        return _P.polyval(np.asarray(t, dtype=float), _P.polyder(self.coeffs, 2))

    def __call__(self, t):
        return self.value(t)


def zonal(n: int, ell: int) -> ZonalPolynomial:
    """Construct the zonal harmonic by the three-term recurrence."""
    if n < 2:
        raise InputError(f"dimension must be >= 2, got {n}")
    if ell < 0:
        raise InputError(f"degree must be >= 0, got {ell}")
    if ell > MAX_DEGREE:
        raise InputError(f"degree {ell} beyond guard {MAX_DEGREE}")
    prev = np.array([1.0])
    if ell == 0:
        return ZonalPolynomial(n, 0, prev)
    cur = np.array([0.0, 1.0])
    for k in range(2, ell + 1):
        shifted = np.concatenate([[0.0], cur])                 # t * Z_{k-1}
        nxt = ((2 * k + n - 4) * shifted
               - (k - 1) * np.concatenate([prev, [0.0, 0.0]])) / (k + n - 3)
        prev, cur = cur, nxt
    return ZonalPolynomial(n, ell, cur)


def zonal_ode_residual(z: ZonalPolynomial) -> float:
    """Max residual of (1-t^2) z'' - (n-1) t z' + l(l+n-2) z over 1000
    uniform interior points, scaled by max |z|."""
    t = np.linspace(-1.0, 1.0, 1002)[1:-1]
    lam = z.ell * (z.ell + z.n - 2)
    res = (1.0 - t * t) * z.deriv2(t) - (z.n - 1) * t * z.deriv1(t) + lam * z.value(t)
    return float(np.max(np.abs(res)) / np.max(np.abs(z.value(t))))


def sphere_area(m: int) -> float:
    """Surface area of the unit sphere S^m in R^{m+1}."""
    if m < 0:
        raise InputError(f"sphere dimension must be >= 0, got {m}")
    return 2.0 * math.pi ** ((m + 1) / 2.0) / math.gamma((m + 1) / 2.0)


def _half_interval_pieces(levels: int):
    """Dyadic subdivision of [0, 1] graded toward 1, as (lo, hi) pairs."""
    edges = [0.0] + [1.0 - 0.5**k for k in range(1, levels + 1)]
    return list(zip(edges[:-1], edges[1:]))


def weighted_pair_integral(z1: ZonalPolynomial, z2: ZonalPolynomial,
                           nodes_per_piece: int = 24, levels: int = 46) -> float:
    """Integral of z1(t) z2(t) (1-t^2)^((n-3)/2) over (-1, 1), for n >= 3.

    Uses the quadrature module mapped to (-1, 1); pieces are dyadically
    graded toward +-1 so the half-integer weight powers are resolved to
    near machine precision.  The last sliver of width 2^-levels next to
    each endpoint is dropped; its contribution is below 1e-13 of the total
    for every weight power >= 0, which is why n = 2 (inverse square root
    weight) is not supported here.
    """
    if z1.n != z2.n:
        raise InputError(f"mixed dimensions {z1.n} != {z2.n}")
    if z1.n < 3:
        raise InputError("weight integral needs n >= 3 (n = 2 weight is singular)")
    beta = (z1.n - 3) / 2.0
    total = 0.0
    for lo, hi in _half_interval_pieces(levels):
        rule = make_rule(Interval(lo + 2.0, hi + 2.0), panels=1,
                         nodes_per_panel=nodes_per_piece)
        t = rule.nodes - 2.0
        w = (1.0 - t * t) ** beta
        # right half at +t, left half at -t (weight is even)
        total += float(np.sum(rule.weights * z1.value(t) * z2.value(t) * w))
        total += float(np.sum(rule.weights * z1.value(-t) * z2.value(-t) * w))
    return total


def zonal_sphere_norm_sq(z: ZonalPolynomial) -> float:
    """Squared L^2 norm of the zonal harmonic over the unit (n-1)-sphere."""
    return sphere_area(z.n - 2) * weighted_pair_integral(z, z)
