"""Analytic test-function families on the half line.

All families carry closed-form value, first and second derivative, so the
verification integrals contain quadrature error only, never numerical
differentiation error.  Supports are bounded away from the origin
(lo >= 1e-3) and every family vanishes at its support endpoints together
with its first and second derivatives.

Families
--------
bump
    amplitude * exp(-1/(1-u^2)), u = (r-center)/width; all derivatives
    vanish at the endpoints.
windowed_poly
    polynomial times a smooth plateau window that is exactly 1 on the
    interior plateau and exactly 0 outside the support.
linear_combination
    weighted sum of other profiles; support is the hull.

A sampled-data profile (values on nodes, derivatives by local polynomial
fitting) is also provided; it is meant for grid-sampled workflows around
the n-dimensional oracle and never enters the core verification path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .quadrature import Interval

SUPPORT_FLOOR = 1e-3
SUPPORT_CEIL = 1e3


def _bump_kernel(u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """phi(u) = exp(-1/(1-u^2)) and its first two u-derivatives, 0 for |u| >= 1."""
    u = np.asarray(u, dtype=float)
    v = np.zeros_like(u)
    d1 = np.zeros_like(u)
    d2 = np.zeros_like(u)
    # exp(-1/q) underflows to an exact 0.0 long before q reaches 1e-12, so
    # masking there loses nothing and keeps 1/q bounded.
    m = u * u < 1.0 - 1e-12
    um = u[m]
    q = 1.0 - um * um
    phi = np.exp(-1.0 / q)
    v[m] = phi
    d1[m] = -2.0 * um / q**2 * phi
    d2[m] = (4.0 * um * um / q**4 - 2.0 / q**2 - 8.0 * um * um / q**3) * phi
    return v, d1, d2


def _step_kernel(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Smooth step s(x) = h(x)/(h(x)+h(1-x)) with h(x) = exp(-1/x) for x > 0.

    Exactly 0 for x <= 0 and exactly 1 for x >= 1; returns (s, s', s'').
    """
    x = np.asarray(x, dtype=float)
    s = np.zeros_like(x)
    d1 = np.zeros_like(x)
    d2 = np.zeros_like(x)
    s[x >= 1.0] = 1.0
    m = (x > 0.0) & (x < 1.0)
    xm = x[m]
    ym = 1.0 - xm

    def h012(t):
        ht = np.exp(-1.0 / t)
        return ht, ht / t**2, ht * (1.0 - 2.0 * t) / t**4

    H, H1, H2 = h012(xm)
    G, G1r, G2r = h012(ym)          # derivatives of h evaluated at 1-x
    G1 = -G1r                       # d/dx h(1-x)
    G2 = G2r                        # d^2/dx^2 h(1-x)
    D = H + G
    D1 = H1 + G1
    D2 = H2 + G2
    s[m] = H / D
    d1[m] = (H1 * D - H * D1) / D**2
    d2[m] = H2 / D - 2.0 * H1 * D1 / D**2 - H * D2 / D**2 + 2.0 * H * D1**2 / D**3
    return s, d1, d2


class RadialProfile:
    """Base class: value/deriv1/deriv2 evaluable on arrays, compact support."""

    family: str
    support: Interval

    def value(self, r):
        raise NotImplementedError

    def deriv1(self, r):
        raise NotImplementedError

    def deriv2(self, r):
        raise NotImplementedError

    def __call__(self, r):
        return self.value(r)

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class BumpProfile(RadialProfile):
    """amplitude * exp(-1/(1-u^2)) with u = (r-center)/width."""

    family = "bump"

    def __init__(self, center: float, width: float, amplitude: float = 1.0):
        if not width > 0:
            raise InputError(f"bump width must be positive, got {width}")
        if center - width < SUPPORT_FLOOR:
            raise InputError(
                f"bump support ({center - width}, {center + width}) touches the origin "
                f"(floor {SUPPORT_FLOOR})")
        self.center = float(center)
        self.width = float(width)
        self.amplitude = float(amplitude)
        self.support = Interval(center - width, center + width)

    def _u(self, r):
        return (np.asarray(r, dtype=float) - self.center) / self.width

    def value(self, r):
        v, _, _ = _bump_kernel(self._u(r))
        return self.amplitude * v

    def deriv1(self, r):
        _, d1, _ = _bump_kernel(self._u(r))
        return self.amplitude * d1 / self.width

    def deriv2(self, r):
        _, _, d2 = _bump_kernel(self._u(r))
        return self.amplitude * d2 / self.width**2

    def to_dict(self):
        return {"family": self.family,
                "parameters": {"center": self.center, "width": self.width,
                               "amplitude": self.amplitude},
                "support": [self.support.lo, self.support.hi]}


class WindowedPolyProfile(RadialProfile):
    """Polynomial times a smooth plateau window.

    The window rises from exactly 0 at `lo` to exactly 1 on
    [lo + ramp, hi - ramp] and back to 0 at `hi`; on the plateau the
    profile equals the bare polynomial, which makes interior polynomial
    identities exact.
    """

    family = "windowed_poly"

    def __init__(self, coefficients, lo: float, hi: float, ramp: float):
        if lo < SUPPORT_FLOOR:
            raise InputError(f"support lo {lo} below floor {SUPPORT_FLOOR}")
        if not (0 < ramp <= (hi - lo) / 2):
            raise InputError(f"ramp {ramp} must lie in (0, (hi-lo)/2]")
        self.coefficients = [float(c) for c in coefficients]
        if not self.coefficients:
            raise InputError("empty coefficient list")
        self.ramp = float(ramp)
        self.support = Interval(lo, hi)

    @property
    def plateau(self) -> Interval:
        return Interval(self.support.lo + self.ramp, self.support.hi - self.ramp)

    def _window(self, r):
        r = np.asarray(r, dtype=float)
        tau = self.ramp
        sl, sl1, sl2 = _step_kernel((r - self.support.lo) / tau)
        sr, sr1, sr2 = _step_kernel((self.support.hi - r) / tau)
        sl1, sl2 = sl1 / tau, sl2 / tau**2
        sr1, sr2 = -sr1 / tau, sr2 / tau**2
        w = sl * sr
        w1 = sl1 * sr + sl * sr1
        w2 = sl2 * sr + 2.0 * sl1 * sr1 + sl * sr2
        return w, w1, w2

    def _poly(self, r):
        c = np.asarray(self.coefficients)
        p = np.polynomial.polynomial.polyval(r, c)
        p1 = np.polynomial.polynomial.polyval(r, np.polynomial.polynomial.polyder(c))
        p2 = np.polynomial.polynomial.polyval(r, np.polynomial.polynomial.polyder(c, 2))
        return p, p1, p2

    def value(self, r):
        r = np.asarray(r, dtype=float)
        w, _, _ = self._window(r)
        p, _, _ = self._poly(r)
        return p * w

    def deriv1(self, r):
        r = np.asarray(r, dtype=float)
        w, w1, _ = self._window(r)
        p, p1, _ = self._poly(r)
        return p1 * w + p * w1

    def deriv2(self, r):
        r = np.asarray(r, dtype=float)
        w, w1, w2 = self._window(r)
        p, p1, p2 = self._poly(r)
        return p2 * w + 2.0 * p1 * w1 + p * w2

    def to_dict(self):
        return {"family": self.family,
                "parameters": {"coefficients": list(self.coefficients),
                               "ramp": self.ramp},
                "support": [self.support.lo, self.support.hi]}


class CombinationProfile(RadialProfile):
    """Linear combination of profiles; support is the hull of the parts."""

    family = "linear_combination"

    def __init__(self, components, coefficients=None):
        components = list(components)
        if not components:
            raise InputError("linear combination needs at least one component")
        if coefficients is None:
            coefficients = [1.0] * len(components)
        coefficients = [float(c) for c in coefficients]
        if len(coefficients) != len(components):
            raise InputError(
                f"{len(components)} components but {len(coefficients)} coefficients")
        self.components = components
        self.coefficients = coefficients
        support = components[0].support
        for comp in components[1:]:
            support = support.hull(comp.support)
        self.support = support

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return sum(c * g.value(r) for c, g in zip(self.coefficients, self.components))

    def deriv1(self, r):
        r = np.asarray(r, dtype=float)
        return sum(c * g.deriv1(r) for c, g in zip(self.coefficients, self.components))

    def deriv2(self, r):
        r = np.asarray(r, dtype=float)
        return sum(c * g.deriv2(r) for c, g in zip(self.coefficients, self.components))

    def to_dict(self):
        return {"family": self.family,
                "parameters": {"coefficients": list(self.coefficients),
                               "components": [g.to_dict() for g in self.components]},
                "support": [self.support.lo, self.support.hi]}


@dataclass(frozen=True)
class StarProfile:
    """g'(r) + ((n-4)/2) g(r)/r for a base profile g and dimension n."""

    base: RadialProfile
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InputError(f"dimension must be >= 2, got {self.n}")

    @property
    def support(self) -> Interval:
        return self.base.support

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self.base.deriv1(r) + 0.5 * (self.n - 4) * self.base.value(r) / r

    def __call__(self, r):
        return self.value(r)


class SampledProfile(RadialProfile):
    """Profile defined by samples on nodes, differentiated by local
    least-squares polynomial fits (sliding window).

    Intended for grid-sampled data around the n-D oracle; not used by the
    core verification path.
    """

    family = "sampled"

    def __init__(self, radii, values, window: int = 7, degree: int = 4):
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        if radii.ndim != 1 or radii.size < window:
            raise InputError(f"need at least {window} samples")
        if radii[0] < SUPPORT_FLOOR:
            raise InputError(f"sample radii must start at >= {SUPPORT_FLOOR}")
        if np.any(np.diff(radii) <= 0):
            raise InputError("sample radii must be strictly increasing")
        if not (2 <= degree < window):
            raise InputError(f"degree {degree} must satisfy 2 <= degree < window")
        self.radii = radii
        self.values = values
        self.window = int(window)
        self.degree = int(degree)
        self.support = Interval(radii[0], radii[-1])

    def _fit_at(self, r: float) -> np.ndarray:
        k = int(np.searchsorted(self.radii, r))
        half = self.window // 2
        a = min(max(k - half, 0), self.radii.size - self.window)
        sl = slice(a, a + self.window)
        x = self.radii[sl] - r
        coeffs = np.polynomial.polynomial.polyfit(x, self.values[sl], self.degree)
        return coeffs

    def _eval(self, r, order: int):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        fact = [1.0, 1.0, 2.0]
        for i, ri in enumerate(r):
            c = self._fit_at(ri)
            out[i] = c[order] * fact[order] if order < len(c) else 0.0
        return out if out.size > 1 else out[0]

    def value(self, r):
        return self._eval(r, 0)

    def deriv1(self, r):
        return self._eval(r, 1)

    def deriv2(self, r):
        return self._eval(r, 2)

    def to_dict(self):
        return {"family": self.family,
                "parameters": {"radii": self.radii.tolist(),
                               "values": self.values.tolist(),
                               "window": self.window, "degree": self.degree},
                "support": [self.support.lo, self.support.hi]}


def bump(center: float, width: float, amplitude: float = 1.0) -> BumpProfile:
    """Compactly supported bump, see BumpProfile."""
    return BumpProfile(center, width, amplitude)


def windowed_poly(coefficients, lo: float, hi: float, ramp: float) -> WindowedPolyProfile:
    """Polynomial (ascending coefficients) times a plateau window on (lo, hi)."""
    return WindowedPolyProfile(coefficients, lo, hi, ramp)


def linear_combination(components, coefficients=None) -> CombinationProfile:
    return CombinationProfile(components, coefficients)


def star(g: RadialProfile, n: int) -> StarProfile:
    """g' + ((n-4)/2) g/r, the derivative shifted by the critical weight."""
    return StarProfile(g, n)


DEFAULT_CENTER_RANGE = (1.0, 3.0)
DEFAULT_WIDTH_RANGE = (0.25, 0.9)
DEFAULT_AMPLITUDE_RANGE = (0.5, 2.0)


def random_profile(seed: int, n_components: int = 3,
                   center_range=DEFAULT_CENTER_RANGE,
                   width_range=DEFAULT_WIDTH_RANGE,
                   amplitude_range=DEFAULT_AMPLITUDE_RANGE) -> CombinationProfile:
    """Deterministic random linear combination of bumps.

    Streams come from the counter-based 64-bit Philox generator keyed by
    `seed`, so parameter lists are reproducible across runs and platforms.
    Per component the draws are center, width, amplitude, in that order,
    each uniform over its range.
    """
    if n_components < 1:
        raise InputError(f"n_components must be >= 1, got {n_components}")
    for name, rng_pair in (("center", center_range), ("width", width_range),
                           ("amplitude", amplitude_range)):
        lo, hi = rng_pair
        if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
            raise InputError(f"empty or invalid {name} range {rng_pair}")
    if width_range[1] <= 0:
        raise InputError(f"width range {width_range} must be positive")
    if center_range[0] - width_range[1] < SUPPORT_FLOOR:
        raise InputError(
            f"ranges allow support below the floor: {center_range[0]} - {width_range[1]}"
            f" < {SUPPORT_FLOOR}")
    if center_range[1] + width_range[1] > SUPPORT_CEIL:
        raise InputError(
            f"ranges allow support above the ceiling: {center_range[1]} + {width_range[1]}"
            f" > {SUPPORT_CEIL}")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    parts = []
    for _ in range(n_components):
        c = rng.uniform(*center_range)
        w = rng.uniform(*width_range)
        a = rng.uniform(*amplitude_range)
        parts.append(BumpProfile(c, w, a))
    return CombinationProfile(parts)


def profile_from_dict(doc: dict) -> RadialProfile:
    """Rebuild a profile from its to_dict() document; parameter round-trip
    is bit-exact (JSON carries shortest-round-trip float literals)."""
    family = doc.get("family")
    params = doc.get("parameters", {})
    lo, hi = doc.get("support", (None, None))
    if family == "bump":
        g = BumpProfile(params["center"], params["width"], params["amplitude"])
    elif family == "windowed_poly":
        g = WindowedPolyProfile(params["coefficients"], lo, hi, params["ramp"])
    elif family == "linear_combination":
        comps = [profile_from_dict(d) for d in params["components"]]
        g = CombinationProfile(comps, params["coefficients"])
    elif family == "sampled":
        g = SampledProfile(params["radii"], params["values"],
                           params["window"], params["degree"])
    else:
        raise InputError(f"unknown profile family {family!r}")
    if lo is not None and (g.support.lo != lo or g.support.hi != hi):
        raise InputError(
            f"support mismatch: document says ({lo}, {hi}), "
            f"rebuilt ({g.support.lo}, {g.support.hi})")
    return g


def profile_from_json(text: str) -> RadialProfile:
    return profile_from_dict(json.loads(text))
