"""Differential operators reduced to the half line.

For f(x) = g(|x|) Y_l(x/|x|) with a unit spherical harmonic of degree l,
the Laplacian acts mode-wise as g'' + (n-1)g'/r - lambda g/r^2 with
lambda = l(l+n-2).  Operators here return lazily evaluable callables so
quadrature resolution stays a caller decision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .profiles import RadialProfile


def rellich_constant(n: int) -> float:
    """n(n-4)/4; zero exactly at n = 4, negative for n = 2, 3."""
    if n < 2:
        raise InputError(f"dimension must be >= 2, got {n}")
    return n * (n - 4) / 4.0


def mode_eigenvalue(n: int, ell: int) -> float:
    """l(l+n-2), the sphere eigenvalue of the degree-l mode."""
    if n < 2:
        raise InputError(f"dimension must be >= 2, got {n}")
    if ell < 0:
        raise InputError(f"degree must be >= 0, got {ell}")
    return float(ell * (ell + n - 2))


@dataclass(frozen=True)
class ModeContext:
    """Dimension and spherical-harmonic degree with derived constants."""

    n: int
    ell: int
    lam: float = field(init=False)
    rellich: float = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InputError(f"dimension must be an integer >= 2, got {self.n}")
        if int(self.ell) != self.ell or self.ell < 0:
            raise InputError(f"degree must be an integer >= 0, got {self.ell}")
        object.__setattr__(self, "lam", mode_eigenvalue(self.n, self.ell))
        object.__setattr__(self, "rellich", rellich_constant(self.n))


def radial_laplacian(g: RadialProfile, n: int):
    """r -> g''(r) + (n-1) g'(r)/r, from analytic derivatives."""
    if n < 2:
        raise InputError(f"dimension must be >= 2, got {n}")
    coeff = float(n - 1)

    def apply(r):
        r = np.asarray(r, dtype=float)
        return g.deriv2(r) + coeff * g.deriv1(r) / r

    return apply


def shifted_radial_laplacian(g: RadialProfile, n: int):
    """r -> g''(r) + (n-3) g'(r)/r, the radial Laplacian of dimension n-2.

    Requires n >= 4 so that the shift lands on a dimension >= 2.
    """
    if n < 4:
        raise InputError(f"dimension shift needs n >= 4, got {n}")
    coeff = float(n - 3)

    def apply(r):
        r = np.asarray(r, dtype=float)
        return g.deriv2(r) + coeff * g.deriv1(r) / r

    return apply


def mode_laplacian(g: RadialProfile, ctx: ModeContext):
    """r -> g'' + (n-1)g'/r - lambda g/r^2 for the mode (n, l).

    For l = 0 this is exactly the radial Laplacian (same evaluation path,
    identical floats at every node).
    """
    rad = radial_laplacian(g, ctx.n)
    lam = ctx.lam
    if lam == 0.0:
        return rad

    def apply(r):
        r = np.asarray(r, dtype=float)
        return rad(r) - lam * g.value(r) / r**2

    return apply
