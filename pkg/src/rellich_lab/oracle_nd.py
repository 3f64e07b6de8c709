"""Independent n-dimensional finite-difference oracle (n = 3, 4).

Mode functions f(x) = g(|x|) z(x_n/|x|) are sampled on a uniform tensor
grid and all operators are built literally: the (2n+1)-point Laplacian,
the radial derivative (x/|x|) . grad, and the tangential derivatives
L_j = d_j - (x_j/|x|) d_r, each by second-order central differences.
Grid inner products are plain Riemann sums (consistent at the stencil
order).  This module is the arbiter for the half-line reduction formulas:
it never uses them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError
from .harmonics import ZonalPolynomial, zonal, zonal_sphere_norm_sq
from .profiles import RadialProfile
from .quadrature import make_rule
from .radial_ops import ModeContext
from .verify import identity_report

MAX_POINTS = {3: 256, 4: 64}
STENCIL_MARGIN = 2  # nodes: two first-derivative sweeps back to back


@dataclass
class TensorField:
    """Scalar field on a cube [-extent, extent]^n, uniform spacing."""

    n: int
    extent: float
    points: int
    values: np.ndarray

    def __post_init__(self):
        if self.n not in MAX_POINTS:
            raise InputError(f"grid oracle supports n in {{3, 4}}, got {self.n}")
        if not 9 <= self.points <= MAX_POINTS[self.n]:
            raise InputError(
                f"points per axis must be in [9, {MAX_POINTS[self.n]}] for n={self.n}")
        if self.values.shape != (self.points,) * self.n:
            raise InputError(
                f"values shape {self.values.shape} != {(self.points,) * self.n}")

    @property
    def h(self) -> float:
        return 2.0 * self.extent / (self.points - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.points)

    def like(self, values: np.ndarray) -> "TensorField":
        return TensorField(self.n, self.extent, self.points, values)


def _axis_component(field: TensorField, j: int) -> np.ndarray:
    """Coordinate x_j broadcast to the grid shape (lazy 1-D view)."""
    shape = [1] * field.n
    shape[j] = field.points
    return field.axis.reshape(shape)


def _radius(field: TensorField) -> np.ndarray:
    r2 = np.zeros((field.points,) * field.n)
    for j in range(field.n):
        r2 = r2 + _axis_component(field, j) ** 2
    return np.sqrt(r2)


def _inv_radius(field: TensorField, r: np.ndarray | None = None) -> np.ndarray:
    r = _radius(field) if r is None else r
    with np.errstate(divide="ignore"):
        inv = np.where(r > 0.0, 1.0 / np.maximum(r, 1e-300), 0.0)
    return inv


def origin_mask(field: TensorField, widths: float = 2.0) -> np.ndarray:
    """Nodes within `widths` grid spacings of the origin; excluded from
    node-wise comparisons because x/|x| is ill-conditioned there."""
    return _radius(field) <= widths * field.h


def sample_mode_function(g: RadialProfile, z: ZonalPolynomial,
                         extent: float, points: int) -> TensorField:
    """Sample f(x) = g(|x|) z(x_n/|x|); 0 at the origin node."""
    if g.support.hi > extent - STENCIL_MARGIN * 2.0 * extent / (points - 1):
        raise InputError(
            f"profile support (.., {g.support.hi}) plus stencil margin overflows "
            f"the cube of half-extent {extent} at {points} points")
    field = TensorField(z.n, float(extent), int(points),
                        np.zeros((points,) * z.n))
    r = _radius(field)
    inv_r = _inv_radius(field, r)
    t = _axis_component(field, z.n - 1) * inv_r
    field.values = g.value(r) * z.value(t)
    field.values[r == 0.0] = 0.0
    return field


def fd_partial(field: TensorField, j: int) -> np.ndarray:
    """Central-difference d/dx_j; boundary layer left zero (fields vanish
    there by the support precondition)."""
    v = field.values
    out = np.zeros_like(v)
    lo = [slice(None)] * field.n
    hi = [slice(None)] * field.n
    mid = [slice(None)] * field.n
    lo[j] = slice(0, -2)
    hi[j] = slice(2, None)
    mid[j] = slice(1, -1)
    out[tuple(mid)] = (v[tuple(hi)] - v[tuple(lo)]) / (2.0 * field.h)
    return out


def fd_laplacian(field: TensorField) -> TensorField:
    """Standard (2n+1)-point Laplacian."""
    v = field.values
    out = np.zeros_like(v)
    for j in range(field.n):
        lo = [slice(1, -1)] * field.n
        hi = [slice(1, -1)] * field.n
        mid = [slice(1, -1)] * field.n
        lo[j] = slice(0, -2)
        hi[j] = slice(2, None)
        out[tuple(mid)] += v[tuple(hi)] + v[tuple(lo)] - 2.0 * v[tuple(mid)]
    out /= field.h**2
    return field.like(out)


def fd_radial_derivative(field: TensorField,
                         inv_r: np.ndarray | None = None) -> TensorField:
    """(x/|x|) . grad f by central differences."""
    inv_r = _inv_radius(field) if inv_r is None else inv_r
    out = np.zeros_like(field.values)
    for j in range(field.n):
        out += (_axis_component(field, j) * inv_r) * fd_partial(field, j)
    return field.like(out)


def fd_angular_derivative(field: TensorField, j: int,
                          inv_r: np.ndarray | None = None) -> TensorField:
    """L_j f = d_j f - (x_j/|x|) d_r f."""
    if not 0 <= j < field.n:
        raise InputError(f"axis {j} out of range for n={field.n}")
    inv_r = _inv_radius(field) if inv_r is None else inv_r
    dr = fd_radial_derivative(field, inv_r).values
    out = fd_partial(field, j) - (_axis_component(field, j) * inv_r) * dr
    return field.like(out)


def fd_spherical_laplacian(field: TensorField,
                           inv_r: np.ndarray | None = None) -> TensorField:
    """sum_j L_j(L_j f), two back-to-back first-derivative sweeps."""
    inv_r = _inv_radius(field) if inv_r is None else inv_r
    dr = fd_radial_derivative(field, inv_r).values
    acc = np.zeros_like(field.values)
    for j in range(field.n):
        lj = field.like(fd_partial(field, j) - (_axis_component(field, j) * inv_r) * dr)
        dr2 = fd_radial_derivative(lj, inv_r).values
        acc += fd_partial(lj, j) - (_axis_component(field, j) * inv_r) * dr2
        del lj, dr2
    return field.like(acc)


@dataclass(frozen=True)
class ReductionReport:
    """Grid-vs-half-line comparison of the five identity terms."""

    n: int
    ell: int
    extent: float
    points: int
    h: float
    zonal_norm_sq: float
    terms_grid: dict            # normalized by the zonal sphere norm
    terms_oned: dict
    rel_dev: dict
    cross_grid: float
    max_rel_dev: float


_TERM_KEYS = ("lhs", "radial", "spherical", "hardy", "star")


def certify_reduction(g: RadialProfile, ctx: ModeContext, extent: float,
                      points: int, rule=None) -> ReductionReport:
    """Compute all five identity terms on the grid with the literal
    operators and compare with the half-line values.

    Grid terms are normalized by the zonal sphere norm (the half-line side
    assumes a unit harmonic, the grid uses z(1) = 1 normalization).
    """
    if ctx.n not in MAX_POINTS:
        raise InputError(f"grid oracle supports n in {{3, 4}}, got {ctx.n}")
    z = zonal(ctx.n, ctx.ell)
    field = sample_mode_function(g, z, extent, points)
    nz = zonal_sphere_norm_sq(z)
    vol = field.h ** ctx.n
    r = _radius(field)
    inv_r = _inv_radius(field, r)
    del r

    lap = fd_laplacian(field).values
    lhs_grid = float(np.sum(lap * lap)) * vol

    sph = fd_spherical_laplacian(field, inv_r).values
    sph_grid = float(np.sum(sph * sph)) * vol
    rad = lap - sph
    rad_grid = float(np.sum(rad * rad)) * vol
    cross_grid = float(np.sum(rad * sph)) * vol
    del lap, rad

    hardy_sum = 0.0
    dr = fd_radial_derivative(field, inv_r).values
    for j in range(field.n):
        lj = fd_partial(field, j) - (_axis_component(field, j) * inv_r) * dr
        hardy_sum += float(np.sum(lj * lj * inv_r * inv_r)) * vol
        del lj
    hardy_grid = 2.0 * ctx.rellich * hardy_sum

    fstar = field.like(dr + 0.5 * (ctx.n - 4) * field.values * inv_r)
    del dr
    sph_star = fd_spherical_laplacian(fstar, inv_r).values
    star_grid = 2.0 * float(np.sum(-sph_star * fstar.values)) * vol
    del sph_star, fstar, sph

    rep = identity_report(g, ctx, rule if rule is not None else make_rule(g.support))
    oned = {"lhs": rep.term_lhs, "radial": rep.term_radial,
            "spherical": rep.term_spherical, "hardy": rep.term_hardy,
            "star": rep.term_star}
    grid = {"lhs": lhs_grid / nz, "radial": rad_grid / nz,
            "spherical": sph_grid / nz, "hardy": hardy_grid / nz,
            "star": star_grid / nz}
    dev = {}
    for key in _TERM_KEYS:
        denom = max(abs(oned[key]), 1e-9 * rep.term_lhs)
        dev[key] = abs(grid[key] - oned[key]) / denom if denom > 0.0 else 0.0
    return ReductionReport(
        n=ctx.n, ell=ctx.ell, extent=float(extent), points=int(points),
        h=field.h, zonal_norm_sq=nz, terms_grid=grid, terms_oned=oned,
        rel_dev=dev, cross_grid=cross_grid / nz,
        max_rel_dev=max(dev.values()))


def dump_field(field: TensorField, base_path) -> tuple[Path, Path]:
    """Write `<base>.bin` (row-major little-endian float64) and a JSON
    sidecar `<base>.json` with {n, extent, points}."""
    base = Path(base_path)
    bin_path = base.with_suffix(".bin")
    json_path = base.with_suffix(".json")
    bin_path.write_bytes(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    json_path.write_text(json.dumps(
        {"n": field.n, "extent": field.extent, "points": field.points},
        sort_keys=True))
    return bin_path, json_path


def load_field(base_path) -> TensorField:
    base = Path(base_path)
    meta = json.loads(base.with_suffix(".json").read_text())
    raw = np.frombuffer(base.with_suffix(".bin").read_bytes(), dtype="<f8")
    shape = (meta["points"],) * meta["n"]
    return TensorField(meta["n"], meta["extent"], meta["points"],
                       raw.astype(float).reshape(shape))
