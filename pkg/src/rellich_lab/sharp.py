"""Sharp-constant estimation and angle searches.

Every constant is reached by two independent routes so neither is trusted
alone:

* ``symbol_constant`` minimizes the squared modulus of the multiplier the
  mode operator produces on the critical power functions r^((4-n)/2 + is),
  namely (n(n-4)/4 + lam + s^2)^2 + 4 s^2, by brute-force grid scan plus
  local refinement.
* ``eigen_constant`` discretizes the Rayleigh quotient of the quadratic
  form pencil on a log-uniform mesh with clamped ends and runs shifted
  inverse iteration on the banded pencil.

The angle and bound searches are multi-start derivative-free minimizations
over bump-combination parameters, deterministic for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.sparse

from .errors import InputError, NumericsError
from .profiles import BumpProfile, CombinationProfile, SUPPORT_CEIL, SUPPORT_FLOOR
from .quadrature import Interval, make_log_rule
from .radial_ops import ModeContext, mode_eigenvalue, rellich_constant

DEFAULT_EIGEN_GRID = (1e-4, 1e4, 4096)
MAX_INVERSE_ITERATIONS = 200
MAX_RESTARTS = 50


@dataclass(frozen=True)
class ConstantEstimate:
    """A sharp-constant or angle estimate with its search metadata."""

    value: float
    n: int
    ell: int | None
    method: str                      # "eigen" | "symbol" | "search"
    converged: bool
    iterations: int
    grid: tuple | None = None
    budget: int | None = None
    seed: int | None = None
    oracle_value: float | None = None
    argmin_profile: dict | None = field(default=None, compare=False)

    def to_record(self) -> dict:
        return {
            "value": self.value, "n": self.n, "ell": self.ell,
            "method": self.method, "converged": self.converged,
            "iterations": self.iterations,
            "grid": list(self.grid) if self.grid is not None else None,
            "budget": self.budget, "seed": self.seed,
            "oracle_value": self.oracle_value,
            "argmin_profile": self.argmin_profile,
        }


def symbol_modulus_sq(n: int, ell: int, s) -> np.ndarray:
    """(R_n + lam + s^2)^2 + 4 s^2 along the critical line."""
    c = rellich_constant(n) + mode_eigenvalue(n, ell)
    s = np.asarray(s, dtype=float)
    return (c + s * s) ** 2 + 4.0 * s * s


def symbol_constant(n: int, ell: int, s_max: float = 8.0,
                    s_points: int = 2001) -> ConstantEstimate:
    """Minimum of the squared symbol modulus over s in [0, s_max].

    Brute-force grid scan followed by a bounded local refinement around
    the best grid point; the grid scan is the oracle, the refinement only
    polishes it.  For R_n + lam >= -2 the minimum sits at s = 0 with value
    (R_n + lam)^2, recorded as oracle_value.
    """
    if s_points < 1000:
        raise InputError(f"s_points must be >= 1000, got {s_points}")
    if s_max <= 0:
        raise InputError(f"s_max must be positive, got {s_max}")
    s = np.linspace(0.0, s_max, s_points)
    values = symbol_modulus_sq(n, ell, s)
    k = int(np.argmin(values))
    best = float(values[k])
    lo = s[max(k - 1, 0)]
    hi = s[min(k + 1, s_points - 1)]
    res = scipy.optimize.minimize_scalar(
        lambda x: float(symbol_modulus_sq(n, ell, x)),
        bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-12})
    refined = float(res.fun)
    value = min(best, refined)
    c = rellich_constant(n) + mode_eigenvalue(n, ell)
    oracle = c * c if c >= -2.0 else None
    return ConstantEstimate(value=value, n=n, ell=ell, method="symbol",
                            converged=True, iterations=int(res.nfev),
                            grid=(0.0, s_max, s_points), oracle_value=oracle)


def _pencil_operator(n: int, ell: int, lo: float, hi: float, points: int):
    """Balanced clamped discretization of the mode-operator form.

    On the log mesh t_i the operator r^2 (g'' + (n-1)g'/r - lam g/r^2)
    becomes the constant-coefficient stencil for g_tt + (n-2) g_t - lam g,
    and both quadratic forms carry the same weight exp((n-4) t).
    Conjugating by exp((n-4)t/2) turns the pencil (L^T W L, W) into the
    standard symmetric problem K = Lb^T Lb with Lb tridiagonal Toeplitz;
    clamped ends drop two value nodes per side, keeping K positive
    definite (with free ends the pencil has a two-dimensional
    near-nullspace and collapses).
    """
    lam = mode_eigenvalue(n, ell)
    t = np.linspace(math.log(lo), math.log(hi), points)
    dt = t[1] - t[0]
    kappa = 0.5 * (n - 4)
    sub = (1.0 / dt**2 - (n - 2) / (2.0 * dt)) * math.exp(kappa * dt)
    diag = -2.0 / dt**2 - lam
    sup = (1.0 / dt**2 + (n - 2) / (2.0 * dt)) * math.exp(-kappa * dt)
    Lb = scipy.sparse.diags(
        [np.full(points - 1, sub), np.full(points, diag), np.full(points - 1, sup)],
        [-1, 0, 1], format="csr")
    Lb = Lb[1:-1, :][:, 2:points - 2]
    return (Lb.T @ Lb).tocsc(), Lb


def _banded_form(K, shift: float) -> np.ndarray:
    """K - shift*I in scipy solve_banded layout for bandwidths (2, 2)."""
    N = K.shape[0]
    ab = np.zeros((5, N))
    ab[0, 2:] = K.diagonal(2)
    ab[1, 1:] = K.diagonal(1)
    ab[2, :] = K.diagonal(0) - shift
    ab[3, :-1] = K.diagonal(-1)
    ab[4, :-2] = K.diagonal(-2)
    return ab


def eigen_constant(n: int, ell: int, grid: tuple = DEFAULT_EIGEN_GRID,
                   max_iterations: int = MAX_INVERSE_ITERATIONS,
                   tol: float = 1e-10) -> ConstantEstimate:
    """Smallest Rayleigh quotient of the clamped log-mesh pencil.

    Shifted inverse iteration: plain steps first (shift 0 biases toward the
    bottom of the spectrum), then Rayleigh-quotient shifts with banded LU
    refactorization each step.  Converged when successive eigenvalue
    estimates differ by less than `tol` relative.
    """
    lo, hi, points = grid
    if not (lo >= 1e-6 and hi <= 1e6 and lo < hi):
        raise InputError(f"grid domain ({lo}, {hi}) outside [1e-6, 1e6]")
    if points < 256:
        raise InputError(f"grid needs >= 256 points, got {points}")
    K, Lb = _pencil_operator(n, ell, lo, hi, int(points))
    N = K.shape[0]
    # deterministic start: broad Gaussian in the log variable
    idx = np.arange(N)
    x = np.exp(-(((idx - N / 2.0) / (N / 6.0)) ** 2))
    x /= np.linalg.norm(x)

    sigma = 0.0
    mu_prev = math.inf
    mu = math.inf
    converged = False
    iterations = 0
    for it in range(1, max_iterations + 1):
        iterations = it
        try:
            y = scipy.linalg.solve_banded((2, 2), _banded_form(K, sigma), x)
        except scipy.linalg.LinAlgError:
            sigma -= abs(sigma) * 1e-10 + 1e-30
            continue
        norm = np.linalg.norm(y)
        if not np.isfinite(norm) or norm == 0.0:
            sigma -= abs(sigma) * 1e-10 + 1e-30
            continue
        x = y / norm
        # Rayleigh quotient through the factor: ||Lb x||^2 avoids the
        # cancellation noise of x.(K x) with entries of size 1/dt^4.
        res = Lb @ x
        mu = float(res @ res)
        if it >= 4 and abs(mu - mu_prev) <= tol * max(abs(mu), 1e-300):
            converged = True
            break
        # Rayleigh shifts accelerate once the plain steps have isolated the
        # ground state; freeze the shift near convergence so the iteration
        # becomes a stationary map and the estimates can settle.
        if it >= 8 and abs(mu - mu_prev) > 1e-8 * abs(mu):
            sigma = mu
        mu_prev = mu

    oracle = symbol_constant(n, ell).value
    return ConstantEstimate(value=mu, n=n, ell=ell, method="eigen",
                            converged=converged, iterations=iterations,
                            grid=(float(lo), float(hi), int(points)),
                            oracle_value=oracle)


# ---------------------------------------------------------------------------
# derivative-free searches over bump combinations
# ---------------------------------------------------------------------------

# invalid-parameter penalties must dominate each objective's range: the
# cosine lives in [-1, 1], the spherical ratio in [(5/8)^2, inf)
_COSINE_PENALTY = 2.0
_RATIO_PENALTY = 1e9


def _profile_from_params(x: np.ndarray, n_components: int) -> CombinationProfile | None:
    parts = []
    for k in range(n_components):
        log_c, log_w, amp = x[3 * k:3 * k + 3]
        if not (np.isfinite(log_c) and np.isfinite(log_w) and np.isfinite(amp)):
            return None
        c = math.exp(log_c)
        w = math.exp(log_w)
        if not (c - w >= SUPPORT_FLOOR and c + w <= SUPPORT_CEIL and w > 0):
            return None
        parts.append(BumpProfile(c, w, amp))
    try:
        return CombinationProfile(parts)
    except InputError:
        return None


def _mode_terms(g: CombinationProfile, n: int, lam: float):
    """(radial, spherical, cross, lhs) terms on a log-panel rule over the hull."""
    decades = math.log10(g.support.hi / g.support.lo)
    panels = max(16, int(math.ceil(8 * decades)))
    rule = make_log_rule(g.support, panels=panels, nodes_per_panel=24)
    r = rule.nodes
    w = rule.weights
    gv = g.value(r)
    d1 = g.deriv1(r)
    d2 = g.deriv2(r)
    A = d2 + (n - 1) * d1 / r
    rad = float(np.sum(w * A * A * r ** (n - 1.0)))
    mass = float(np.sum(w * gv * gv * r ** (n - 5.0)))
    sph = lam * lam * mass
    cross = -lam * float(np.sum(w * A * gv * r ** (n - 3.0)))
    lhs = float(np.sum(w * (A - lam * gv / r**2) ** 2 * r ** (n - 1.0)))
    return rad, sph, cross, lhs


# (first center, center ratio, width/center) presets; widths close to the
# centers push supports over many decades, the regime where the n = 3
# cross term can turn negative
_GEOMETRY_PRESETS = ((0.55, 2.8, 0.998), (0.3, 2.2, 0.99),
                     (1.0, 3.2, 0.995), (0.12, 1.8, 0.97))


def _seeded_start(n: int, preset, n_components: int) -> np.ndarray | None:
    """Start vector on a geometric ladder of bumps, amplitudes chosen by the
    small generalized eigenproblem minimizing the closed-form cross numerator
    int |g'|^2 r^(n-3) + (n-4) int |g|^2 r^(n-5) against the mass
    int |g|^2 r^(n-5).  For n = 3 the minimum dips below zero exactly when
    the ladder can beat the critical Hardy quotient."""
    c0, rho, wf = preset
    try:
        bumps = [BumpProfile(c0 * rho**k, wf * c0 * rho**k, 1.0)
                 for k in range(n_components)]
    except InputError:
        return None
    lo = min(b.support.lo for b in bumps)
    hi = max(b.support.hi for b in bumps)
    if hi > SUPPORT_CEIL:
        return None
    decades = math.log10(hi / lo)
    rule = make_log_rule(Interval(lo, hi), panels=max(24, int(10 * decades)),
                         nodes_per_panel=24)
    r, w = rule.nodes, rule.weights
    D = np.array([b.deriv1(r) for b in bumps])
    V = np.array([b.value(r) for b in bumps])
    num = (D * (w * r ** (n - 3.0))) @ D.T + (n - 4) * (V * (w * r ** (n - 5.0))) @ V.T
    mass = (V * (w * r ** (n - 5.0))) @ V.T
    mass = mass + (1e-12 * np.trace(mass) / len(bumps)) * np.eye(len(bumps))
    _, vecs = scipy.linalg.eigh(num, mass)
    amps = vecs[:, 0]
    amps = amps / np.max(np.abs(amps))
    x = []
    for b, a in zip(bumps, amps):
        x.extend([math.log(b.center), math.log(b.width), float(a)])
    return np.array(x)


def near_extremal_profile(n: int, preset=_GEOMETRY_PRESETS[0],
                          n_components: int = 4) -> CombinationProfile:
    """The eigen-seeded ladder profile minimizing the cross-term quotient;
    at n = 3 it is a concrete witness that the cross term goes negative
    once the dimension hypothesis is dropped."""
    x = _seeded_start(n, preset, n_components)
    if x is None:
        raise InputError(f"preset {preset} is not realizable within the support bounds")
    g = _profile_from_params(x, n_components)
    if g is None:
        raise NumericsError(f"seeded start for n={n} produced an invalid profile")
    return g


def _run_search(objective, n: int, n_components: int, budget: int, seed: int):
    """Deterministic multi-start Nelder-Mead; returns (best_value, best_x,
    evaluations).  Ties resolve to the lowest start index."""
    bases = [s for p in _GEOMETRY_PRESETS
             if (s := _seeded_start(n, p, n_components)) is not None]
    n_starts = max(1, min(MAX_RESTARTS, len(bases), budget // 4000))
    per_start = max(200, budget // n_starts)
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    best_val = math.inf
    best_x = None
    used = 0
    start_idx = 0
    while used < budget and start_idx < MAX_RESTARTS:
        base = bases[start_idx % len(bases)]
        if start_idx >= len(bases):
            base = base * (1.0 + 0.15 * rng.standard_normal(base.size))
        remaining = budget - used
        if remaining < 200:
            break
        res = scipy.optimize.minimize(
            objective, base, method="Nelder-Mead",
            options={"maxfev": min(per_start, remaining), "xatol": 1e-8,
                     "fatol": 1e-13, "adaptive": True})
        used += int(res.nfev)
        if res.fun < best_val:
            best_val = float(res.fun)
            best_x = np.array(res.x)
        start_idx += 1
    return best_val, best_x, used


def angle_estimate(n: int, ell_set, budget: int = 10000, seed: int = 0,
                   n_components: int = 4) -> ConstantEstimate:
    """Minimize cos(theta) = cross / (|radial| |spherical|) over the bump
    family; the result is an upper bound on the true infimum.

    The cosine is independent of the degree in reduced form (the
    eigenvalue scales numerator and denominator alike), but the search is
    run per degree in `ell_set` and the overall best is returned.
    """
    ells = sorted(set(int(e) for e in ell_set))
    if not ells:
        raise InputError("ell_set must be non-empty")
    if any(e < 1 for e in ells):
        raise InputError("degenerate denominator: angle needs ell >= 1")
    if budget < 10**4:
        raise InputError(f"budget must be >= 1e4, got {budget}")

    best = None
    used_total = 0
    per_ell = budget // len(ells)
    for ell in ells:
        lam = mode_eigenvalue(n, ell)

        def objective(x, _lam=lam):
            g = _profile_from_params(x, n_components)
            if g is None:
                return _COSINE_PENALTY
            rad, sph, cross, _ = _mode_terms(g, n, _lam)
            if rad <= 0.0 or sph <= 0.0:
                return _COSINE_PENALTY
            return cross / math.sqrt(rad * sph)

        val, x, used = _run_search(objective, n, n_components, per_ell, seed)
        used_total += used
        if best is None or val < best[0]:
            best = (val, x, ell)

    value, x_best, ell_best = best
    if not -1.0 - 1e-9 <= value <= 1.0 + 1e-9:
        raise NumericsError(f"cosine estimate {value} outside [-1, 1]")
    profile = _profile_from_params(x_best, n_components) if x_best is not None else None
    return ConstantEstimate(value=value, n=n, ell=ell_best, method="search",
                            converged=True, iterations=used_total,
                            budget=budget, seed=seed,
                            argmin_profile=profile.to_dict() if profile else None)


def spherical_constant_check(n: int, ell_set, budget: int = 10000, seed: int = 0,
                             n_components: int = 4,
                             sample_sink: list | None = None) -> ConstantEstimate:
    """Minimize |Delta f|^2 / |spherical part|^2 over the bump family at
    n = 3, asserting on every sample the (5/8)^2 lower bound and the
    radial-part bound |Delta f|^2 >= |radial part|^2.

    Every evaluated sample is appended to `sample_sink` (if given) as
    (spherical_ratio, lhs, radial).  A sample violating either proven
    bound raises NumericsError: the bounds hold exactly, so a violation
    beyond rounding means a numerical fault.
    """
    if n != 3:
        raise InputError(f"spherical bound check is specific to n = 3, got {n}")
    ells = sorted(set(int(e) for e in ell_set))
    if not ells:
        raise InputError("ell_set must be non-empty")
    if any(e < 1 for e in ells):
        raise InputError("degenerate denominator: spherical ratio needs ell >= 1")
    if budget < 10**4:
        raise InputError(f"budget must be >= 1e4, got {budget}")

    floor = 0.390625  # (5/8)^2
    best = None
    used_total = 0
    per_ell = budget // len(ells)
    for ell in ells:
        lam = mode_eigenvalue(n, ell)

        def objective(x, _lam=lam):
            g = _profile_from_params(x, n_components)
            if g is None:
                return _RATIO_PENALTY
            rad, sph, _, lhs = _mode_terms(g, n, _lam)
            if sph <= 0.0:
                return _RATIO_PENALTY
            ratio = lhs / sph
            if ratio < floor - 1e-10:
                raise NumericsError(
                    f"sample ratio {ratio} below (5/8)^2 = {floor}")
            if lhs < rad - 1e-10 * lhs:
                raise NumericsError(
                    f"sample violates |Delta f|^2 >= |radial|^2: {lhs} < {rad}")
            if sample_sink is not None:
                sample_sink.append((ratio, lhs, rad))
            return ratio

        val, x, used = _run_search(objective, n, n_components, per_ell, seed)
        used_total += used
        if best is None or val < best[0]:
            best = (val, x, ell)

    value, x_best, ell_best = best
    profile = _profile_from_params(x_best, n_components) if x_best is not None else None
    return ConstantEstimate(value=value, n=n, ell=ell_best, method="search",
                            converged=True, iterations=used_total,
                            budget=budget, seed=seed, oracle_value=floor,
                            argmin_profile=profile.to_dict() if profile else None)
