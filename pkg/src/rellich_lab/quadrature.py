"""Weighted inner products and norms on the half line.

Every pairing used by the verification suite is of the form

    integral of p(r) * conj(q(r)) * r**alpha dr

over a compact interval bounded away from r = 0.  Integrands are smooth
(compactly supported test profiles and their derivatives), so panel-based
Gauss-Legendre quadrature converges spectrally and near machine precision
is reached with modest node counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericsError

DEFAULT_PANELS = 8
DEFAULT_NODES_PER_PANEL = 32


@dataclass(frozen=True)
class Interval:
    """Compact radial interval with 0 < lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise InputError(f"interval endpoints must be finite, got ({self.lo}, {self.hi})")
        if not 0.0 < self.lo < self.hi:
            raise InputError(f"interval must satisfy 0 < lo < hi, got ({self.lo}, {self.hi})")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss nodes/weights over a support interval, `panels` per-panel rules."""

    nodes: np.ndarray
    weights: np.ndarray
    support: Interval
    panels: int
    nodes_per_panel: int


def _panel_rule(edges: np.ndarray, nodes_per_panel: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (half[:, None] * x[None, :] + mid[:, None]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def make_rule(support: Interval, panels: int = DEFAULT_PANELS,
              nodes_per_panel: int = DEFAULT_NODES_PER_PANEL) -> QuadratureRule:
    """Gauss-Legendre rule on `support`, split into equal-width panels.

    Parameters
    ----------
    support : Interval
        Integration interval, 0 < lo < hi.
    panels : int
        Number of equal-width panels, >= 1.
    nodes_per_panel : int
        Gauss nodes per panel, >= 2; the rule is exact for polynomials of
        degree <= 2*nodes_per_panel - 1 on each panel.
    """
    if panels < 1:
        raise InputError(f"panels must be >= 1, got {panels}")
    if nodes_per_panel < 2:
        raise InputError(f"nodes_per_panel must be >= 2, got {nodes_per_panel}")
    edges = np.linspace(support.lo, support.hi, panels + 1)
    nodes, weights = _panel_rule(edges, nodes_per_panel)
    return QuadratureRule(nodes, weights, support, panels, nodes_per_panel)


def make_log_rule(support: Interval, panels: int = DEFAULT_PANELS,
                  nodes_per_panel: int = DEFAULT_NODES_PER_PANEL) -> QuadratureRule:
    """Gauss-Legendre rule with panel edges equally spaced in log(r).

    Suited to integrands spread over several decades (sharp-constant
    searches); same invariants as `make_rule`.
    """
    if panels < 1:
        raise InputError(f"panels must be >= 1, got {panels}")
    if nodes_per_panel < 2:
        raise InputError(f"nodes_per_panel must be >= 2, got {nodes_per_panel}")
    edges = np.exp(np.linspace(np.log(support.lo), np.log(support.hi), panels + 1))
    edges[0], edges[-1] = support.lo, support.hi
    nodes, weights = _panel_rule(edges, nodes_per_panel)
    return QuadratureRule(nodes, weights, support, panels, nodes_per_panel)


def _sample(p, rule: QuadratureRule) -> np.ndarray:
    """Evaluate a callable on the rule nodes, or validate a sample array."""
    if callable(p):
        values = np.asarray(p(rule.nodes))
    else:
        values = np.asarray(p)
        if values.shape != rule.nodes.shape:
            raise InputError(
                f"sample array has shape {values.shape}, rule has {rule.nodes.shape}")
    if values.dtype == object:
        values = values.astype(complex)
    bad = ~np.isfinite(values) if not np.iscomplexobj(values) else ~(
        np.isfinite(values.real) & np.isfinite(values.imag))
    if bad.any():
        k = int(np.argmax(bad))
        raise NumericsError(
            f"non-finite sample {values[k]!r} at node index {k} (r = {rule.nodes[k]})")
    return values


def weighted_inner(p, q, alpha: float, rule: QuadratureRule) -> complex:
    """Weighted pairing sum_k w_k p(r_k) conj(q(r_k)) r_k**alpha.

    `p` and `q` are callables evaluable on the rule nodes or arrays of
    node samples.  Exact conjugate symmetry holds by construction.
    """
    pv = _sample(p, rule)
    qv = _sample(q, rule)
    return complex(np.sum(rule.weights * pv * np.conjugate(qv) * rule.nodes ** alpha))


def weighted_norm_sq(p, alpha: float, rule: QuadratureRule) -> float:
    """Squared weighted norm, the real part of weighted_inner(p, p, alpha).

    The imaginary part is asserted negligible (|Im| <= 1e-13 |Re|) before
    being discarded; the result is nonnegative since all weights are
    positive.
    """
    z = weighted_inner(p, p, alpha, rule)
    if abs(z.imag) > 1e-13 * abs(z.real):
        raise NumericsError(f"norm has non-negligible imaginary part: {z!r}")
    return z.real
