"""Gauss-Legendre quadrature on subintervals of [0, pi].

Two rule builders cover everything the kernel integrals need:

* gauss_rule -- a single high-order rule, exact for polynomials of degree
  2*order - 1, enough to integrate the oscillatory Jackson kernel exactly
  once the order tracks the kernel degree.
* graded_rule -- a composite rule over dyadic panels accumulating at 0,
  for moment integrands with negative powers of theta.

Nodes come from Newton iteration on the Legendre recurrence (tolerance
1e-15), so the module has no dependencies beyond numpy.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError

__all__ = ["QuadratureRule", "gauss_rule", "graded_rule", "integrate"]

_WEIGHT_SUM_TOL = 1e-12

# Base rules on [-1, 1] are reused constantly (one per order); plain dict
# insertion is atomic under CPython, so concurrent readers are fine.
_BASE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for integration over an interval (a, b) in [0, pi]."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        a, b = self.interval
        if nodes.shape != weights.shape or nodes.ndim != 1 or nodes.size == 0:
            raise ValidationError("nodes and weights must be 1-D arrays of equal length")
        if not (0.0 <= a < b <= np.pi + 1e-12):
            raise ValidationError(f"interval must satisfy 0 <= a < b <= pi, got ({a}, {b})")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValidationError("nodes must be strictly increasing")
        if nodes[0] <= a or nodes[-1] >= b:
            raise ValidationError("nodes must be interior to the interval")
        if np.any(weights <= 0.0):
            raise ValidationError("weights must be positive")
        if abs(weights.sum() - (b - a)) > _WEIGHT_SUM_TOL:
            raise ValidationError("weights do not sum to the interval length")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)


def _legendre_and_derivative(order: int, x: np.ndarray):
    """Return (P_order(x), P_order'(x)) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for m in range(2, order + 1):
        p, p_prev = ((2 * m - 1) * x * p - (m - 1) * p_prev) / m, p
    dp = order * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def _base_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration."""
    cached = _BASE_CACHE.get(order)
    if cached is not None:
        return cached
    if order == 1:
        result = (np.array([0.0]), np.array([2.0]))
        _BASE_CACHE[order] = result
        return result
    i = np.arange(1, order + 1)
    x = np.cos(np.pi * (i - 0.25) / (order + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(order, x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    # enforce the exact +/- symmetry of the true rule
    x = 0.5 * (x - x[::-1])
    _, dp = _legendre_and_derivative(order, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order_idx = np.argsort(x)
    result = (x[order_idx], w[order_idx])
    _BASE_CACHE[order] = result
    return result


def gauss_rule(order: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Legendre rule with `order` nodes mapped affinely to (a, b).

    Exact for polynomials of degree <= 2*order - 1 on the interval.
    """
    if int(order) != order or order < 1:
        raise ValidationError(f"order must be a positive integer, got {order!r}")
    if a >= b:
        raise ValidationError(f"invalid interval: a = {a} must be < b = {b}")
    x, w = _base_rule(int(order))
    mid, half = 0.5 * (b + a), 0.5 * (b - a)
    return QuadratureRule(mid + half * x, half * w, (float(a), float(b)))


def graded_rule(order_per_panel: int, levels: int) -> QuadratureRule:
    """Composite Gauss rule over the dyadic panels [pi 2^{-m-1}, pi 2^{-m}].

    Panels for m = 0..levels-1 concatenate into a rule on
    (pi 2^{-levels}, pi) whose resolution grows toward 0, taming
    integrands with theta^{-1}-type behavior there.
    """
    if int(levels) != levels or not 1 <= levels <= 60:
        raise ValidationError(f"levels must be an integer in [1, 60], got {levels!r}")
    nodes, weights = [], []
    for m in range(levels - 1, -1, -1):
        panel = gauss_rule(order_per_panel, np.pi * 2.0 ** (-m - 1), np.pi * 2.0 ** (-m))
        nodes.append(panel.nodes)
        weights.append(panel.weights)
    return QuadratureRule(
        np.concatenate(nodes), np.concatenate(weights), (np.pi * 2.0 ** (-levels), np.pi)
    )


def integrate(f, rule: QuadratureRule) -> float:
    """Return sum_i w_i f(theta_i); f may be vectorized or scalar-valued."""
    values = np.asarray(f(rule.nodes), dtype=float)
    if values.shape != rule.nodes.shape:
        values = np.array([f(theta) for theta in rule.nodes], dtype=float)
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise DomainError(
            f"integrand is not finite at node theta = {rule.nodes[bad]!r} (index {bad})"
        )
    return float(values @ rule.weights)
