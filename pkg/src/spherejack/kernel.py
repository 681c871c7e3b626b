"""The Jackson kernel, its moments, and its multiplier eigenvalues.

D_{k,s}(theta) = A_{k,s}^{-1} (sin(k theta / 2) / sin(theta / 2))^{2s} is an
even trigonometric polynomial of degree s(k-1), normalized so that
int_0^pi D_{k,s}(theta) sin^{2 lambda}(theta) dtheta = 1 with
lambda = (n-2)/2.  Convolution with it (the Jackson operator) acts on the
degree-j harmonic component by the eigenvalue

    eta_{k,s}(j) = int_0^pi D_{k,s}(theta) P_j^n(cos theta) sin^{2 lambda}(theta) dtheta,

and the r-fold Boolean sum I - (I - J_{k,s})^r acts by
xi = 1 - (1 - eta)^r.

Numerical core: we never integrate P_j directly.  Instead the complement

    1 - eta_{k,s}(j) = int (1 - P_j^n(cos theta)) D_{k,s} sin^{2 lambda} dtheta

is computed, whose integrand is nonnegative, so small complements keep full
relative precision and the j = 0 complement is exactly zero.  Everything
downstream (Boolean multipliers, saturation errors, eigenvalue ratios) is
built from these complements.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .quadrature import QuadratureRule, gauss_rule, graded_rule
from .specfun import J_MAX, legendre_pn_table, ultraspherical_index

__all__ = [
    "HypothesisWarning",
    "KernelParams",
    "MultiplierSequence",
    "make_params",
    "kernel_eval",
    "moment",
    "eigenvalue",
    "eigenvalue_complement",
    "complement_sequence",
    "boolean_multiplier",
    "multiplier_sequence",
]

# Extra Gauss nodes beyond the trigonometric degree of the integrand.
_ORDER_MARGIN = 16
_GRADED_LEVELS = 48

_MULTIPLIER_TAGS = ("jackson", "boolean", "translation", "laplace_power", "difference", "custom")
_UNIT_AT_ZERO_TAGS = ("jackson", "boolean", "translation")


class HypothesisWarning(UserWarning):
    """Parameters fall outside the range where the stated rates are guaranteed.

    The asymptotic statements this package checks assume inequalities such as
    2s >= n; violating them is allowed (the integrals still exist) but the
    advertised decay rates may not hold, so exploratory runs get a warning
    instead of an error.
    """


@dataclass(frozen=True)
class KernelParams:
    """Immutable parameter pack (k, s, n) with derived quantities.

    norm_constant is A_{k,s}; rate_hypothesis records whether 2s >= n holds,
    the hypothesis under which the k^{-2} first-eigenvalue decay is claimed.
    """

    k: int
    s: int
    n: int
    lam: float
    norm_constant: float
    rate_hypothesis: bool

    @property
    def band(self) -> int:
        """Largest harmonic degree the Jackson operator can produce: s(k-1)."""
        return self.s * (self.k - 1)


@dataclass(frozen=True)
class MultiplierSequence:
    """Degree-indexed eigenvalues m(j), j = 0..J, of a zonal multiplier operator.

    tag names the operator family: "jackson", "boolean(r)", "translation(theta)",
    "laplace_power(r)", "difference(theta,r)" or "custom".
    """

    values: np.ndarray
    J: int
    n: int
    tag: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.J + 1,):
            raise ValidationError(
                f"values must have shape ({self.J + 1},), got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("multiplier values must be finite")
        base = self.tag.split("(", 1)[0]
        if base not in _MULTIPLIER_TAGS:
            raise ValidationError(f"unknown multiplier tag {self.tag!r}")
        if base in _UNIT_AT_ZERO_TAGS and abs(values[0] - 1.0) > 1e-12:
            raise ValidationError(f"{base} multiplier must have m(0) = 1, got {values[0]!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def _kernel_power(theta: np.ndarray, k: int, s: int) -> np.ndarray:
    """(sin(k theta/2) / sin(theta/2))^{2s}, with the limit k^{2s} at theta = 0."""
    den = np.sin(0.5 * theta)
    ratio = np.where(den != 0.0, np.sin(0.5 * k * theta) / np.where(den != 0.0, den, 1.0), float(k))
    return ratio ** (2 * s)


def _quad_order(k: int, s: int, n: int, j_max: int) -> int:
    # integrand degree: kernel s(k-1) + P_j adds j; sin^{2 lambda} adds n-2
    return s * k + j_max + n + _ORDER_MARGIN


def make_params(k: int, s: int, n: int) -> KernelParams:
    """Build KernelParams, computing the normalization A_{k,s} by quadrature."""
    for name, value, low in (("k", k, 1), ("s", s, 1), ("n", n, 3)):
        if int(value) != value or value < low:
            raise ValidationError(f"{name} must be an integer >= {low}, got {value!r}")
    k, s, n = int(k), int(s), int(n)
    lam = ultraspherical_index(n)
    rule = gauss_rule(_quad_order(k, s, n, 0), 0.0, np.pi)
    raw = _kernel_power(rule.nodes, k, s) * np.sin(rule.nodes) ** (n - 2)
    norm = float(raw @ rule.weights)
    return KernelParams(k, s, n, lam, norm, 2 * s >= n)


def kernel_eval(theta, params: KernelParams):
    """Evaluate the normalized kernel D_{k,s}(theta) for theta in [0, pi]."""
    arr = np.asarray(theta, dtype=float)
    if arr.size and (np.nanmin(arr) < 0.0 or np.nanmax(arr) > np.pi + 1e-12):
        raise DomainError("theta must lie in [0, pi]")
    out = _kernel_power(arr, params.k, params.s) / params.norm_constant
    return float(out) if arr.ndim == 0 else out


def moment(beta: float, gamma: float, params: KernelParams) -> float:
    """Return int_0^gamma theta^beta D_{k,s}(theta) sin^{2 lambda}(theta) dtheta.

    beta >= -1 is required.  When 2s < beta + n - 2 a HypothesisWarning is
    emitted: the integral is still computed, but its advertised k^{-beta}
    decay is outside the guaranteed regime.  Non-integer and negative beta
    use the graded dyadic rule; the weight theta^beta is then not smooth at
    0 and a single Gauss rule would lose accuracy.
    """
    if not beta >= -1.0:
        raise ValidationError(f"beta must be >= -1, got {beta!r}")
    if not 0.0 < gamma <= np.pi + 1e-12:
        raise DomainError(f"gamma must lie in (0, pi], got {gamma!r}")
    if 2 * params.s < beta + params.n - 2:
        warnings.warn(
            f"moment rate guarantee requires 2s >= beta + n - 2: "
            f"2s = {2 * params.s}, beta + n - 2 = {beta + params.n - 2:g}",
            HypothesisWarning,
            stacklevel=2,
        )
    poly_order = params.s * params.k + params.n + _ORDER_MARGIN
    if beta >= 0.0 and float(beta).is_integer():
        rule = gauss_rule(poly_order + int(beta), 0.0, float(gamma))
    else:
        rule = _scaled_graded(poly_order, float(gamma))
    theta = rule.nodes
    values = theta ** beta * _kernel_power(theta, params.k, params.s) * np.sin(theta) ** (params.n - 2)
    return float(values @ rule.weights) / params.norm_constant


def _scaled_graded(order_per_panel: int, gamma: float) -> QuadratureRule:
    """Graded dyadic rule on (gamma 2^{-levels}, gamma)."""
    base = graded_rule(order_per_panel, _GRADED_LEVELS)
    c = gamma / np.pi
    a, b = base.interval
    return QuadratureRule(base.nodes * c, base.weights * c, (a * c, b * c))


# ---------------------------------------------------------------------------
# eigenvalue complements 1 - eta_{k,s}(j)

# keyed by (k, s, n) -> complement array for j = 0..J_cached; regrown on
# demand.  CPython dict assignment is atomic; for multi-threaded use, call
# complement_sequence once up front so later reads hit the cache.
_COMPLEMENT_CACHE: dict[tuple[int, int, int], np.ndarray] = {}


def _complements(params: KernelParams, j_max: int) -> np.ndarray:
    if j_max > J_MAX:
        raise ValidationError(f"degree {j_max} exceeds J_MAX = {J_MAX}")
    key = (params.k, params.s, params.n)
    cached = _COMPLEMENT_CACHE.get(key)
    if cached is not None and cached.size > j_max:
        return cached[: j_max + 1]
    rule = gauss_rule(_quad_order(params.k, params.s, params.n, j_max), 0.0, np.pi)
    u = _kernel_power(rule.nodes, params.k, params.s) * np.sin(rule.nodes) ** (params.n - 2)
    u *= rule.weights
    mass = u.sum()
    table = legendre_pn_table(j_max, params.n, np.cos(rule.nodes))
    comp = (1.0 - table) @ u / mass
    comp.setflags(write=False)
    _COMPLEMENT_CACHE[key] = comp
    return comp


def eigenvalue_complement(j: int, params: KernelParams) -> float:
    """Return 1 - eta_{k,s}(j) with full relative precision.

    The nonnegative integrand (1 - P_j^n) D_{k,s} sin^{2 lambda} avoids the
    cancellation that computing eta first and subtracting would incur; this
    matters for everything that measures decay of the complements.
    """
    if int(j) != j or j < 0:
        raise ValidationError(f"degree must be a nonnegative integer, got {j!r}")
    return float(_complements(params, int(j))[int(j)])


def complement_sequence(params: KernelParams, j_max: int) -> np.ndarray:
    """Return the array 1 - eta_{k,s}(j) for j = 0..j_max (read-only view)."""
    if int(j_max) != j_max or j_max < 0:
        raise ValidationError(f"j_max must be a nonnegative integer, got {j_max!r}")
    return _complements(params, int(j_max))


def eigenvalue(j: int, params: KernelParams) -> float:
    """Return eta_{k,s}(j); equals 1 at j = 0 and vanishes for j > s(k-1)."""
    return 1.0 - eigenvalue_complement(j, params)


def boolean_multiplier(j: int, r: int, params: KernelParams) -> float:
    """Return the Boolean-sum eigenvalue xi = 1 - (1 - eta_{k,s}(j))^r."""
    if int(r) != r or r < 1:
        raise ValidationError(f"r must be a positive integer, got {r!r}")
    return 1.0 - eigenvalue_complement(j, params) ** int(r)


def multiplier_sequence(params: KernelParams, r: int, J: int) -> MultiplierSequence:
    """Return the multiplier sequence of the r-fold Boolean sum up to degree J."""
    if int(r) != r or r < 1:
        raise ValidationError(f"r must be a positive integer, got {r!r}")
    comp = complement_sequence(params, J)
    values = 1.0 - comp ** int(r)
    tag = "jackson" if r == 1 else f"boolean({int(r)})"
    return MultiplierSequence(values, int(J), params.n, tag)
