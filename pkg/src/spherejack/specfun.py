"""Gegenbauer polynomials and the normalized Legendre polynomials P_j^n.

P_j^n(t) = G_j^lambda(t) / G_j^lambda(1) with lambda = (n-2)/2 is the zonal
profile of the degree-j spherical harmonic on S^{n-1}; every multiplier and
kernel computation in this package reduces to evaluating these.

Evaluation uses the three-term recurrence

    j G_j^lam(t) = 2 (j + lam - 1) t G_{j-1}^lam(t) - (j + 2 lam - 2) G_{j-2}^lam(t)

seeded with G_0 = 1, G_1 = 2 lam t.  For the normalized family the same
recurrence becomes

    P_j = (2 (j + lam - 1) t P_{j-1} - (j - 1) P_{j-2}) / (j + 2 lam - 1)

which keeps every value in [-1, 1] and cannot overflow.
"""

from math import lgamma

import numpy as np

from .errors import DomainError, ValidationError

__all__ = [
    "J_MAX",
    "gegenbauer",
    "gegenbauer_at_one",
    "legendre_pn",
    "legendre_pn_table",
    "ultraspherical_index",
]

# Degrees above this are rejected everywhere; desk-scale sweeps stay far below.
J_MAX = 4096

# Slack for |t| <= 1: arccos/cos round-trips can land a few ulp outside.
_T_SLACK = 1e-12


def ultraspherical_index(n: int) -> float:
    """Return lambda = (n - 2) / 2 for the sphere S^{n-1}."""
    if int(n) != n or n < 3:
        raise ValidationError(f"sphere dimension must be an integer >= 3, got {n!r}")
    return (n - 2) / 2.0


def _check_degree(j: int) -> int:
    if int(j) != j or j < 0:
        raise ValidationError(f"degree must be a nonnegative integer, got {j!r}")
    if j > J_MAX:
        raise ValidationError(f"degree {j} exceeds J_MAX = {J_MAX}")
    return int(j)


def _clean_t(t):
    """Validate |t| <= 1 (within slack) and clip; return (array, was_scalar)."""
    arr = np.asarray(t, dtype=float)
    if arr.size and np.nanmax(np.abs(arr)) > 1.0 + _T_SLACK:
        bad = np.asarray(arr).ravel()
        worst = bad[np.argmax(np.abs(bad))]
        raise DomainError(f"argument must lie in [-1, 1], got {worst}")
    return np.clip(arr, -1.0, 1.0), arr.ndim == 0


def gegenbauer(j: int, lam: float, t):
    """Evaluate the Gegenbauer polynomial G_j^lam(t).

    Consistent with the generating function (1 - 2 t x + x^2)^{-lam}; scalar
    t gives a float, array t an array.
    """
    j = _check_degree(j)
    if not lam > 0:
        raise ValidationError(f"ultraspherical index must be positive, got {lam!r}")
    tt, scalar = _clean_t(t)
    g_prev = np.ones_like(tt)
    if j == 0:
        return float(g_prev) if scalar else g_prev
    g = 2.0 * lam * tt
    for m in range(2, j + 1):
        g, g_prev = (2.0 * (m + lam - 1.0) * tt * g - (m + 2.0 * lam - 2.0) * g_prev) / m, g
    return float(g) if scalar else g


def gegenbauer_at_one(j: int, lam: float) -> float:
    """Return G_j^lam(1) = Gamma(j + 2 lam) / (Gamma(j + 1) Gamma(2 lam)).

    Computed through log-gamma so large j + 2 lam does not overflow.
    """
    j = _check_degree(j)
    if not lam > 0:
        raise ValidationError(f"ultraspherical index must be positive, got {lam!r}")
    return float(np.exp(lgamma(j + 2.0 * lam) - lgamma(j + 1.0) - lgamma(2.0 * lam)))


def legendre_pn(j: int, n: int, t):
    """Evaluate P_j^n(t) = G_j^lam(t) / G_j^lam(1), lam = (n-2)/2.

    Satisfies P_j^n(1) = 1 and |P_j^n| <= 1 on [-1, 1].
    """
    lam = ultraspherical_index(n)
    j = _check_degree(j)
    tt, scalar = _clean_t(t)
    p = _normalized_recurrence(j, lam, tt)
    return float(p) if scalar else p


def _normalized_recurrence(j: int, lam: float, tt: np.ndarray) -> np.ndarray:
    p_prev = np.ones_like(tt)
    if j == 0:
        return p_prev
    p = tt.copy()
    for m in range(2, j + 1):
        p, p_prev = (2.0 * (m + lam - 1.0) * tt * p - (m - 1.0) * p_prev) / (m + 2.0 * lam - 1.0), p
    return p


def legendre_pn_table(j_max: int, n: int, t) -> np.ndarray:
    """Return the table P[j, i] = P_j^n(t_i) for j = 0..j_max in one pass.

    This is the workhorse for multiplier integrals and zonal profile
    evaluation; a single recurrence sweep fills all degrees.
    """
    lam = ultraspherical_index(n)
    j_max = _check_degree(j_max)
    tt, _ = _clean_t(np.atleast_1d(t).ravel())
    table = np.empty((j_max + 1, tt.size))
    table[0] = 1.0
    if j_max >= 1:
        table[1] = tt
    for m in range(2, j_max + 1):
        table[m] = (2.0 * (m + lam - 1.0) * tt * table[m - 1]
                    - (m - 1.0) * table[m - 2]) / (m + 2.0 * lam - 1.0)
    return table
