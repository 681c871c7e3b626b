"""Zonal band-limited functions on S^{n-1} and the operator calculus on them.

A zonal function f(x) = sum_j a_j P_j^n(x . e) is stored as its coefficient
vector.  Every operator used here -- translation S_theta, iterated spherical
differences (S_theta - I)^r, powers of the Laplace-Beltrami operator, the
Jackson operator and its Boolean sums -- is rotation invariant and therefore
acts diagonally on the coefficients, so the whole calculus reduces to
componentwise multiplication plus 1-D quadrature for the L^p norms:

    ||f||_p = ( |S^{n-2}| int_0^pi |g(theta)|^p sin^{n-2}(theta) dtheta )^{1/p},

g being the profile.  The sup norm is taken on a dense theta grid with local
parabolic refinement around the grid maximum.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CompatibilityError, DomainError, ValidationError
from .kernel import KernelParams, MultiplierSequence, complement_sequence, make_params
from .quadrature import gauss_rule
from .specfun import J_MAX, legendre_pn_table, ultraspherical_index

__all__ = [
    "ZonalFunction",
    "smooth_family",
    "rough_family",
    "single_family",
    "to_text",
    "from_text",
    "evaluate",
    "surface_area",
    "lp_norm",
    "apply_multiplier",
    "translation_sequence",
    "difference_sequence",
    "laplace_sequence",
    "translate",
    "spherical_difference",
    "laplace_beltrami_power",
    "jackson_apply",
    "boolean_apply",
    "modulus_of_smoothness",
    "k_functional_upper",
]

_INF_GRID_SIZE = 4096
_MODULUS_GRID_SIZE = 64


@dataclass(frozen=True)
class ZonalFunction:
    """Coefficients a_0..a_J of f(x) = sum_j a_j P_j^n(x . e) for a fixed pole e."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        ultraspherical_index(self.n)  # validates n
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValidationError("coeffs must be a nonempty 1-D array")
        if coeffs.size - 1 > J_MAX:
            raise ValidationError(f"degree {coeffs.size - 1} exceeds J_MAX = {J_MAX}")
        if not np.all(np.isfinite(coeffs)):
            raise ValidationError("coeffs must be finite")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def J(self) -> int:
        return self.coeffs.size - 1


# ---------------------------------------------------------------------------
# named test families


def smooth_family(alpha: float, J: int = 64, n: int = 3) -> ZonalFunction:
    """a_j = (1+j)^{-alpha}; alpha around 3..5 gives smooth test functions."""
    if not alpha > 0:
        raise ValidationError(f"alpha must be positive, got {alpha!r}")
    j = np.arange(int(J) + 1, dtype=float)
    return ZonalFunction(n, (1.0 + j) ** (-float(alpha)))


def rough_family(alpha: float, J: int = 128, n: int = 3) -> ZonalFunction:
    """Same coefficient law with slow decay (alpha around 1.2..1.6).

    These functions sit outside the smoothness classes the higher-order
    differences detect, so they exercise the modulus-of-smoothness behavior
    that smooth families cannot reach.
    """
    return smooth_family(alpha, J, n)


def single_family(j0: int, n: int = 3) -> ZonalFunction:
    """The single harmonic P_{j0}^n; j0 = 0 is the constant function 1."""
    if int(j0) != j0 or j0 < 0:
        raise ValidationError(f"j0 must be a nonnegative integer, got {j0!r}")
    coeffs = np.zeros(int(j0) + 1)
    coeffs[-1] = 1.0
    return ZonalFunction(n, coeffs)


# ---------------------------------------------------------------------------
# plain-text serialization: first line "n J", second line the coefficients


def to_text(f: ZonalFunction) -> str:
    header = f"{f.n} {f.J}"
    body = " ".join(repr(float(c)) for c in f.coeffs)
    return header + "\n" + body + "\n"


def from_text(text: str) -> ZonalFunction:
    lines = [line for line in text.strip().splitlines() if line.strip()]
    if len(lines) != 2:
        raise ValidationError("expected two lines: 'n J' then J+1 coefficients")
    try:
        n, J = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise ValidationError(f"malformed header line {lines[0]!r}") from exc
    try:
        coeffs = np.array([float(tok) for tok in lines[1].split()])
    except ValueError as exc:
        raise ValidationError("coefficients must be floats") from exc
    if coeffs.size != J + 1:
        raise ValidationError(f"header promises {J + 1} coefficients, found {coeffs.size}")
    return ZonalFunction(n, coeffs)


# ---------------------------------------------------------------------------
# profile evaluation and L^p norms

# Composite norm rule: panels of 16 Gauss nodes on [0, pi], enough panels to
# resolve degree-J profiles.  Tables of P_j values on the nodes are cached per
# (n, bucket) and grown to the bucket capacity 4 * panels.
_RULE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_NORM_TABLE_CACHE: dict[tuple[int, int], np.ndarray] = {}
_NORM_WEIGHT_CACHE: dict[tuple[int, int], np.ndarray] = {}
_INF_TABLE_CACHE: dict[tuple[int, int], np.ndarray] = {}
_INF_THETA = np.linspace(0.0, np.pi, _INF_GRID_SIZE + 1)


def _panels_for(J: int) -> int:
    return max(16, -(-(J + 1) // 4))


def _norm_rule(panels: int) -> tuple[np.ndarray, np.ndarray]:
    cached = _RULE_CACHE.get(panels)
    if cached is not None:
        return cached
    edges = np.linspace(0.0, np.pi, panels + 1)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        rule = gauss_rule(16, a, b)
        nodes.append(rule.nodes)
        weights.append(rule.weights)
    result = (np.concatenate(nodes), np.concatenate(weights))
    _RULE_CACHE[panels] = result
    return result


def _norm_machinery(n: int, J: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (P table for j = 0..J, weights * sin^{n-2}) on the norm rule."""
    panels = _panels_for(J)
    capacity = 4 * panels
    key = (n, panels)
    table = _NORM_TABLE_CACHE.get(key)
    if table is None or table.shape[0] <= J:
        theta, _ = _norm_rule(panels)
        table = legendre_pn_table(min(capacity, J_MAX), n, np.cos(theta))
        _NORM_TABLE_CACHE[key] = table
    wsin = _NORM_WEIGHT_CACHE.get(key)
    if wsin is None:
        theta, w = _norm_rule(panels)
        wsin = w * np.sin(theta) ** (n - 2)
        _NORM_WEIGHT_CACHE[key] = wsin
    return table[: J + 1], wsin


def _inf_table(n: int, J: int) -> np.ndarray:
    panels = _panels_for(J)
    capacity = 4 * panels
    key = (n, panels)
    table = _INF_TABLE_CACHE.get(key)
    if table is None or table.shape[0] <= J:
        table = legendre_pn_table(min(capacity, J_MAX), n, np.cos(_INF_THETA))
        _INF_TABLE_CACHE[key] = table
    return table[: J + 1]


def surface_area(n: int) -> float:
    """|S^{n-2}| = 2 pi^{(n-1)/2} / Gamma((n-1)/2); the circle 2 pi for n = 3."""
    ultraspherical_index(n)
    return float(2.0 * np.pi ** ((n - 1) / 2.0) / math.gamma((n - 1) / 2.0))


def _check_p(p) -> float:
    if p == math.inf:
        return math.inf
    try:
        pv = float(p)
    except (TypeError, ValueError):
        raise ValidationError(f"p must be a real number >= 1 or infinity, got {p!r}") from None
    if not pv >= 1.0:
        raise ValidationError(f"p must be >= 1, got {p!r}")
    return pv


def evaluate(f: ZonalFunction, theta):
    """Profile g(theta) = sum_j a_j P_j^n(cos theta); scalar in, float out."""
    arr = np.asarray(theta, dtype=float)
    table = legendre_pn_table(f.J, f.n, np.cos(arr.ravel()))
    out = f.coeffs @ table
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def _eval_rows(rows: np.ndarray, n: int, theta: np.ndarray) -> np.ndarray:
    table = legendre_pn_table(rows.shape[1] - 1, n, np.cos(theta))
    return rows @ table


def _refined_abs_max(row: np.ndarray, n: int, grid_values: np.ndarray) -> float:
    """Sharpen the grid sup with parabolic ascent on the squared profile."""
    i0 = int(np.argmax(np.abs(grid_values)))
    best = float(abs(grid_values[i0]))
    theta = _INF_THETA[i0]
    h = np.pi / _INF_GRID_SIZE
    for _ in range(6):
        ts = np.clip(np.array([theta - h, theta, theta + h]), 0.0, np.pi)
        g = _eval_rows(row[None, :], n, ts)[0]
        y = g * g
        best = max(best, float(np.max(np.abs(g))))
        denom = y[0] - 2.0 * y[1] + y[2]
        if denom < 0.0:
            step = 0.5 * h * (y[0] - y[2]) / denom
            theta = float(np.clip(theta + step, 0.0, np.pi))
        h /= 3.0
    g_final = _eval_rows(row[None, :], n, np.array([theta]))[0, 0]
    return max(best, abs(float(g_final)))


def _lp_norm_rows(rows: np.ndarray, n: int, p) -> np.ndarray:
    """L^p norms of many coefficient rows at once (the batch workhorse)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    J = rows.shape[1] - 1
    pv = _check_p(p)
    if pv == math.inf:
        grid = rows @ _inf_table(n, J)
        return np.array([_refined_abs_max(rows[i], n, grid[i]) for i in range(rows.shape[0])])
    table, wsin = _norm_machinery(n, J)
    profile = rows @ table
    integrals = np.abs(profile) ** pv @ wsin
    return (surface_area(n) * integrals) ** (1.0 / pv)


def lp_norm(f: ZonalFunction, p) -> float:
    """The L^p(S^{n-1}) norm of f; p may be any real >= 1 or math.inf."""
    return float(_lp_norm_rows(f.coeffs, f.n, p)[0])


# ---------------------------------------------------------------------------
# multiplier sequences for the classical operators


def translation_sequence(theta: float, n: int, J: int) -> MultiplierSequence:
    """S_theta acts on degree j by P_j^n(cos theta)."""
    values = legendre_pn_table(J, n, np.array([math.cos(theta)]))[:, 0]
    return MultiplierSequence(values, J, n, f"translation({theta!r})")


def difference_sequence(theta: float, r: int, n: int, J: int) -> MultiplierSequence:
    """(S_theta - I)^r acts on degree j by (P_j^n(cos theta) - 1)^r."""
    if int(r) != r or r < 1:
        raise ValidationError(f"r must be a positive integer, got {r!r}")
    base = legendre_pn_table(J, n, np.array([math.cos(theta)]))[:, 0]
    return MultiplierSequence((base - 1.0) ** int(r), J, n, f"difference({theta!r},{int(r)})")


def laplace_sequence(r: int, n: int, J: int) -> MultiplierSequence:
    """The r-th power of the Laplace-Beltrami operator: (-j(j+2 lambda))^r."""
    if int(r) != r or r < 1:
        raise ValidationError(f"r must be a positive integer, got {r!r}")
    lam = ultraspherical_index(n)
    j = np.arange(int(J) + 1, dtype=float)
    return MultiplierSequence((-j * (j + 2.0 * lam)) ** int(r), int(J), n, f"laplace_power({int(r)})")


# ---------------------------------------------------------------------------
# operators


def apply_multiplier(f: ZonalFunction, m: MultiplierSequence) -> ZonalFunction:
    """Componentwise action a_j -> m(j) a_j; m must cover f's band."""
    if m.n != f.n:
        raise CompatibilityError(f"multiplier is for n = {m.n}, function has n = {f.n}")
    if m.J < f.J:
        raise ValidationError(f"multiplier covers degrees <= {m.J}, function needs {f.J}")
    return ZonalFunction(f.n, f.coeffs * m.values[: f.J + 1])


def translate(f: ZonalFunction, theta: float) -> ZonalFunction:
    """The translation S_theta f (average over circles of radius theta)."""
    if not 0.0 <= theta <= np.pi:
        raise DomainError(f"theta must lie in [0, pi], got {theta!r}")
    return apply_multiplier(f, translation_sequence(float(theta), f.n, f.J))


def spherical_difference(f: ZonalFunction, theta: float, r: int) -> ZonalFunction:
    """The iterated difference (S_theta - I)^r f."""
    if not 0.0 <= theta <= np.pi:
        raise DomainError(f"theta must lie in [0, pi], got {theta!r}")
    return apply_multiplier(f, difference_sequence(float(theta), r, f.n, f.J))


def laplace_beltrami_power(f: ZonalFunction, r: int) -> ZonalFunction:
    """Apply the r-th power of the spherical Laplacian."""
    return apply_multiplier(f, laplace_sequence(r, f.n, f.J))


def jackson_apply(f: ZonalFunction, params: KernelParams) -> ZonalFunction:
    """The Jackson operator J_{k,s} f via its eigenvalues eta_{k,s}(j)."""
    if params.n != f.n:
        raise CompatibilityError(f"kernel is for n = {params.n}, function has n = {f.n}")
    return ZonalFunction(f.n, f.coeffs * (1.0 - complement_sequence(params, f.J)))


def boolean_apply(f: ZonalFunction, params: KernelParams, r: int) -> ZonalFunction:
    """The Boolean sum (I - (I - J_{k,s})^r) f via xi = 1 - (1 - eta)^r."""
    if params.n != f.n:
        raise CompatibilityError(f"kernel is for n = {params.n}, function has n = {f.n}")
    if int(r) != r or r < 1:
        raise ValidationError(f"r must be a positive integer, got {r!r}")
    comp = complement_sequence(params, f.J)
    return ZonalFunction(f.n, f.coeffs * (1.0 - comp ** int(r)))


# ---------------------------------------------------------------------------
# modulus of smoothness and K-functional


def _modulus_grid(t: float) -> np.ndarray:
    # 64 geometric points in (t/64, t]; grids at t and t * 64^{i/64} share
    # points, so monotonicity can be tested on nested pairs.
    i = np.arange(_MODULUS_GRID_SIZE)
    return t * 64.0 ** (-i / _MODULUS_GRID_SIZE)


def modulus_of_smoothness(f: ZonalFunction, t: float, r: int, p) -> float:
    """omega^{2r}(f, t)_p: sup over theta <= t of ||(S_theta - I)^r f||_p.

    The sup is taken over 64 geometrically spaced theta in (t/64, t]; the
    difference norm typically peaks near theta = t but is not monotone, so a
    one-sided grid is not enough.
    """
    if not 0.0 < t < np.pi:
        raise DomainError(f"t must lie in (0, pi), got {t!r}")
    if int(r) != r or r < 1:
        raise ValidationError(f"r must be a positive integer, got {r!r}")
    thetas = _modulus_grid(float(t))
    table = legendre_pn_table(f.J, f.n, np.cos(thetas))
    rows = (table.T - 1.0) ** int(r) * f.coeffs
    return float(np.max(_lp_norm_rows(rows, f.n, p)))


def k_functional_upper(f: ZonalFunction, t: float, r: int, p, *, s: int = 3,
                       m_max: int = 512) -> float:
    """Upper bound for the K-functional inf_g ||f - g||_p + t^{2r} ||Delta^r g||_p.

    The candidate set is concrete: every spectral truncation T_N f,
    N = 0..J, plus Boolean-sum smoothings of f at dyadic degrees m <= m_max
    (kernel power s).  The true infimum is not computable; a minimum over
    this family upper-bounds it and tracks the modulus closely enough for
    equivalence checks.  s defaults to 3 so the candidate smoothers decay at
    the clean k^{-2} rate for every n <= 2s.
    """
    if not 0.0 < t < np.pi:
        raise DomainError(f"t must lie in (0, pi), got {t!r}")
    if int(r) != r or r < 1:
        raise ValidationError(f"r must be a positive integer, got {r!r}")
    r = int(r)
    a = f.coeffs
    J = f.J
    lap = np.abs(laplace_sequence(r, f.n, J).values)

    degree = np.arange(J + 1)
    mask = degree[None, :] <= degree[:, None]  # row N keeps degrees <= N
    approx_rows = [np.where(mask, 0.0, a)]     # f - T_N f
    penalty_rows = [np.where(mask, a, 0.0) * lap]

    m = 1
    while m <= m_max:
        comp = complement_sequence(make_params(m, s, f.n), J) ** r
        approx_rows.append((a * comp)[None, :])
        penalty_rows.append((a * (1.0 - comp) * lap)[None, :])
        m *= 2

    approx = _lp_norm_rows(np.vstack(approx_rows), f.n, p)
    penalty = _lp_norm_rows(np.vstack(penalty_rows), f.n, p)
    return float(np.min(approx + float(t) ** (2 * r) * penalty))
