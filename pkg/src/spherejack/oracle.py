"""Definition-level computations on S^2, independent of the multiplier path.

The fast path in `zonal` applies operators through their eigenvalues.  This
module recomputes the same quantities from the defining integrals -- surface
convolution with the kernel, averages over circles, a radial finite-difference
Laplacian -- on explicit grids, so the two routes can be compared.  Restricted
to n = 3 (the multiplier algebra is dimension-uniform, so one dimension
validates the code path), except for the radial Laplacian whose 1-D formula
g'' + (n-2) cot(theta) g' works for every n.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CompatibilityError, DomainError, ResolutionError, ValidationError
from .kernel import KernelParams, kernel_eval
from .quadrature import _base_rule  # Gauss nodes on [-1, 1], reused for cos(theta')
from .specfun import legendre_pn_table
from .zonal import ZonalFunction, evaluate

__all__ = ["SphereGrid", "make_grid", "convolve_direct", "translate_direct", "laplacian_radial_fd"]


@dataclass(frozen=True)
class SphereGrid:
    """Product grid on S^2: Gauss nodes in cos(colatitude) x uniform azimuths.

    cos_nodes/cos_weights integrate dt = sin(theta') dtheta' exactly for
    polynomials; each azimuth carries weight 2 pi / n_phi, so the combined
    weights sum to 4 pi.
    """

    cos_nodes: np.ndarray
    cos_weights: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        if self.cos_nodes.ndim != 1 or self.cos_nodes.shape != self.cos_weights.shape:
            raise ValidationError("cos_nodes and cos_weights must be matching 1-D arrays")
        if self.phi.ndim != 1 or self.phi.size == 0:
            raise ValidationError("phi must be a nonempty 1-D array")

    @property
    def n_theta(self) -> int:
        return self.cos_nodes.size

    @property
    def n_phi(self) -> int:
        return self.phi.size

    @property
    def total_weight(self) -> float:
        return float(self.cos_weights.sum() * 2.0 * np.pi)


def make_grid(n_theta: int, n_phi: int) -> SphereGrid:
    """Build the product grid with n_theta Gauss colatitudes and n_phi azimuths."""
    if int(n_theta) != n_theta or n_theta < 1 or int(n_phi) != n_phi or n_phi < 1:
        raise ValidationError("grid counts must be positive integers")
    t, w = _base_rule(int(n_theta))
    phi = np.arange(int(n_phi)) * (2.0 * np.pi / int(n_phi))
    return SphereGrid(t, w, phi)


def _require_sphere(f: ZonalFunction):
    if f.n != 3:
        raise CompatibilityError(f"direct S^2 computations need n = 3, got n = {f.n}")


def convolve_direct(f: ZonalFunction, params: KernelParams, x_colatitude: float,
                    grid: SphereGrid | None = None) -> float:
    """Evaluate (J_{k,s} f)(x) by the surface integral

        (2 pi)^{-1} int_{S^2} f(y) D_{k,s}(angle(x, y)) d omega(y)

    for x at the given colatitude.  The integrand is a polynomial on the
    sphere of degree s(k-1) + J, so the default grid is exact.
    """
    _require_sphere(f)
    if params.n != 3:
        raise CompatibilityError(f"direct S^2 convolution needs n = 3 kernel, got n = {params.n}")
    needed = 2 * (params.s * params.k + f.J) + 16
    if grid is None:
        grid = make_grid(needed, needed)
    elif grid.n_theta < needed:
        raise ResolutionError(
            f"grid has n_theta = {grid.n_theta}, need at least {needed} "
            f"for k = {params.k}, s = {params.s}, J = {f.J}"
        )
    t = grid.cos_nodes
    f_values = f.coeffs @ legendre_pn_table(f.J, 3, t)
    cb, sb = np.cos(x_colatitude), np.sin(x_colatitude)
    cos_angle = cb * t[:, None] + sb * np.sqrt(np.maximum(0.0, 1.0 - t * t))[:, None] * np.cos(grid.phi)[None, :]
    kernel_values = kernel_eval(np.arccos(np.clip(cos_angle, -1.0, 1.0)), params)
    phi_mean = kernel_values.mean(axis=1)
    return float((grid.cos_weights * f_values) @ phi_mean)


def translate_direct(f: ZonalFunction, theta: float, x_colatitude: float,
                     n_phi: int | None = None) -> float:
    """Average f over the circle of geodesic radius theta around x.

    Parameterizing the circle by azimuth phi, the pole-angle cosine is
    cos(theta) cos(beta) + sin(theta) sin(beta) cos(phi); the integrand is a
    trigonometric polynomial of degree J in phi, so a uniform grid with
    n_phi > J is exact.
    """
    _require_sphere(f)
    if not 0.0 < theta < np.pi:
        raise DomainError(f"theta must lie in (0, pi), got {theta!r}")
    if n_phi is None:
        n_phi = 2 * f.J + 16
    phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    dots = np.cos(theta) * np.cos(x_colatitude) + np.sin(theta) * np.sin(x_colatitude) * np.cos(phi)
    values = f.coeffs @ legendre_pn_table(f.J, 3, dots)
    return float(values.mean())


def laplacian_radial_fd(f: ZonalFunction, theta: float, h: float = 1e-4) -> float:
    """Central-difference Laplace-Beltrami of a zonal profile at angle theta.

    Uses the radial formula g''(theta) + (n-2) cot(theta) g'(theta); any n.
    """
    if not h > 0:
        raise ValidationError(f"step h must be positive, got {h!r}")
    if not 2 * h < theta < np.pi - 2 * h:
        raise DomainError(f"theta must lie in (2h, pi - 2h) for the stencil, got {theta!r}")
    stencil = evaluate(f, np.array([theta - h, theta, theta + h]))
    second = (stencil[0] - 2.0 * stencil[1] + stencil[2]) / (h * h)
    first = (stencil[2] - stencil[0]) / (2.0 * h)
    return float(second + (f.n - 2) * first / np.tan(theta))
