"""Independent numerical ground truth for the closed-form operator results.

Nothing here uses the closed-form coefficient formulas; each routine works
from the defining integral or from plain dense linear algebra.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import gammaln, roots_jacobi

from .basis import disk_quadrature
from .errors import NotSPDError, ResolutionError

__all__ = [
    "QuadratureSpec",
    "riesz_constant",
    "riesz_quadrature",
    "fd_gradient",
    "dense_solve",
    "dense_eigenvalues",
    "disk_integral",
    "weighted_l2_norm",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts for :func:`riesz_quadrature`.

    ``radial_nodes`` is used on each radial piece; ``singularity_split_radius``
    is where a ray is cut into the piece carrying the kernel singularity and
    the piece carrying the boundary singularity (0 disables the split).
    """

    radial_nodes: int = 400
    angular_nodes: int = 128
    singularity_split_radius: float = 0.25

    def __post_init__(self):
        if self.radial_nodes < 4 or self.angular_nodes < 4:
            raise ValueError("quadrature needs at least 4 nodes per direction")
        if self.singularity_split_radius < 0:
            raise ValueError("split radius must be nonnegative")


def riesz_constant(order):
    """gamma_2(order) = 2^order pi Gamma(order/2) / Gamma((2 - order)/2)."""
    return 2.0 ** order * math.pi * math.exp(gammaln(order / 2.0) - gammaln((2.0 - order) / 2.0))


def _jacobi_rule(n, a, b, lo, hi):
    # Gauss-Jacobi on [lo, hi] for weight (hi - s)^a (s - lo)^b, returned with that weight folded in
    t, w = roots_jacobi(n, a, b)
    half = 0.5 * (hi - lo)
    s = lo[..., None] + half[..., None] * (1.0 + t)
    return s, w * half[..., None] ** (1.0 + a + b)


def riesz_quadrature(g, alpha, point, spec=QuadratureSpec(), weight_exponent=0.0):
    """Riesz potential of order 2 - alpha in the plane, by direct quadrature.

    Computes (1 / gamma_2(2 - alpha)) * int f(p - y) |y|^(-alpha) dy for
    f(x) = (1 - |x|^2)_+^weight_exponent * g(x), with g smooth on the closed
    disk.  Polar coordinates centred at p turn the kernel into rho^(1-alpha);
    along each ray 1 - |x|^2 = (R - rho)(rho + R'), so Gauss-Jacobi rules
    matched to rho^(1-alpha) at the centre and (R - rho)^w at the boundary
    leave only smooth integrands.  The angular rule is the periodic trapezoid.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")
    if weight_exponent <= -1:
        raise ValueError("boundary weight exponent must exceed -1")
    px, py = map(float, point)
    rho_p2 = px * px + py * py
    if 1.0 - math.sqrt(rho_p2) < 1e-6:
        raise ResolutionError("evaluation point too close to the disk boundary")

    theta = 2.0 * math.pi * np.arange(spec.angular_nodes) / spec.angular_nodes
    ex, ey = np.cos(theta), np.sin(theta)
    pe = px * ex + py * ey
    root = np.sqrt(pe * pe + 1.0 - rho_p2)
    reach = pe + root          # ray p - rho e leaves the disk at rho = reach
    back = root - pe           # 1 - |x|^2 = (reach - rho)(rho + back)
    w_exp = weight_exponent
    kernel = 1.0 - alpha

    def smooth_part(rho, with_kernel, with_boundary):
        x = px - rho * ex[:, None]
        y = py - rho * ey[:, None]
        val = np.asarray(g(x, y), dtype=float) * (rho + back[:, None]) ** w_exp
        if with_kernel:
            val = val * rho ** kernel
        if with_boundary:
            val = val * np.maximum(reach[:, None] - rho, 0.0) ** w_exp
        return val

    zero = np.zeros_like(reach)
    n = spec.radial_nodes
    if spec.singularity_split_radius > 0:
        cut = np.minimum(spec.singularity_split_radius, 0.5 * reach)
        rho_in, w_in = _jacobi_rule(n, 0.0, kernel, zero, cut)
        rho_out, w_out = _jacobi_rule(n, w_exp, 0.0, cut, reach)
        radial = (np.sum(w_in * smooth_part(rho_in, False, True), axis=1)
                  + np.sum(w_out * smooth_part(rho_out, True, False), axis=1))
    else:
        rho, w = _jacobi_rule(n, w_exp, kernel, zero, reach)
        radial = np.sum(w * smooth_part(rho, False, False), axis=1)
    integral = radial.sum() * (2.0 * math.pi / spec.angular_nodes)
    return integral / riesz_constant(2.0 - alpha)


def fd_gradient(f, x, y, h=1e-5):
    """Central-difference gradient of a scalar sampler f(x, y)."""
    fx = (f(x + h, y) - f(x - h, y)) / (2.0 * h)
    fy = (f(x, y + h) - f(x, y - h)) / (2.0 * h)
    return fx, fy


def _check_symmetric(matrix):
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(matrix, matrix.T, rtol=0, atol=1e-14 * max(1.0, np.abs(matrix).max())):
        raise NotSPDError("matrix is not symmetric")
    return matrix


def dense_solve(matrix, rhs):
    """Cholesky solve of a small SPD system."""
    matrix = _check_symmetric(matrix)
    try:
        factor = scipy.linalg.cho_factor(matrix)
    except np.linalg.LinAlgError as exc:
        raise NotSPDError(str(exc)) from exc
    return scipy.linalg.cho_solve(factor, np.asarray(rhs, dtype=float))


def dense_eigenvalues(matrix):
    """Ascending eigenvalues of a symmetric matrix."""
    return scipy.linalg.eigvalsh(_check_symmetric(matrix))


def disk_integral(g, beta, radial_nodes=64, angular_nodes=128):
    """int_disk g (1 - r^2)^beta dA by tensor Gauss-Jacobi / trapezoid quadrature."""
    x, y, w = disk_quadrature(beta, radial_nodes, angular_nodes)
    return float(np.dot(w, np.asarray(g(x, y), dtype=float)))


def weighted_l2_norm(g, beta, radial_nodes=64, angular_nodes=128):
    return math.sqrt(disk_integral(lambda x, y: np.asarray(g(x, y)) ** 2, beta,
                                   radial_nodes, angular_nodes))
