"""First-order integrals over Fourier-perturbed disks, with quadrature oracles.

The perturbed boundary of mode m is  p(theta) = R e^{i theta} (1 +
eps_N cos(m theta) + i eps_T sin(m theta)).  The closed forms here are exact
to first order in the eps amplitudes; each is paired with an oracle that
integrates the defining expression numerically over the true perturbed
domain (exact boundary element, no truncation) so agreement degrades only at
O(eps^2).

Geometric results are returned as (x, y) vectors; the circle-harmonic
contour integrals, which are genuinely complex-valued, return complex.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NearSingularAlpha, ZeroMode
from .quadrature import periodic_trapezoid, quad_complex

#: Amplitudes above this leave the first-order regime the formulas target.
EPS_MAX = 0.05

#: Radius ratios closer to 1 than this must use the same-circle branch.
ALPHA_GUARD = 1e-6


@dataclass(frozen=True)
class PerturbedDisk:
    """Disk of radius R whose boundary carries a mode-m normal/tangential ripple."""

    R: float
    m: int
    eps_N: float = 0.0
    eps_T: float = 0.0

    def __post_init__(self):
        if self.R <= 0.0:
            raise ValueError(f"R must be > 0, got {self.R}")
        if self.m < 1:
            raise ValueError(f"mode m must be >= 1, got {self.m}")
        if max(abs(self.eps_N), abs(self.eps_T)) > EPS_MAX:
            raise ValueError(
                f"amplitudes must satisfy |eps| <= {EPS_MAX} (first-order regime)"
            )

    def boundary_point(self, theta: float) -> complex:
        return (
            self.R
            * cmath.exp(1j * theta)
            * (1.0 + self.eps_N * math.cos(self.m * theta) + 1j * self.eps_T * math.sin(self.m * theta))
        )

    def boundary_derivative(self, theta: float) -> complex:
        m = self.m
        radial = 1.0 + self.eps_N * math.cos(m * theta) + 1j * self.eps_T * math.sin(m * theta)
        ripple = -m * self.eps_N * math.sin(m * theta) + 1j * m * self.eps_T * math.cos(m * theta)
        return self.R * cmath.exp(1j * theta) * (1j * radial + ripple)


def _as_vec(z: complex) -> np.ndarray:
    return np.array([z.real, z.imag])


def attraction_integral(x, disk: PerturbedDisk) -> np.ndarray:
    """First-order integral of (x - y) over the perturbed disk.

    The area perturbation is second order, so the result is x*pi*R^2 except
    for the mode-1 first-moment shift.
    """
    x = np.asarray(x, dtype=float)
    out = math.pi * disk.R**2 * x
    if disk.m == 1:
        out = out - np.array([math.pi * disk.R**3 * disk.eps_N, 0.0])
    return out


def repulsion_integral(probe: PerturbedDisk, theta0: float, domain: PerturbedDisk) -> np.ndarray:
    """First-order Newtonian integral of (x-y)/|x-y|^2 over a perturbed disk.

    The evaluation point is x = probe.boundary_point(theta0); probe and
    domain must carry the same mode.  The three branches (domain strictly
    inside, same circle, strictly outside) reduce to one another in the
    appropriate limits.
    """
    if probe.m != domain.m:
        raise ValueError("probe and domain must use the same Fourier mode")
    m = probe.m
    rj, rl = probe.R, domain.R
    ejn, ejt = probe.eps_N, probe.eps_T
    eln = domain.eps_N
    phase = cmath.exp(1j * theta0)
    cos_m = math.cos(m * theta0)
    sin_m = math.sin(m * theta0)

    if abs(rl - rj) <= ALPHA_GUARD * max(rl, rj):
        val = math.pi * rj * phase * (1.0 + (ejn + ejt) * 1j * sin_m)
        return _as_vec(val)
    if rl < rj:
        beta = rl / rj
        val = (
            math.pi
            * rl
            * phase
            * (
                beta
                + (-beta * ejn + beta ** (m + 1) * eln) * cos_m
                + (beta * ejt + beta ** (m + 1) * eln) * 1j * sin_m
            )
        )
        return _as_vec(val)
    beta = rj / rl
    val = (
        math.pi
        * rl
        * phase
        * (
            beta
            + (beta * ejn - beta ** (m - 1) * eln) * cos_m
            + (beta * ejt + beta ** (m - 1) * eln) * 1j * sin_m
        )
    )
    return _as_vec(val)


def log_contour_integral(alpha: float, mu: int, theta0: float) -> complex:
    """Closed form of the circle-harmonic log integral; valid for any alpha > 0."""
    if mu == 0:
        raise ZeroMode("log contour integral requires mu != 0")
    if alpha <= 0.0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    power = alpha ** abs(mu) if alpha <= 1.0 else alpha ** (-abs(mu))
    return -(2.0 * math.pi / abs(mu)) * cmath.exp(1j * mu * theta0) * power


def rational_contour_integral(alpha: float, mu: int, theta0: float) -> complex:
    """Closed form of the circle-harmonic Poisson-type integral (alpha != 1)."""
    if alpha <= 0.0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if abs(alpha - 1.0) <= ALPHA_GUARD:
        raise NearSingularAlpha(f"alpha={alpha} too close to 1; use the same-circle branch")
    if alpha < 1.0:
        factor = alpha ** abs(mu) / (1.0 - alpha * alpha)
    else:
        factor = alpha ** (-abs(mu)) / (alpha * alpha - 1.0)
    return 2.0 * math.pi * cmath.exp(1j * mu * theta0) * factor


def same_circle_rational_part(R: float, m: int, eps_N: float, eps_T: float, theta0: float) -> complex:
    """First-order rational part when the probe sits on the perturbed circle itself.

    Equals the two-sided alpha -> 1 limit of the distinct-circle expression;
    the apparent pole is compensated by the numerator.
    """
    if m == 1:
        return complex(-(R / 2.0) * math.pi * (eps_N + eps_T), 0.0)
    return -R * math.pi * eps_T * cmath.exp(-1j * (m - 1) * theta0)


# --------------------------------------------------------------------------
# Quadrature oracles


def oracle_log_contour(alpha: float, mu: int, theta0: float, tol: float = 1e-10) -> complex:
    """Numerical value of the defining log integral, with a graded rule at alpha = 1."""
    if mu == 0:
        raise ZeroMode("log contour integral requires mu != 0")

    def f(phi):
        return math.log(1.0 + alpha * alpha - 2.0 * alpha * math.cos(phi)) * cmath.exp(1j * mu * phi)

    points = [0.0] if abs(alpha - 1.0) < 1e-3 else None
    val = quad_complex(f, -math.pi, math.pi, points=points, epsabs=tol)
    return cmath.exp(1j * mu * theta0) * val


def oracle_rational_contour(alpha: float, mu: int, theta0: float, tol: float = 1e-10) -> complex:
    """Numerical value of the defining rational integral (alpha bounded away from 1)."""

    def f(phi):
        return cmath.exp(1j * mu * phi) / (1.0 + alpha * alpha - 2.0 * alpha * math.cos(phi))

    val = quad_complex(f, -math.pi, math.pi, epsabs=tol)
    return cmath.exp(1j * mu * theta0) * val


def perturbed_area(disk: PerturbedDisk, n: int = 4096) -> float:
    """Exact area of the perturbed domain by a contour quadrature."""

    def f(theta):
        p = disk.R * np.exp(1j * theta) * (
            1.0 + disk.eps_N * np.cos(disk.m * theta) + 1j * disk.eps_T * np.sin(disk.m * theta)
        )
        dp = disk.R * np.exp(1j * theta) * (
            1j
            * (1.0 + disk.eps_N * np.cos(disk.m * theta) + 1j * disk.eps_T * np.sin(disk.m * theta))
            + (-disk.m * disk.eps_N * np.sin(disk.m * theta) + 1j * disk.m * disk.eps_T * np.cos(disk.m * theta))
        )
        return 0.5 * (p.real * dp.imag - p.imag * dp.real)

    return periodic_trapezoid(f, n)


def perturbed_moment(disk: PerturbedDisk, n: int = 4096) -> np.ndarray:
    """Exact first moment (integral of y over the domain) by contour quadrature."""

    def fx(theta):
        p = np.vectorize(disk.boundary_point)(theta)
        dp = np.vectorize(disk.boundary_derivative)(theta)
        return 0.5 * p.real**2 * dp.imag

    def fy(theta):
        p = np.vectorize(disk.boundary_point)(theta)
        dp = np.vectorize(disk.boundary_derivative)(theta)
        return -0.5 * p.imag**2 * dp.real

    return np.array([periodic_trapezoid(fx, n), periodic_trapezoid(fy, n)])


def oracle_attraction(x, disk: PerturbedDisk) -> np.ndarray:
    """Attraction integral from the exact area and first moment of the domain."""
    x = np.asarray(x, dtype=float)
    return x * perturbed_area(disk) - perturbed_moment(disk)


def oracle_repulsion(probe: PerturbedDisk, theta0: float, domain: PerturbedDisk,
                     same_boundary: bool | None = None, tol: float = 1e-10) -> np.ndarray:
    """Newtonian integral over the true perturbed domain, via its boundary.

    Gauss' theorem turns the domain integral into -oint ln|x - y| n dS with
    the exact (untruncated) boundary element n dS = -i p'(theta) dtheta.  When
    the probe sits on the integration boundary the integrable log singularity
    at theta = theta0 is handled with a graded adaptive rule.
    """
    x = probe.boundary_point(theta0)
    if same_boundary is None:
        same_boundary = (
            probe.R == domain.R
            and probe.eps_N == domain.eps_N
            and probe.eps_T == domain.eps_T
        )

    def f(theta):
        y = domain.boundary_point(theta)
        ndS = -1j * domain.boundary_derivative(theta)
        return -math.log(abs(x - y)) * ndS

    if same_boundary:
        val = quad_complex(f, theta0 - math.pi, theta0 + math.pi, points=[theta0], epsabs=tol)
    else:
        val = quad_complex(f, 0.0, 2.0 * math.pi, epsabs=tol)
    return _as_vec(val)
