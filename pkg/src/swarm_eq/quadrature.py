"""Adaptive and panel quadrature helpers backing the independent oracles.

All routines here evaluate defining integrals numerically (polar rays around
the evaluation point, periodic trapezoid rules, graded panels at integrable
log singularities) and deliberately avoid the closed forms they are used to
verify.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from .errors import QuadratureNonConvergence

_QUAD_KW = dict(epsabs=1e-12, epsrel=1e-11, limit=200)


def _ray_disk_bounds(x, center, R, phi):
    """Intersection interval [t_lo, t_hi] of the ray x + t*(cos phi, sin phi) with the disk."""
    ex, ey = math.cos(phi), math.sin(phi)
    dx, dy = center[0] - x[0], center[1] - x[1]
    b = ex * dx + ey * dy
    c = dx * dx + dy * dy - R * R
    disc = b * b - c
    if disc <= 0.0:
        return None
    root = math.sqrt(disc)
    t_lo, t_hi = b - root, b + root
    if t_hi <= 0.0:
        return None
    return (max(t_lo, 0.0), t_hi)


def disk_kernel_integral(x, center, R, a_log, b_quad):
    """Integral of -a_log*ln|x-y| + (b_quad/2)|x-y|^2 over the disk |y-center| < R.

    Nested adaptive quadrature in polar coordinates around x; the radial
    integrand r*(-a ln r + b r^2/2) is continuous at r = 0, so interior
    points need no special handling.
    """
    x = (float(x[0]), float(x[1]))
    center = (float(center[0]), float(center[1]))

    def radial(phi):
        bounds = _ray_disk_bounds(x, center, R, phi)
        if bounds is None:
            return 0.0
        t_lo, t_hi = bounds

        def f(r):
            if r == 0.0:
                return 0.0
            return r * (-a_log * math.log(r) + 0.5 * b_quad * r * r)

        val, _ = quad(f, t_lo, t_hi, **_QUAD_KW)
        return val

    dist = math.hypot(x[0] - center[0], x[1] - center[1])
    if dist < R:
        val, err = quad(radial, 0.0, 2.0 * math.pi, **_QUAD_KW)
    else:
        # integrand supported on the angular window subtended by the disk
        phi_c = math.atan2(center[1] - x[1], center[0] - x[0])
        half = math.asin(min(1.0, R / dist))
        val, err = quad(radial, phi_c - half, phi_c + half, **_QUAD_KW)
    if not math.isfinite(val):
        raise QuadratureNonConvergence("disk kernel integral did not converge")
    return val


def periodic_trapezoid(f, n=512):
    """Trapezoid rule over [0, 2*pi) for a smooth periodic integrand (spectral accuracy)."""
    theta = np.arange(n) * (2.0 * math.pi / n)
    return np.sum(f(theta)) * (2.0 * math.pi / n)


def quad_complex(f, a, b, points=None, epsabs=1e-12):
    """Adaptive quadrature of a complex-valued integrand."""
    kw = dict(epsabs=epsabs, epsrel=1e-11, limit=400)
    if points is not None:
        kw["points"] = points
    re, _ = quad(lambda t: f(t).real, a, b, **kw)
    im, _ = quad(lambda t: f(t).imag, a, b, **kw)
    return complex(re, im)


def disk_repulsion_batch(X, center, R, n_theta=512):
    """Newtonian repulsion integral of a uniform disk at many points, by ray quadrature.

    Returns an (n, 2) array of  int_{|y-center|<R} (x-y)/|x-y|^2 dy  for the
    rows x of X.  In polar coordinates around x the radial part is exact
    (the integrand reduces to the chord length per direction); the angular
    integral uses a periodic trapezoid rule for interior points and a
    sin-substituted Gauss rule over the visible window for exterior points,
    which removes the square-root edge behavior.
    """
    X = np.asarray(X, dtype=float)
    center = np.asarray(center, dtype=float)
    out = np.zeros_like(X)
    d = X - center[None, :]
    dist = np.hypot(d[:, 0], d[:, 1])
    inside = dist < R

    if np.any(inside):
        Xi = X[inside]
        theta = np.arange(n_theta) * (2.0 * math.pi / n_theta)
        e = np.stack([np.cos(theta), np.sin(theta)], axis=1)  # (t, 2)
        delta = center[None, :] - Xi  # (n, 2)
        b = delta @ e.T  # (n, t)
        c = np.sum(delta * delta, axis=1)[:, None] - R * R
        root = np.sqrt(np.maximum(b * b - c, 0.0))
        chord = b + root  # t_hi, t_lo = 0 for interior points
        # integral = -sum_phi e(phi) * chord(phi) dphi  (sign: integrand is (x-y)/|x-y|^2)
        w = 2.0 * math.pi / n_theta
        out[inside] = -w * (chord @ e)

    outside = ~inside
    if np.any(outside):
        Xo = X[outside]
        delta = center[None, :] - Xo
        dist_o = np.hypot(delta[:, 0], delta[:, 1])
        phi_c = np.arctan2(delta[:, 1], delta[:, 0])
        half = np.arcsin(np.clip(R / dist_o, 0.0, 1.0))
        # phi = phi_c + half*sin(u), u in [-pi/2, pi/2]
        n_u = 64
        u, wu = np.polynomial.legendre.leggauss(n_u)
        u = 0.5 * math.pi * u
        wu = 0.5 * math.pi * wu
        phi = phi_c[:, None] + half[:, None] * np.sin(u)[None, :]  # (n, u)
        jac = half[:, None] * np.cos(u)[None, :]
        ex, ey = np.cos(phi), np.sin(phi)
        b = delta[:, 0:1] * ex + delta[:, 1:2] * ey
        c = (dist_o**2 - R * R)[:, None]
        root = np.sqrt(np.maximum(b * b - c, 0.0))
        t_lo = np.maximum(b - root, 0.0)
        t_hi = b + root
        chord = np.maximum(t_hi - t_lo, 0.0)
        common = chord * jac * wu[None, :]
        out[outside, 0] = -np.sum(common * ex, axis=1)
        out[outside, 1] = -np.sum(common * ey, axis=1)

    return out
