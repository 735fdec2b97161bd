"""Species separation under weak cross-interactions.

When the cross kernel is scaled by a small eta, each species relaxes fast to
a uniform disk of radius R = sqrt(a_s/b_s) and the disks then drift apart on
the slow timescale until the cross forces balance.  The equilibrium
centre-of-mass separation d obeys closed or implicit relations in the single
ratio A/B: full mixing for A/B <= 1, an implicit overlap branch for
1 < A/B < 4, and d/R = sqrt(A/B) for A/B >= 4.  Mass ratios never enter.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .errors import BracketingFailure, OutOfRange
from .model import InteractionParams
from .quadrature import disk_repulsion_batch

#: Solutions on the implicit branch must satisfy the relation to this residual.
RESIDUAL_TOL = 1e-10

#: Points used by the startup monotonicity scan of the implicit branch.
MONOTONE_SCAN_POINTS = 201


@dataclass(frozen=True)
class SeparationSolution:
    """Separation d/R at a repulsion/attraction ratio A/B, with its regime."""

    ratio_AB: float
    d_over_R: float
    regime: str
    residual: float


def _edge_log_integral(r: float) -> float:
    """Integral of ln(1 + r^2 - 2 r cos t) cos t over the lens edge window."""
    gamma = math.acos(min(1.0, r / 2.0))
    if gamma == 0.0:
        return 0.0

    def integrand(t):
        # argument vanishes at t = 0 when r = 1: integrable log singularity
        arg = max(1.0 + r * r - 2.0 * r * math.cos(t), 1e-300)
        return math.log(arg) * math.cos(t)

    with warnings.catch_warnings():
        # the graded rule reaches ~1e-13 absolute; quadpack still warns about
        # roundoff when pushed this hard near the r = 1 singularity
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(
            integrand, -gamma, gamma, points=[0.0], epsabs=1e-12, epsrel=1e-10, limit=300
        )
    return val


def ab_ratio_of_d(d_over_R: float) -> float:
    """Ratio A/B at which two unit-radius species disks equilibrate at separation d.

    Small branch for d <= R, overlap branch for R < d <= 2R; the two agree at
    the seam.  Raises OutOfRange outside (0, 2].
    """
    r = float(d_over_R)
    if not (0.0 < r <= 2.0):
        raise OutOfRange(f"d/R must lie in (0, 2], got {r}")
    gamma = math.acos(r / 2.0)
    lens = gamma - (r / 4.0) * math.sqrt(4.0 - r * r)
    log_term = _edge_log_integral(r)
    if r <= 1.0:
        denom = math.pi * r + r * lens + 0.5 * log_term
        return math.pi * r / denom
    denom = 1.0 + (r * r / math.pi) * lens + (r / (2.0 * math.pi)) * log_term
    return r * r / denom


@lru_cache(maxsize=1)
def _monotone_scan():
    """Verify (once) that ab_ratio_of_d increases on (0, 2); return the samples."""
    ds = np.linspace(1e-6, 2.0, MONOTONE_SCAN_POINTS)
    vals = np.array([ab_ratio_of_d(d) for d in ds])
    diffs = np.diff(vals)
    if np.any(diffs <= 0.0):
        i = int(np.argmin(diffs))
        raise BracketingFailure(
            f"separation relation not monotone on d/R in [{ds[i]:.6f}, {ds[i+1]:.6f}]"
        )
    return ds, vals


def d_of_ab_ratio(ratio_AB: float) -> SeparationSolution:
    """Equilibrium separation d/R for a given A/B.

    d = 0 exactly for ratios at or below the mixing threshold 1 (the regime
    tag distinguishes below-threshold from at-threshold); the overlap range
    (1, 4) is solved by bracketed root finding on the implicit relation, with
    monotonicity verified by a startup scan; sqrt(A/B) beyond 4.
    """
    ratio = float(ratio_AB)
    if ratio <= 0.0:
        raise OutOfRange(f"A/B must be > 0, got {ratio}")
    if ratio < 1.0:
        return SeparationSolution(ratio, 0.0, "full-mix", 0.0)
    if ratio == 1.0:
        return SeparationSolution(ratio, 0.0, "small", 0.0)
    if ratio >= 4.0:
        d = math.sqrt(ratio)
        return SeparationSolution(ratio, d, "separated" if d > 2.0 else "intermediate", 0.0)
    _monotone_scan()
    d = brentq(lambda x: ab_ratio_of_d(x) - ratio, 1e-9, 2.0, xtol=1e-14, rtol=8.9e-16)
    residual = abs(ab_ratio_of_d(d) - ratio)
    if residual > RESIDUAL_TOL:
        raise BracketingFailure(f"root residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    regime = "small" if d <= 1.0 else "intermediate"
    return SeparationSolution(ratio, d, regime, residual)


def curve_sample(ratio_min: float, ratio_max: float, n_points: int) -> list[SeparationSolution]:
    """Sample the separation curve on a ratio range (monotone non-decreasing)."""
    if not (0.0 < ratio_min < ratio_max):
        raise OutOfRange("need 0 < ratio_min < ratio_max")
    ratios = np.linspace(ratio_min, ratio_max, int(n_points))
    return [d_of_ab_ratio(r) for r in ratios]


def leading_order_densities(p: InteractionParams):
    """Leading-order steady state for weak coupling: one uniform disk per species.

    Returns ((rho1, R), (rho2, R)) with rho_i = b_s M_i / (pi a_s) and
    R = sqrt(a_s/b_s).  Deviations from the coupled two-species densities are
    O(eta); a warning is issued when eta > 0.1.
    """
    if p.eta > 0.1:
        warnings.warn(
            f"leading-order densities assume weak coupling; eta={p.eta} > 0.1",
            stacklevel=2,
        )
    R = math.sqrt(p.a_s / p.b_s)
    rho1 = p.b_s * p.M1 / (math.pi * p.a_s)
    rho2 = p.b_s * p.M2 / (math.pi * p.a_s)
    return (rho1, R), (rho2, R)


def force_balance_residual(d: float, R: float, a_c: float, b_c: float) -> float:
    """Residual of the dimensional force-balance form of the separation relation.

    Zero exactly when d solves the overlap-branch (or small-branch) relation
    for the given coefficients; used to cross-check the ratio form.
    """
    if not (0.0 < d <= 2.0 * R):
        raise OutOfRange(f"d must lie in (0, 2R], got {d}")
    gamma = math.acos(d / (2.0 * R))
    lens = R * R * gamma - (d / 4.0) * math.sqrt(4.0 * R * R - d * d)
    log_term = _edge_log_integral(d / R)
    out = -a_c * math.pi * d * lens - a_c * math.pi * R**3 * 0.5 * log_term + b_c * math.pi**2 * R**4 * d
    if d > R:
        out += -a_c * math.pi**2 * R**4 / d
    else:
        out += -a_c * math.pi**2 * d * R**2
    return out


def cross_condition_residual(
    d_over_R: float, ratio_AB: float, n_r: int = 48, n_t: int = 384
) -> float:
    """Net cross force between two offset uniform disks, by 2-D quadrature.

    Evaluates the double integral of the cross-kernel gradient between unit
    disks at centre separation d (e1 component; the e2 component vanishes by
    symmetry) with a_c = ratio_AB and b_c = 1.  Radial panels are split at
    the second disk's boundary so each integrand piece is smooth.
    """
    d = float(d_over_R)
    a_c, b_c = float(ratio_AB), 1.0
    R = 1.0
    center2 = np.array([d, 0.0])

    nodes, weights = np.polynomial.legendre.leggauss(n_r)
    thetas = (np.arange(n_t) + 0.5) * (2.0 * math.pi / n_t)
    w_theta = 2.0 * math.pi / n_t

    xs, ws = [], []
    for th in thetas:
        # radius where the ray crosses the boundary of the offset disk
        b = d * math.cos(th)
        disc = b * b - (d * d - R * R)
        crossings = []
        if disc > 0.0:
            for root in (b - math.sqrt(disc), b + math.sqrt(disc)):
                if 0.0 < root < R:
                    crossings.append(root)
        segments = [0.0] + sorted(crossings) + [R]
        for lo, hi in zip(segments[:-1], segments[1:]):
            if hi <= lo:
                continue
            r = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
            w = 0.5 * (hi - lo) * weights * r * w_theta
            xs.append(np.column_stack([r * math.cos(th), r * math.sin(th)]))
            ws.append(w)
    X = np.vstack(xs)
    W = np.concatenate(ws)

    rep = disk_repulsion_batch(X, center2, R)
    att = math.pi * R * R * (X - center2[None, :])
    integrand = a_c * rep[:, 0] - b_c * att[:, 0]
    return float(np.sum(W * integrand))
