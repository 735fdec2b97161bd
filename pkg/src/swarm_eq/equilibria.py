"""Construction and validation of the four radially symmetric equilibria.

Two "target" states (one species on a central disk, the other on a concentric
annulus, in either mass order) and two "overlap" states (both species on an
inner disk, one species alone on the surrounding annulus).  Radii follow from
the zero-velocity conditions; densities are the admissible piecewise-constant
values.  Existence is decided directly from density positivity and the radius
ordering, which reproduces the phase-plane region unions exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import SampleOutsideSupport
from .model import (
    InteractionParams,
    RegionId,
    _density_quadruple,
    classify_region,
    to_phase_point,
)

#: Relative tolerance under which touching radii count as boundary-degenerate.
DEGENERATE_RTOL = 1e-12


class EquilibriumKind(str, Enum):
    TARGET_LIGHT_IN = "target-light"
    TARGET_HEAVY_IN = "target-heavy"
    OVERLAP_LIGHT_IN = "overlap-light"
    OVERLAP_HEAVY_IN = "overlap-heavy"


#: Region unions in which each equilibrium kind exists.
EXISTENCE_REGIONS = {
    EquilibriumKind.TARGET_LIGHT_IN: (RegionId.D3, RegionId.D4, RegionId.D5),
    EquilibriumKind.TARGET_HEAVY_IN: (RegionId.D2, RegionId.D3, RegionId.D4),
    EquilibriumKind.OVERLAP_LIGHT_IN: (RegionId.D3, RegionId.D6),
    EquilibriumKind.OVERLAP_HEAVY_IN: (RegionId.D1, RegionId.D4),
}


@dataclass(frozen=True)
class Shell:
    """Annulus r_in <= |x| <= r_out carrying constant densities (rho1, rho2)."""

    r_in: float
    r_out: float
    rho1: float
    rho2: float

    def density(self, species: int) -> float:
        return self.rho1 if species == 1 else self.rho2

    @property
    def mass1(self) -> float:
        return self.rho1 * math.pi * (self.r_out**2 - self.r_in**2)

    @property
    def mass2(self) -> float:
        return self.rho2 * math.pi * (self.r_out**2 - self.r_in**2)


@dataclass(frozen=True)
class EquilibriumConfig:
    """One radially symmetric equilibrium ansatz with its existence verdict.

    ``radii`` is ordered inner to outer (three radii for targets, two for
    overlaps).  ``shells`` lists only subdomains with nonzero density, inner
    to outer; it is empty when ``exists`` is False.
    """

    kind: EquilibriumKind
    radii: tuple[float, ...]
    shells: tuple[Shell, ...]
    params: InteractionParams
    exists: bool
    reason: str
    boundary_degenerate: bool = False

    @property
    def densities(self) -> tuple[tuple[float, float], ...]:
        return tuple((s.rho1, s.rho2) for s in self.shells)

    @property
    def outermost_radius(self) -> float:
        return self.radii[-1]

    def support_intervals(self, species: int) -> tuple[tuple[float, float], ...]:
        return tuple(
            (s.r_in, s.r_out) for s in self.shells if s.density(species) > 0.0
        )


def _touching(r_small: float, r_large: float) -> bool:
    return abs(r_large - r_small) <= DEGENERATE_RTOL * max(r_small, r_large)


def build_equilibrium(kind: EquilibriumKind, p: InteractionParams) -> EquilibriumConfig:
    """Construct the equilibrium of the given kind, with existence verdict.

    The verdict comes from the radius ordering and density positivity; the
    ``reason`` string names the phase-plane region when the state does not
    exist.  Radii touching within 1e-12 relative are kept as existing but
    flagged boundary-degenerate.
    """
    kind = EquilibriumKind(kind)
    a_s, a_c = p.a_s, p.ac_eff
    b_s, b_c = p.b_s, p.bc_eff
    M1, M2 = p.M1, p.M2
    region = classify_region(to_phase_point(p))
    required = EXISTENCE_REGIONS[kind]
    region_note = f"point is in {region.value}; existence requires " + " or ".join(
        r.value for r in required
    )

    # single-species densities; the coexistence pair (which is singular at
    # a_s = eta*a_c) is only needed for the overlap kinds below
    rho1_t = (b_s * M1 + b_c * M2) / (math.pi * a_s)
    rho2_t = (b_c * M1 + b_s * M2) / (math.pi * a_s)

    if kind is EquilibriumKind.TARGET_LIGHT_IN:
        r2 = math.sqrt(a_s * M2 / (b_c * M1 + b_s * M2))
        r1 = math.sqrt(a_c * M2 / (b_s * M1 + b_c * M2))
        r0 = math.sqrt((a_s * M1 + a_c * M2) / (b_s * M1 + b_c * M2))
        radii = (r2, r1, r0)
        degenerate = _touching(r2, r1)
        if r2 <= r1 or degenerate:
            shells = (Shell(0.0, r2, 0.0, rho2_t), Shell(r1, r0, rho1_t, 0.0))
            return EquilibriumConfig(kind, radii, shells, p, True, "", degenerate)
        return EquilibriumConfig(kind, radii, (), p, False, f"inner disk exceeds annulus ({region_note})")

    if kind is EquilibriumKind.TARGET_HEAVY_IN:
        r1 = math.sqrt(a_s * M1 / (b_s * M1 + b_c * M2))
        r2 = math.sqrt(a_c * M1 / (b_c * M1 + b_s * M2))
        r0 = math.sqrt((a_c * M1 + a_s * M2) / (b_c * M1 + b_s * M2))
        radii = (r1, r2, r0)
        degenerate = _touching(r1, r2)
        if r1 <= r2 or degenerate:
            shells = (Shell(0.0, r1, rho1_t, 0.0), Shell(r2, r0, 0.0, rho2_t))
            return EquilibriumConfig(kind, radii, shells, p, True, "", degenerate)
        return EquilibriumConfig(kind, radii, (), p, False, f"inner disk exceeds annulus ({region_note})")

    quad = _density_quadruple(a_s, a_c, b_s, b_c, M1, M2)
    rho1_c, rho2_c = quad.coexist

    if kind is EquilibriumKind.OVERLAP_LIGHT_IN:
        r1 = math.sqrt((a_s * M1 + a_c * M2) / (b_s * M1 + b_c * M2))
        denom = (a_s * b_c - a_c * b_s) * M1 + (a_s * b_s - a_c * b_c) * M2
        r2sq = (a_s * a_s - a_c * a_c) * M2 / denom if denom != 0.0 else math.nan
        r2 = math.sqrt(r2sq) if r2sq > 0.0 else math.nan
        radii = (r2, r1)
        if not (rho1_c > 0.0 and rho2_c > 0.0):
            return EquilibriumConfig(
                kind, radii, (), p, False, f"coexistence density nonpositive ({region_note})"
            )
        degenerate = _touching(r2, r1)
        if r2 <= r1 or degenerate:
            shells = (Shell(0.0, r2, rho1_c, rho2_c), Shell(r2, r1, quad.only1[0], 0.0))
            return EquilibriumConfig(kind, radii, shells, p, True, "", degenerate)
        return EquilibriumConfig(kind, radii, (), p, False, f"coexistence disk exceeds outer disk ({region_note})")

    if kind is EquilibriumKind.OVERLAP_HEAVY_IN:
        denom = (a_s * b_s - a_c * b_c) * M1 + (a_s * b_c - a_c * b_s) * M2
        r1sq = (a_s * a_s - a_c * a_c) * M1 / denom if denom != 0.0 else math.nan
        r1 = math.sqrt(r1sq) if r1sq > 0.0 else math.nan
        r2 = math.sqrt((a_c * M1 + a_s * M2) / (b_c * M1 + b_s * M2))
        radii = (r1, r2)
        if not (rho1_c > 0.0 and rho2_c > 0.0):
            return EquilibriumConfig(
                kind, radii, (), p, False, f"coexistence density nonpositive ({region_note})"
            )
        degenerate = _touching(r1, r2)
        if r1 <= r2 or degenerate:
            shells = (Shell(0.0, r1, rho1_c, rho2_c), Shell(r1, r2, 0.0, quad.only2[1]))
            return EquilibriumConfig(kind, radii, shells, p, True, "", degenerate)
        return EquilibriumConfig(kind, radii, (), p, False, f"coexistence disk exceeds outer disk ({region_note})")

    raise AssertionError(f"unhandled kind {kind}")


def mass_integrals(cfg: EquilibriumConfig) -> tuple[float, float]:
    """Per-species mass obtained by integrating density over the shells."""
    return (
        sum(s.mass1 for s in cfg.shells),
        sum(s.mass2 for s in cfg.shells),
    )


def force_scale(cfg: EquilibriumConfig) -> float:
    """Characteristic velocity magnitude used to normalize residuals."""
    p = cfg.params
    return (p.b_s * p.M1 + p.bc_eff * p.M2) * cfg.outermost_radius


def _disk_repulsion_component(r: float, R: float) -> float:
    """e1-component of the disk repulsion integral at x = (r, 0)."""
    if R == 0.0:
        return 0.0
    if r < R:
        return math.pi * r
    return math.pi * R * R / r


def velocity_at_radius(cfg: EquilibriumConfig, species: int, r: float) -> float:
    """Radial velocity of the given species at |x| = r (closed-form disk integrals)."""
    p = cfg.params
    # kernel coefficients acting on rho1 and rho2 respectively
    if species == 1:
        (a1, b1), (a2, b2) = (p.a_s, p.b_s), (p.ac_eff, p.bc_eff)
    else:
        (a1, b1), (a2, b2) = (p.ac_eff, p.bc_eff), (p.a_s, p.b_s)
    v = 0.0
    for s in cfg.shells:
        i_rep = _disk_repulsion_component(r, s.r_out) - _disk_repulsion_component(r, s.r_in)
        i_att = r * math.pi * (s.r_out**2 - s.r_in**2)
        v += s.rho1 * (a1 * i_rep - b1 * i_att) + s.rho2 * (a2 * i_rep - b2 * i_att)
    return v


def velocity_residual(cfg: EquilibriumConfig, sample_radii) -> list[float]:
    """|v_i| at sample radii inside the supports; zero (to rounding) at equilibrium.

    For radii where both species are present the larger of the two residuals
    is reported.  Raises SampleOutsideSupport for radii in no species' support.
    """
    if not cfg.exists:
        raise SampleOutsideSupport("configuration does not exist")
    out = []
    for r in np.atleast_1d(np.asarray(sample_radii, dtype=float)):
        species_here = [
            i
            for i in (1, 2)
            for lo, hi in cfg.support_intervals(i)
            if lo <= r <= hi
        ]
        if not species_here:
            raise SampleOutsideSupport(f"radius {r} is outside both supports")
        out.append(max(abs(velocity_at_radius(cfg, i, r)) for i in species_here))
    return out
