"""Mode-by-mode linear stability of the target states via boundary perturbations.

Deforming each circular boundary with a Fourier mode m and linearizing the
induced boundary velocities yields a 6x6 rate matrix acting on the vector of
normal/tangential amplitudes (outer, middle, inner boundary).  Tangential
columns vanish, so at least three eigenvalues are structurally zero; the
nontrivial ones are the roots of a quadratic (m = 1) or cubic (m >= 2) whose
closed forms are implemented alongside the matrix and cross-checked against
the eigensolver on every evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary_integrals import PerturbedDisk, attraction_integral, repulsion_integral
from .equilibria import EquilibriumKind, build_equilibrium
from .errors import EquilibriumMissing, SpectrumMismatch
from .model import (
    InteractionParams,
    PhasePoint,
    RegionId,
    classify_region,
    to_phase_point,
)

#: |Re lambda| below this multiple of ||Q||_F is reported as marginal, never stable.
MARGINAL_BAND = 1e-9

#: Relative tolerance of the eigensolver vs closed-form root cross-check.
CROSSCHECK_RTOL = 1e-8

DEFAULT_M_MAX = 32

_NESTING_NOTE = (
    "stable-mode regions are nested (mode n stable implies every mode > n stable "
    "at the same point), so modes beyond m_max cannot flip an all-stable verdict"
)


@dataclass(frozen=True)
class ModeSpectrum:
    """Spectrum of the mode-m boundary-perturbation matrix."""

    kind: EquilibriumKind
    m: int
    Q: np.ndarray
    eigenvalues: np.ndarray
    nontrivial: np.ndarray
    verdict: str


@dataclass(frozen=True)
class StabilityReport:
    """Per-mode verdicts up to m_max with the overall classification."""

    kind: EquilibriumKind
    m_max: int
    modes: tuple[ModeSpectrum, ...]
    overall: str
    dominant_unstable_mode: int | None
    guarantee: str = _NESTING_NOTE

    def verdict_of(self, m: int) -> str:
        return self.modes[m - 1].verdict


def _target_geometry(a_s, a_c, b_s, b_c, M1, M2):
    """Radii and densities of the light-inside target for raw coefficients."""
    r2 = math.sqrt(a_s * M2 / (b_c * M1 + b_s * M2))
    r1 = math.sqrt(a_c * M2 / (b_s * M1 + b_c * M2))
    r0 = math.sqrt((a_s * M1 + a_c * M2) / (b_s * M1 + b_c * M2))
    rho1 = (b_s * M1 + b_c * M2) / (math.pi * a_s)
    rho2 = (b_c * M1 + b_s * M2) / (math.pi * a_s)
    return r2, r1, r0, rho1, rho2


def _q_light_raw(a_s, a_c, b_s, b_c, M1, M2, m):
    r2, r1, r0, rho1, rho2 = _target_geometry(a_s, a_c, b_s, b_c, M1, M2)
    pi = math.pi
    Q = np.zeros((6, 6))
    if m == 1:
        Q[0, 0] = -a_s * pi * rho1 + b_s * rho1 * pi * r0**2
        Q[0, 2] = -a_s * rho1 * pi * (r1 / r0) ** 3 - b_s * rho1 * pi * r1**3 / r0
        Q[0, 4] = M2 * a_c * r2 / r0**3 + M2 * b_c * r2 / r0
        Q[1, 0] = a_s * pi * rho1 - b_s * rho1 * pi * r0**2
        Q[1, 2] = -a_s * pi * rho1 * (r1 / r0) ** 3 + b_s * rho1 * pi * r1**3 / r0
        Q[1, 4] = M2 * a_c * r2 / r0**3 - M2 * b_c * r2 / r0
        Q[2, 0] = -a_s * pi * rho1 * r0 / r1 + b_s * rho1 * pi * r0**3 / r1
        Q[2, 2] = -a_s * pi * rho1 - b_s * rho1 * pi * r1**2
        Q[2, 4] = M2 * a_c * r2 / r1**3 + b_c * M2 * r2 / r1
        Q[3, 0] = a_s * pi * rho1 * r0 / r1 - b_s * rho1 * pi * r0**3 / r1
        Q[3, 2] = -a_s * pi * rho1 + b_s * pi * rho1 * r1**2
        Q[3, 4] = M2 * a_c * r2 / r1**3 - M2 * b_c * r2 / r1
        Q[4, 0] = -a_c * pi * rho1 * r0 / r2 + b_c * pi * rho1 * r0**3 / r2
        Q[4, 2] = a_c * pi * rho1 * r1 / r2 - b_c * rho1 * pi * r1**3 / r2
        Q[4, 4] = -M1 * b_c
        Q[5, 0] = a_c * pi * rho1 * r0 / r2 - b_c * rho1 * pi * r0**3 / r2
        Q[5, 2] = -a_c * pi * rho1 * r1 / r2 + b_c * rho1 * pi * r1**3 / r2
        Q[5, 4] = M1 * b_c
        return Q
    s1 = a_s * pi * rho1
    s2 = a_s * pi * rho2
    c1 = a_c * pi * rho1
    c2 = a_c * pi * rho2
    Q[0, 0] = -s1
    Q[0, 2] = -s1 * (r1 / r0) ** (m + 2)
    Q[0, 4] = c2 * (r2 / r0) ** (m + 2)
    Q[1, 0] = s1
    Q[1, 2] = -s1 * (r1 / r0) ** (m + 2)
    Q[1, 4] = c2 * (r2 / r0) ** (m + 2)
    Q[2, 0] = -s1 * (r1 / r0) ** (m - 2)
    Q[2, 2] = -s1
    Q[2, 4] = c2 * (r2 / r1) ** (m + 2)
    Q[3, 0] = s1 * (r1 / r0) ** (m - 2)
    Q[3, 2] = -s1
    Q[3, 4] = c2 * (r2 / r1) ** (m + 2)
    Q[4, 0] = -c1 * (r2 / r0) ** (m - 2)
    Q[4, 2] = c1 * (r2 / r1) ** (m - 2)
    Q[4, 4] = -s2
    Q[5, 0] = c1 * (r2 / r0) ** (m - 2)
    Q[5, 2] = -c1 * (r2 / r1) ** (m - 2)
    Q[5, 4] = s2
    return Q


def _require_target(kind: EquilibriumKind, p: InteractionParams):
    kind = EquilibriumKind(kind)
    if kind not in (EquilibriumKind.TARGET_LIGHT_IN, EquilibriumKind.TARGET_HEAVY_IN):
        raise EquilibriumMissing(f"boundary perturbation analysis covers targets only, not {kind}")
    cfg = build_equilibrium(kind, p)
    if not cfg.exists:
        raise EquilibriumMissing(f"{kind.value} does not exist here: {cfg.reason}")
    return kind


def build_Q(kind: EquilibriumKind, p: InteractionParams, m: int) -> np.ndarray:
    """Mode-m rate matrix for a target state.

    Rows/columns follow the boundary order (outer, middle, inner), normal
    then tangential amplitude each.  The heavy-inside matrix is the
    light-inside one with the species masses interchanged, which reorders the
    middle/inner roles accordingly.
    """
    kind = _require_target(kind, p)
    if m < 1:
        raise ValueError(f"mode must be >= 1, got {m}")
    if kind is EquilibriumKind.TARGET_LIGHT_IN:
        return _q_light_raw(p.a_s, p.ac_eff, p.b_s, p.bc_eff, p.M1, p.M2, m)
    return _q_light_raw(p.a_s, p.ac_eff, p.b_s, p.bc_eff, p.M2, p.M1, m)


def mode1_quadratic(kind: EquilibriumKind, q: PhasePoint, scale: float) -> tuple[tuple[float, float, float], np.ndarray]:
    """Coefficients (1, c1, c0) and roots of the mode-1 reduced quadratic.

    ``scale`` is b_s * M2 in physical units; both roots are real, one always
    negative, the other negative exactly when B > A.
    """
    kind = EquilibriumKind(kind)
    A, B, M = q.A, q.B, q.M
    if kind is EquilibriumKind.TARGET_LIGHT_IN:
        lin = scale * (M + 2.0 * B + M * B)
        const = -(scale**2) * M * (M + 1.0) * (A - B) * (M + B) / (M + A)
    else:
        lin = scale * (1.0 + B + 2.0 * M * B)
        const = -(scale**2) * (M + 1.0) * (A - B) * (1.0 + M * B) / (1.0 + M * A)
    disc = math.sqrt(lin * lin - 4.0 * const)
    roots = np.array([(-lin - disc) / 2.0, (-lin + disc) / 2.0])
    return (1.0, lin, const), roots


def char_poly_cubic(kind: EquilibriumKind, q: PhasePoint, m: int):
    """Normalized cubic (in mu = lambda/scale) whose roots are the nontrivial rates.

    Returns ((c2, c1, c0), P) with P a polynomial evaluator; multiply roots
    by ``cubic_scale`` to recover physical rates.  The heavy-inside cubic is
    the light-inside one under M -> 1/M.
    """
    kind = EquilibriumKind(kind)
    if m < 2:
        raise ValueError("the cubic covers modes m >= 2")
    A, B = q.A, q.B
    M_eff = q.M if kind is EquilibriumKind.TARGET_LIGHT_IN else 1.0 / q.M
    C = (M_eff + B) / (1.0 + M_eff * B)
    ratio = (A / (M_eff + A)) ** m
    c2 = 2.0 + 1.0 / C
    c1 = 2.0 / C + (1.0 - A * (C / A) ** (m - 1)) * (1.0 - ratio)
    c0 = (1.0 / C) * (1.0 - A * A * (C / A) ** m) * (1.0 - ratio)

    def P(mu):
        return ((mu + c2) * mu + c1) * mu + c0

    return (c2, c1, c0), P


def cubic_scale(kind: EquilibriumKind, p: InteractionParams) -> float:
    """lambda = scale * mu conversion factor: pi a_s times the annulus density."""
    kind = EquilibriumKind(kind)
    rho_annulus = (
        (p.b_s * p.M1 + p.bc_eff * p.M2)
        if kind is EquilibriumKind.TARGET_LIGHT_IN
        else (p.bc_eff * p.M1 + p.b_s * p.M2)
    ) / (math.pi * p.a_s)
    return math.pi * p.a_s * rho_annulus


def closed_form_rates(kind: EquilibriumKind, p: InteractionParams, m: int) -> np.ndarray:
    """Nontrivial eigenvalues from the reduced quadratic/cubic closed forms."""
    q = to_phase_point(p)
    if m == 1:
        _, roots = mode1_quadratic(kind, q, p.b_s * p.M2)
        return roots.astype(complex)
    (c2, c1, c0), _ = char_poly_cubic(kind, q, m)
    return np.roots([1.0, c2, c1, c0]) * cubic_scale(kind, p)


def P_minus_one_identity(q: PhasePoint, m: int) -> float:
    """Closed value of the light-inside cubic at mu = -1."""
    C = (q.M + q.B) / (1.0 + q.M * q.B)
    return (1.0 - 1.0 / C) * (q.A / (q.M + q.A)) ** m


def P_minus_inv_C_identity(q: PhasePoint, m: int) -> float:
    """Closed value of the light-inside cubic at mu = -1/C."""
    C = (q.M + q.B) / (1.0 + q.M * q.B)
    return (1.0 - C) * (C / q.A) ** (m - 2) * (1.0 - (q.A / (q.M + q.A)) ** m)


def _match_roots(eigs: np.ndarray, roots: np.ndarray) -> float:
    """Greedy max pairwise distance between two equally sized complex sets."""
    eigs = sorted(eigs, key=lambda z: (z.real, z.imag))
    roots = sorted(roots, key=lambda z: (z.real, z.imag))
    return max(abs(e - r) for e, r in zip(eigs, roots))


def mode_spectrum(kind: EquilibriumKind, p: InteractionParams, m: int) -> ModeSpectrum:
    """Assemble Q, compute its spectrum, and classify the mode.

    The n largest-magnitude eigenvalues (2 for m = 1, 3 otherwise) are the
    nontrivial ones; they are verified against the closed-form polynomial
    roots and any discrepancy beyond 1e-8 relative raises SpectrumMismatch.
    Rates within the marginal band around zero give a "marginal" verdict.
    """
    kind = EquilibriumKind(kind)
    Q = build_Q(kind, p, m)
    eigs = np.linalg.eigvals(Q)
    n_nontrivial = 2 if m == 1 else 3
    order = np.argsort(-np.abs(eigs))
    nontrivial = eigs[order[:n_nontrivial]]
    trivial = eigs[order[n_nontrivial:]]
    norm_q = float(np.linalg.norm(Q))
    band = MARGINAL_BAND * norm_q
    if np.max(np.abs(trivial)) > band:
        raise SpectrumMismatch(
            f"expected {6 - n_nontrivial} structurally zero eigenvalues at mode {m}"
        )

    reference = closed_form_rates(kind, p, m)
    scale = max(np.max(np.abs(reference)), norm_q * 1e-3)
    if _match_roots(nontrivial, reference) > CROSSCHECK_RTOL * scale:
        raise SpectrumMismatch(
            f"eigensolver and closed-form roots disagree at mode {m}: "
            f"{np.sort_complex(nontrivial)} vs {np.sort_complex(reference)}"
        )

    re = nontrivial.real
    if np.all(re < -band):
        verdict = "stable"
    elif np.any(re > band):
        verdict = "unstable"
    else:
        verdict = "marginal"
    return ModeSpectrum(kind, m, Q, eigs, nontrivial, verdict)


class UmRegion:
    """Instability region of boundary mode m for the light-inside target."""

    def __init__(self, m: int, M: float):
        if m < 1:
            raise ValueError("mode must be >= 1")
        self.m = int(m)
        self.M = float(M)

    @property
    def a_max(self) -> float:
        if self.m <= 2:
            return math.inf
        return self.M ** (self.m / (self.m - 2.0))

    def threshold_B(self, A):
        """Upper B boundary of the region at repulsion ratio A (modes >= 2)."""
        A = np.asarray(A, dtype=float)
        if self.m == 1:
            raise ValueError("mode 1 region is D3; it has no single-curve boundary")
        if self.m == 2:
            return np.ones_like(A)
        num = self.M * A ** (2.0 / self.m) - A
        den = self.M * A - A ** (2.0 / self.m)
        return num / den

    def contains(self, A: float, B: float) -> bool:
        region = classify_region(PhasePoint(A=A, B=B, M=self.M))
        if region not in (RegionId.D3, RegionId.D4, RegionId.D5):
            return False
        if self.m == 1:
            return region is RegionId.D3
        if not (1.0 < A < self.a_max):
            return False
        return 0.0 < B < float(self.threshold_B(A))


def region_Um(m: int, M: float) -> UmRegion:
    """Membership predicate and boundary curve of the mode-m instability region."""
    return UmRegion(m, M)


def stability_report(kind: EquilibriumKind, p: InteractionParams, m_max: int = DEFAULT_M_MAX) -> StabilityReport:
    """Classify every boundary mode up to m_max and combine into one verdict.

    Stable overall only when every mode is stable; nesting of the per-mode
    stable regions makes m_max = 32 conclusive for all higher modes.  The
    verdict is cross-checked against the analytic region result (light
    inside: stable exactly on D4 and D5; heavy inside: never stable).
    """
    kind = _require_target(kind, p)
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    modes = tuple(mode_spectrum(kind, p, m) for m in range(1, m_max + 1))
    verdicts = [s.verdict for s in modes]
    if any(v == "unstable" for v in verdicts):
        overall = "unstable"
    elif all(v == "stable" for v in verdicts):
        overall = "stable"
    else:
        overall = "marginal"

    dominant = None
    if overall == "unstable":
        growth = [
            max(s.nontrivial.real) if s.verdict == "unstable" else -math.inf for s in modes
        ]
        dominant = int(np.argmax(growth)) + 1

    if overall != "marginal":
        region = classify_region(to_phase_point(p))
        if not region.is_boundary:
            if kind is EquilibriumKind.TARGET_LIGHT_IN:
                expected = "stable" if region in (RegionId.D4, RegionId.D5) else "unstable"
            else:
                expected = "unstable"
            if overall != expected:
                raise SpectrumMismatch(
                    f"eigenvalue verdict {overall} contradicts the analytic region result "
                    f"{expected} in {region.value}"
                )
    return StabilityReport(kind, m_max, modes, overall, dominant)


# --------------------------------------------------------------------------
# Independent assembly of Q from the perturbed-boundary integrals


def _assembly_geometry(kind: EquilibriumKind, p: InteractionParams):
    """Boundary radii (outer, middle, inner), their species, and shell densities."""
    cfg = build_equilibrium(kind, p)
    if not cfg.exists:
        raise EquilibriumMissing(cfg.reason)
    if kind is EquilibriumKind.TARGET_LIGHT_IN:
        r_core, r_mid, r_out = cfg.radii
        species = (1, 1, 2)  # outer, middle, inner boundary
        rho_ann, rho_core = cfg.shells[1].rho1, cfg.shells[0].rho2
        s_ann, s_core = 1, 2
    else:
        r_core, r_mid, r_out = cfg.radii
        species = (2, 2, 1)
        rho_ann, rho_core = cfg.shells[1].rho2, cfg.shells[0].rho1
        s_ann, s_core = 2, 1
    return (r_out, r_mid, r_core), species, (rho_ann, s_ann), (rho_core, s_core)


def build_Q_from_integrals(
    kind: EquilibriumKind, p: InteractionParams, m: int, theta0: float | None = None, h: float = 0.01
) -> np.ndarray:
    """Reassemble the mode-m matrix from the perturbed-domain integral formulas.

    Independent of the printed matrix entries: boundary velocities are built
    from the first-order attraction/repulsion integrals, the equilibrium
    baseline is subtracted, and the normal/tangential responses are read off
    at angle theta0 (any angle with cos(m theta0) sin(m theta0) != 0).
    """
    kind = _require_target(kind, p)
    if theta0 is None:
        theta0 = math.pi / (4.0 * m)
    radii, species, (rho_ann, s_ann), (rho_core, s_core) = _assembly_geometry(kind, p)
    kernels = {
        True: (p.a_s, p.b_s),  # same species
        False: (p.ac_eff, p.bc_eff),
    }

    def velocity(j, disks):
        x = np.array(
            [disks[j].boundary_point(theta0).real, disks[j].boundary_point(theta0).imag]
        )
        k = species[j]
        a, b = kernels[k == s_ann]
        v = rho_ann * (
            a * (repulsion_integral(disks[j], theta0, disks[0]) - repulsion_integral(disks[j], theta0, disks[1]))
            - b * (attraction_integral(x, disks[0]) - attraction_integral(x, disks[1]))
        )
        a, b = kernels[k == s_core]
        v = v + rho_core * (
            a * repulsion_integral(disks[j], theta0, disks[2]) - b * attraction_integral(x, disks[2])
        )
        return v[0] + 1j * v[1]

    def responses(eps):
        """(eps_N', eps_T') for each boundary j at perturbation state eps (3x2)."""
        disks = tuple(
            PerturbedDisk(R=radii[l], m=m, eps_N=eps[l][0], eps_T=eps[l][1]) for l in range(3)
        )
        out = []
        cos_m, sin_m = math.cos(m * theta0), math.sin(m * theta0)
        for j in range(3):
            w = velocity(j, disks) / (radii[j] * complex(math.cos(theta0), math.sin(theta0)))
            out.extend([w.real / cos_m, w.imag / sin_m])
        return np.array(out)

    base = responses(((0.0, 0.0),) * 3)
    Q = np.zeros((6, 6))
    for col in range(6):
        eps = [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
        eps[col // 2][col % 2] = h
        Q[:, col] = (responses(tuple(tuple(e) for e in eps)) - base) / h
    return Q
