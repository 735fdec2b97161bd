"""Vectorized (A, B) grid sweeps: region codes, existence masks, stability verdicts.

These mirror the per-point operations for whole-grid work (phase diagrams,
acceptance sweeps).  Stability verdicts come from the nontrivial rates, i.e.
the closed-form quadratic (mode 1) and the roots of the reduced cubic
(modes >= 2, via stacked companion matrices); the per-point 6x6 route in
``linear_stability`` cross-checks the same numbers on every call, so the two
paths cannot drift apart silently.

The environment variable SWARM_EQ_THREADS caps the worker threads used to
chunk the mode loop (default: serial).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .equilibria import EquilibriumKind
from .model import TAU_REGION

#: Region codes: 0 marks the boundary band, 1..6 the open regions D1..D6.
BOUNDARY = 0

_VERDICT_STABLE = 1
_VERDICT_UNSTABLE = -1
_VERDICT_MARGINAL = 0
_VERDICT_MISSING = -2


def max_workers() -> int:
    raw = os.environ.get("SWARM_EQ_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def region_code_grid(A, B, M: float, tau_region: float = TAU_REGION) -> np.ndarray:
    """Region codes (0..6) for broadcastable arrays of A and B."""
    A, B = np.broadcast_arrays(np.asarray(A, dtype=float), np.asarray(B, dtype=float))
    c1 = (1.0 + M * B) / (B + M)
    c2 = (B + M) / (1.0 + M * B)
    scale = np.maximum(1.0, np.maximum(np.abs(A), np.abs(B)))
    band = tau_region * scale
    near = (np.abs(A - B) <= band) | (np.abs(A - c1) <= band) | (np.abs(A - c2) <= band)

    below = B < A
    code = np.where(
        below,
        np.where(A < c1, 1, np.where(A < c2, 2, 3)),
        np.where(A > c1, 4, np.where(A > c2, 5, 6)),
    )
    return np.where(near, BOUNDARY, code).astype(np.int8)


_EXISTENCE_CODES = {
    EquilibriumKind.TARGET_LIGHT_IN: (3, 4, 5),
    EquilibriumKind.TARGET_HEAVY_IN: (2, 3, 4),
    EquilibriumKind.OVERLAP_LIGHT_IN: (3, 6),
    EquilibriumKind.OVERLAP_HEAVY_IN: (1, 4),
}


def existence_region_mask(kind: EquilibriumKind, region_codes: np.ndarray) -> np.ndarray:
    """Mask of grid points whose region lies in the kind's existence union."""
    codes = _EXISTENCE_CODES[EquilibriumKind(kind)]
    return np.isin(region_codes, codes)


def _cubic_max_real(c2, c1, c0):
    """Max real part of the roots of mu^3 + c2 mu^2 + c1 mu + c0 (vectorized)."""
    k = c2.shape[0]
    comp = np.zeros((k, 3, 3))
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    comp[:, 0, 2] = -c0
    comp[:, 1, 2] = -c1
    comp[:, 2, 2] = -c2
    roots = np.linalg.eigvals(comp)
    return roots.real.max(axis=1)


def target_verdict_grid(
    kind: EquilibriumKind, A, B, M: float, m_max: int = 32, band: float = 1e-9
) -> np.ndarray:
    """Overall stability verdict per grid point for a target state.

    Returns 1 (stable), -1 (unstable), 0 (marginal: some rate inside the band
    and none above it), -2 (state does not exist there).  Rates are in units
    of the natural matrix scale, so ``band`` is relative.
    """
    kind = EquilibriumKind(kind)
    A, B = np.broadcast_arrays(np.asarray(A, dtype=float), np.asarray(B, dtype=float))
    shape = A.shape
    A = A.ravel()
    B = B.ravel()
    codes = region_code_grid(A, B, M).ravel()
    exists = existence_region_mask(kind, codes) & (codes != BOUNDARY)

    verdict = np.full(A.shape, _VERDICT_MISSING, dtype=np.int8)
    if not np.any(exists):
        return verdict.reshape(shape)
    Ae, Be = A[exists], B[exists]

    # mode 1: reduced quadratic, unit b_s M2 scale
    if kind is EquilibriumKind.TARGET_LIGHT_IN:
        lin = M + 2.0 * Be + M * Be
        const = -M * (M + 1.0) * (Ae - Be) * (M + Be) / (M + Ae)
    else:
        lin = 1.0 + Be + 2.0 * M * Be
        const = -(M + 1.0) * (Ae - Be) * (1.0 + M * Be) / (1.0 + M * Ae)
    disc = np.sqrt(lin * lin - 4.0 * const)
    max_re = 0.5 * (-lin + disc)
    scale = np.maximum(1.0, np.abs(lin))
    any_marginal = np.abs(max_re) <= band * scale
    worst = max_re / scale

    M_eff = M if kind is EquilibriumKind.TARGET_LIGHT_IN else 1.0 / M
    C = (M_eff + Be) / (1.0 + M_eff * Be)

    def mode_worst(m):
        ratio = (Ae / (M_eff + Ae)) ** m
        c2 = 2.0 + 1.0 / C
        c1 = 2.0 / C + (1.0 - Ae * (C / Ae) ** (m - 1)) * (1.0 - ratio)
        c0 = (1.0 / C) * (1.0 - Ae * Ae * (C / Ae) ** m) * (1.0 - ratio)
        scale_m = 1.0 + np.abs(c2) + np.abs(c1) + np.abs(c0)
        return _cubic_max_real(c2, c1, c0) / scale_m

    modes = range(2, m_max + 1)
    workers = max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(mode_worst, modes))
    else:
        results = [mode_worst(m) for m in modes]
    for w in results:
        any_marginal |= np.abs(w) <= band
        worst = np.maximum(worst, w)

    v = np.where(worst > band, _VERDICT_UNSTABLE, _VERDICT_STABLE)
    v = np.where((worst <= band) & any_marginal, _VERDICT_MARGINAL, v)
    verdict[exists] = v
    return verdict.reshape(shape)


def heavy_mode2_unstable_grid(A, B, M: float, band: float = 1e-9) -> np.ndarray:
    """Mask where boundary mode 2 of the heavy-inside target is unstable."""
    A, B = np.broadcast_arrays(np.asarray(A, dtype=float), np.asarray(B, dtype=float))
    M_eff = 1.0 / M
    C = (M_eff + B) / (1.0 + M_eff * B)
    ratio = (A / (M_eff + A)) ** 2
    c2 = 2.0 + 1.0 / C
    c1 = 2.0 / C + (1.0 - A * (C / A)) * (1.0 - ratio)
    c0 = (1.0 / C) * (1.0 - A * A * (C / A) ** 2) * (1.0 - ratio)
    worst = _cubic_max_real(c2.ravel(), c1.ravel(), c0.ravel()).reshape(A.shape)
    return worst > band * (1.0 + np.abs(c2) + np.abs(c1) + np.abs(c0))


def um_member_grid(m: int, M: float, A, B) -> np.ndarray:
    """Vectorized membership in the mode-m instability region."""
    A, B = np.broadcast_arrays(np.asarray(A, dtype=float), np.asarray(B, dtype=float))
    codes = region_code_grid(A, B, M)
    in_existence = np.isin(codes, (3, 4, 5))
    if m == 1:
        return in_existence & (codes == 3)
    if m == 2:
        return in_existence & (A > 1.0) & (B < 1.0)
    a_max = M ** (m / (m - 2.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        threshold = (M * A ** (2.0 / m) - A) / (M * A - A ** (2.0 / m))
    return in_existence & (A > 1.0) & (A < a_max) & (B > 0.0) & (B < threshold)


def cell_centered_axis(n: int, lo: float = 0.0, hi: float = 5.0) -> np.ndarray:
    """n cell-centered samples of (lo, hi), the grid used by phase diagrams."""
    edges = np.linspace(lo, hi, n + 1)
    return 0.5 * (edges[:-1] + edges[1:])
