import numpy as np
import pytest

from conftest import draw_phase_in_regions, params_from_phase
from swarm_eq.equilibria import EXISTENCE_REGIONS, EquilibriumKind
from swarm_eq.linear_stability import stability_report
from swarm_eq.model import PhasePoint, RegionId, classify_region
from swarm_eq.sweeps import (
    cell_centered_axis,
    existence_region_mask,
    max_workers,
    region_code_grid,
    target_verdict_grid,
)

LIGHT = EquilibriumKind.TARGET_LIGHT_IN
HEAVY = EquilibriumKind.TARGET_HEAVY_IN

_NAME_TO_CODE = {f"D{k}": k for k in range(1, 7)}


def test_region_grid_matches_pointwise_classify(rng):
    A = rng.uniform(0.05, 5.0, size=400)
    B = rng.uniform(0.05, 5.0, size=400)
    codes = region_code_grid(A, B, 2.0)
    for a, b, code in zip(A, B, codes):
        tag = classify_region(PhasePoint(a, b, 2.0))
        expected = 0 if tag.is_boundary else _NAME_TO_CODE[tag.value]
        assert code == expected


def test_cell_centered_axis():
    ax = cell_centered_axis(10, 0.0, 5.0)
    assert len(ax) == 10
    assert ax[0] == pytest.approx(0.25)
    assert ax[-1] == pytest.approx(4.75)


def test_existence_mask_matches_regions():
    codes = np.array([1, 2, 3, 4, 5, 6, 0], dtype=np.int8)
    mask = existence_region_mask(LIGHT, codes)
    np.testing.assert_array_equal(mask, [False, False, True, True, True, False, False])


def test_grid_verdicts_match_full_spectra(rng):
    # dual-route reconciliation: vectorized cubic sweep vs per-point 6x6 route
    for kind, regions in ((LIGHT, EXISTENCE_REGIONS[LIGHT]), (HEAVY, EXISTENCE_REGIONS[HEAVY])):
        pts = draw_phase_in_regions(rng, regions, n=8)
        A = np.array([a for a, _ in pts])
        B = np.array([b for _, b in pts])
        grid_v = target_verdict_grid(kind, A, B, 2.0, m_max=12)
        for (a, b), v in zip(pts, grid_v):
            rep = stability_report(kind, params_from_phase(a, b), m_max=12)
            expected = {"stable": 1, "unstable": -1, "marginal": 0}[rep.overall]
            assert v == expected, (kind, a, b)


def test_thread_cap_does_not_change_results(monkeypatch):
    ax = cell_centered_axis(40)
    A, B = np.meshgrid(ax, ax, indexing="ij")
    monkeypatch.delenv("SWARM_EQ_THREADS", raising=False)
    serial = target_verdict_grid(LIGHT, A, B, 2.0, m_max=8)
    monkeypatch.setenv("SWARM_EQ_THREADS", "3")
    assert max_workers() == 3
    threaded = target_verdict_grid(LIGHT, A, B, 2.0, m_max=8)
    np.testing.assert_array_equal(serial, threaded)
    monkeypatch.setenv("SWARM_EQ_THREADS", "not-a-number")
    assert max_workers() == 1
