import math

import numpy as np
import pytest

from swarm_eq.errors import OutOfRange
from swarm_eq.model import InteractionParams, equilibrium_densities
from swarm_eq.weak_cross import (
    ab_ratio_of_d,
    cross_condition_residual,
    curve_sample,
    d_of_ab_ratio,
    force_balance_residual,
    leading_order_densities,
)


def test_mixing_threshold_limit():
    assert ab_ratio_of_d(1e-7) == pytest.approx(1.0, abs=1e-6)


def test_tangency_value():
    assert ab_ratio_of_d(2.0) == pytest.approx(4.0, abs=1e-12)


def test_seam_continuity():
    below = ab_ratio_of_d(1.0 - 1e-9)
    above = ab_ratio_of_d(1.0 + 1e-9)
    assert abs(below - above) < 1e-8
    assert abs(ab_ratio_of_d(2.0 - 1e-9) - 4.0) < 1e-8


def test_out_of_range():
    with pytest.raises(OutOfRange):
        ab_ratio_of_d(0.0)
    with pytest.raises(OutOfRange):
        ab_ratio_of_d(2.5)
    with pytest.raises(OutOfRange):
        d_of_ab_ratio(-1.0)


def test_d_of_ratio_values():
    assert d_of_ab_ratio(6.0).d_over_R == pytest.approx(math.sqrt(6.0), abs=1e-12)
    assert d_of_ab_ratio(4.0).d_over_R == pytest.approx(2.0, abs=1e-12)
    assert d_of_ab_ratio(0.5).d_over_R == 0.0
    assert d_of_ab_ratio(0.5).regime == "full-mix"
    assert d_of_ab_ratio(1.0).d_over_R == 0.0
    assert d_of_ab_ratio(1.0).regime == "small"
    sol = d_of_ab_ratio(2.0)
    assert sol.regime == "intermediate"
    assert sol.residual < 1e-10
    assert ab_ratio_of_d(sol.d_over_R) == pytest.approx(2.0, abs=1e-10)
    assert d_of_ab_ratio(6.0).regime == "separated"


def test_curve_monotone_and_endpoints():
    samples = curve_sample(0.5, 8.0, 50)
    ds = [s.d_over_R for s in samples]
    assert all(b - a >= -1e-12 for a, b in zip(ds[:-1], ds[1:]))
    assert samples[0].d_over_R == 0.0
    assert samples[-1].d_over_R == pytest.approx(math.sqrt(8.0), abs=1e-12)


def test_force_form_matches_ratio_form(rng):
    # the dimensional force balance vanishes at the d solving the ratio form
    for _ in range(12):
        d = float(rng.uniform(0.05, 1.95))
        ratio = ab_ratio_of_d(d)
        res = force_balance_residual(d, 1.0, ratio, 1.0)
        assert abs(res) < 1e-10 * max(1.0, ratio * math.pi**2)


def test_condition_integral_oracle():
    # net cross force between the offset disks vanishes at the solved d
    for ratio in np.linspace(1.2, 3.8, 20):
        sol = d_of_ab_ratio(float(ratio))
        res = cross_condition_residual(sol.d_over_R, float(ratio))
        scale = math.pi**2 * (ratio / sol.d_over_R + sol.d_over_R)
        assert abs(res) < 1e-6 * scale, ratio


def test_leading_order_densities():
    p = InteractionParams(1, 1, 1, 1, 2, 1, eta=0.05)
    (rho1, R1), (rho2, R2) = leading_order_densities(p)
    assert rho1 == pytest.approx(2.0 / math.pi)
    assert rho2 == pytest.approx(1.0 / math.pi)
    assert R1 == R2 == 1.0
    equal = leading_order_densities(InteractionParams(1, 1, 1, 1, 1.5, 1.5, eta=0.05))
    assert equal[0] == equal[1]


def test_leading_order_warns_at_large_eta():
    with pytest.warns(UserWarning):
        leading_order_densities(InteractionParams(1, 1, 1, 1, 2, 1, eta=0.5))


def test_leading_order_deviation_is_order_eta():
    eta = 0.05
    p = InteractionParams(1, 1.0, 1, 1.0, 2, 1, eta=eta)
    (rho1, _), (rho2, _) = leading_order_densities(p)
    quad = equilibrium_densities(p)
    for lead, coex in ((rho1, quad.coexist[0]), (rho2, quad.coexist[1])):
        assert abs(coex - lead) <= 0.2 * eta * lead
    # a case where the coexistence pair genuinely differs at O(eta): the
    # deviation is bounded by a modest multiple of eta and shrinks linearly
    def deviations(eta_val):
        p2 = InteractionParams(1, 2.0, 1, 0.5, 2, 1, eta=eta_val)
        leads = leading_order_densities(p2)
        quad2 = equilibrium_densities(p2)
        return [
            abs(coex - lead) / lead
            for (lead, _), coex in zip(leads, quad2.coexist)
        ]

    devs = deviations(eta)
    assert all(0.0 < d <= 5.0 * eta for d in devs)
    # linear scaling, checked deep in the asymptotic regime
    for big, small in zip(deviations(1e-3), deviations(1e-4)):
        assert small == pytest.approx(big / 10.0, rel=0.02)


def test_mass_ratio_never_enters():
    import inspect

    from swarm_eq import weak_cross

    for fn in (ab_ratio_of_d, d_of_ab_ratio, curve_sample):
        sig = inspect.signature(fn)
        assert not any("M" == name or "M1" in name or "M2" in name for name in sig.parameters)
