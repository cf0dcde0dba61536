import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from efimov_kit import model
from efimov_kit.errors import RhoTooSmall


def test_barrier_at_origin(barrier):
    # direct evaluation of the family formula at r = 0
    expected = barrier.D + barrier.B * math.exp(-8.0)
    assert model.evaluate(barrier, 0.0) == pytest.approx(expected, rel=1e-14)
    assert model.evaluate(barrier, 0.0) == pytest.approx(-138.227, abs=2e-3)


def test_square_well_inside_and_cutoff():
    p = model.SquareWell(V0=-(math.pi / 2) ** 2, r0=1.0)
    assert model.evaluate(p, 0.5) == pytest.approx(-((math.pi / 2) ** 2))
    assert model.evaluate(p, 2.0) == 0.0


@given(eps=st.floats(min_value=1e-12, max_value=10.0))
@settings(max_examples=40, deadline=None)
def test_truncation_beyond_support(eps):
    for p in (model.paper_barrier(), model.SquareWell(-2.0, 1.0)):
        assert model.evaluate(p, p.r0 + eps) == 0.0


def test_modified_pointwise_limit(barrier):
    mp = model.ModifiedPotential(barrier, rho=1e6)
    r = np.linspace(0.0, 1.0, 50)
    assert np.max(np.abs(mp(r) - barrier(r))) < 1e-9


@given(rho=st.floats(min_value=2.0, max_value=1e4),
       r=st.floats(min_value=0.0, max_value=0.999))
@settings(max_examples=60, deadline=None)
def test_modified_square_well_unchanged_inside(rho, r):
    # (rho) sin(r/rho) <= r, so inside the well the modified value is V0
    p = model.SquareWell(V0=-3.0, r0=1.0)
    mp = model.ModifiedPotential(p, rho=rho)
    assert mp(r) == pytest.approx(-3.0)


def test_matching_radius_value():
    p = model.SquareWell(V0=-1.0, r0=1.0)
    rho = model.rho_c(p)  # 2 r0 at mu = 1
    rc = model.matching_radius(p, rho)
    assert rc == pytest.approx(2.0 * math.asin(0.5), rel=1e-14)  # pi/3


def test_matching_radius_decreases_like_inverse_rho_squared():
    p = model.SquareWell(V0=-1.0, r0=1.0)
    rhos = [5.0, 10.0, 20.0, 40.0]
    excess = [model.matching_radius(p, rho) - p.r0 for rho in rhos]
    assert all(b < a for a, b in zip(excess, excess[1:]))
    ratios = [a / b for a, b in zip(excess, excess[1:])]
    assert all(abs(r - 4.0) < 0.1 for r in ratios)


def test_rho_too_small():
    p = model.SquareWell(V0=-1.0, r0=1.0)
    with pytest.raises(RhoTooSmall):
        model.ModifiedPotential(p, rho=1.5)


def test_mu_scaling_of_rho_c():
    p = model.SquareWell(V0=-1.0, r0=1.0)
    assert model.rho_c(p, mu=4.0) == pytest.approx(4.0)
    mp = model.ModifiedPotential(p, rho=8.0, mu=4.0)
    assert mp.r_c == pytest.approx((8.0 / 2.0) * math.asin(2.0 * 1.0 / 8.0))


def test_unit_system_validation():
    with pytest.raises(ValueError):
        model.UnitSystem(mu=-1.0)


def test_tabulated_validation_and_interpolation():
    with pytest.raises(ValueError):
        model.Tabulated(r_grid=(0.0, 0.5, 0.4, 1.0), v_grid=(1.0, 2.0, 3.0, 4.0))
    with pytest.raises(ValueError):
        model.Tabulated(r_grid=(0.1, 0.5, 0.8, 1.0), v_grid=(1.0, 2.0, 3.0, 4.0))
    r = np.linspace(0.0, 1.0, 400)
    tab = model.Tabulated(r_grid=tuple(r), v_grid=tuple(np.cos(3 * r)))
    x = np.linspace(0.0, 1.0, 77)
    assert np.max(np.abs(tab(x) - np.cos(3 * x))) < 1e-8
    assert tab(1.2) == 0.0
    assert np.max(np.abs(tab.derivative(x) + 3 * np.sin(3 * x))) < 1e-5


def test_sech_barrier_support_guard():
    with pytest.raises(ValueError):
        model.SechBarrier(D=-1.0, B=0.0, chi=1.0, width=2.0, r0=1.0)


def test_calibrated_depth_rounds_to_published_value():
    assert round(model.BARRIER_DEPTH_CALIBRATED, 2) == -138.27
    assert round(model.BARRIER_DEPTH_RESONANT, 2) == -138.27
