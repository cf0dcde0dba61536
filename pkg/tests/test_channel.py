import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from efimov_kit import channel, model, radial
from efimov_kit.errors import PoleAt, RhoTooSmall
from efimov_kit.radial import TwoBodyParams
from efimov_kit.universal import channel_lhs_lambda


def test_universal_constants():
    nu0, lam0 = channel.efimov_constant()
    assert nu0.imag == pytest.approx(1.00624, abs=1e-5)
    assert lam0 == pytest.approx(-5.0125, abs=5e-4)
    assert abs(channel.efimov_lhs(nu0)) < 1e-12
    assert channel.c0_constant() == pytest.approx(-0.671, abs=1e-3)


def test_lhs_limit_at_zero():
    limit = (4 * math.pi / (3 * math.sqrt(3)) - 1) / (math.pi / 2)
    assert channel.efimov_lhs(0.0) == pytest.approx(limit, rel=1e-12)
    assert limit == pytest.approx(0.90298, abs=1e-5)
    # two-sided continuity at lambda = -4 (nu = 0)
    eps = 1e-7
    assert abs(channel_lhs_lambda(-4 + eps) - channel_lhs_lambda(-4 - eps)) < 1e-6
    eps = 1e-9
    assert abs(channel_lhs_lambda(-4 + eps) - channel_lhs_lambda(-4 - eps)) < 1e-8


def test_lhs_pole_at_two():
    with pytest.raises(PoleAt):
        channel.efimov_lhs(2.0)


def test_lhs_removable_point_at_four():
    # numerator and denominator both vanish at nu = 4; the limit is finite
    val = channel.efimov_lhs(4.0)
    near = channel.efimov_lhs(4.0 + 1e-7)
    assert val == pytest.approx(near, abs=1e-5)


@given(lam=st.floats(min_value=-60.0, max_value=-4.0001))
@settings(max_examples=60, deadline=None)
def test_lhs_real_and_finite_on_imaginary_axis(lam):
    v = channel_lhs_lambda(lam)
    assert np.isfinite(v)


def test_lhs_matches_complex_definition():
    # hyperbolic real form vs direct complex evaluation of the definition
    for nu in (0.7, 1.3, 0.5j, 1.9j):
        direct = (-nu * cmath.cos(nu * cmath.pi / 2)
                  + (8 / math.sqrt(3)) * cmath.sin(nu * cmath.pi / 6)) \
                 / cmath.sin(nu * cmath.pi / 2)
        assert abs(direct.imag) < 1e-12
        assert channel.efimov_lhs(nu) == pytest.approx(direct.real, rel=1e-12)


def _params(inv_a=0.0, re=0.0, rv=0.0):
    s0 = channel.s0_constant()
    return TwoBodyParams(inv_a=inv_a, re=re, rv=rv,
                         r0=-(re / 2) * s0**2 - rv)


def test_unitarity_zero_range_is_rho_independent():
    params = _params(inv_a=0.0)
    _, lam0 = channel.efimov_constant()
    for rho in (3.0, 30.0, 3000.0):
        sol = channel.solve_expansion(params, rho, model=channel.ZR_A)
        assert sol.lam == pytest.approx(lam0, abs=1e-9)
        assert sol.nu.real == 0.0


def test_residual_at_returned_root(barrier_params):
    for m in channel.EXPANSION_MODELS:
        sol = channel.solve_expansion(barrier_params, 25.0, model=m)
        pref = 1.0 / 25.0
        rhs = {channel.ZR_A: -barrier_params.inv_a,
               channel.ZR_A_RE: -barrier_params.inv_a
               + barrier_params.re / 2 * (sol.lam + 4) / 25.0**2,
               channel.ZR_A_RE_RV: -barrier_params.inv_a
               + barrier_params.re / 2 * (sol.lam + 4) / 25.0**2
               - barrier_params.rv / 25.0**2}[m]
        assert abs(pref * channel_lhs_lambda(sol.lam) - rhs) < 1e-12


def test_small_rho_plateau_correction(barrier_params):
    # lambda -> lambda0 - 2 R0/Re as rho -> 0 for the full truncation
    _, lam0 = channel.efimov_constant()
    target = lam0 - 2 * barrier_params.r0 / barrier_params.re
    sol5 = channel.solve_expansion(barrier_params, 5.0, model=channel.ZR_A_RE_RV)
    sol2 = channel.solve_expansion(barrier_params, 2.0, model=channel.ZR_A_RE_RV)
    assert sol5.lam == pytest.approx(target, abs=5e-3)
    assert abs(sol2.lam - target) < abs(sol5.lam - target)


def test_effective_range_only_overshoots_toward_minus_four(barrier_params):
    sol = channel.solve_expansion(barrier_params, 5.0, model=channel.ZR_A_RE)
    assert -4.2 < sol.lam < -4.0
    # while the full truncation stays near the plateau
    full = channel.solve_expansion(barrier_params, 5.0, model=channel.ZR_A_RE_RV)
    assert full.lam < -5.0


def test_atom_dimer_divergence(barrier_params):
    # a > 0: branch 0 diverges like -kappa^2 rho^2 with kappa from the
    # truncated expansion -1/a + (Re/2) kappa^2 = -kappa
    from scipy.optimize import brentq
    kap = brentq(lambda k: k + abs(barrier_params.re) / 2 * k * k
                 - barrier_params.inv_a, 1e-6, 1e-2)
    rho = 4000.0
    sol = channel.solve_expansion(barrier_params, rho, model=channel.ZR_A_RE)
    assert sol.lam + 4 == pytest.approx(-(kap * rho) ** 2, rel=0.05)
    rho2 = 8000.0
    sol2 = channel.solve_expansion(barrier_params, rho2, model=channel.ZR_A_RE)
    rel1 = abs((sol.lam + 4) / (kap * rho) ** 2 + 1)
    rel2 = abs((sol2.lam + 4) / (kap * rho2) ** 2 + 1)
    assert rel2 < rel1  # agreement improves with rho


def test_rigorous_near_free_potential():
    # vanishing potential: the lowest branch-0 root approaches lambda = 0
    # (the free root sits at nu = 2, i.e. at the pole itself)
    p = model.SquareWell(V0=-1e-3, r0=1.0)
    sol = channel.solve_rigorous(p, rho=10.0)
    assert -1e-2 < sol.lam < 0.0


def test_rigorous_matches_expansion_mid_rho(barrier, barrier_params):
    rig = channel.solve_rigorous(barrier, 10.0)
    exp = channel.solve_expansion(barrier_params, 10.0, model=channel.ZR_A_RE_RV)
    assert exp.lam == pytest.approx(rig.lam, rel=1e-2)


def test_rigorous_expansion_convergence_ratio(barrier, barrier_params):
    # the truncated-expansion error decays with rho until it hits the
    # rho-amplified noise floor of the phase-shift integration (~1e-5)
    diffs = []
    for rho in (12.0, 24.0):
        rig = channel.solve_rigorous(barrier, rho)
        exp = channel.solve_expansion(barrier_params, rho, model=channel.ZR_A_RE_RV)
        diffs.append(abs(rig.lam - exp.lam))
    assert diffs[1] < 0.7 * diffs[0]


def test_rho_too_small(barrier):
    with pytest.raises(RhoTooSmall):
        channel.solve_rigorous(barrier, 2.0)  # rho_c = 3 for this support


def test_scan_continuation_path_independence(barrier_params):
    grid = np.geomspace(5.0, 50.0, 7)
    mid = np.sqrt(grid[:-1] * grid[1:])
    fine = np.sort(np.concatenate([grid, mid]))
    c1 = channel.scan(grid, params=barrier_params, model=channel.ZR_A_RE_RV)
    c2 = channel.scan(fine, params=barrier_params, model=channel.ZR_A_RE_RV)
    shared = np.isin(fine, grid)
    assert np.max(np.abs(c2.lam[shared] - c1.lam)) < 1e-10


def test_scan_plateau_window():
    # the universal plateau exists only for |R0| << rho << |a|: probe the
    # same mid-rho points with a small and a large model length R0
    _, lam0 = channel.efimov_constant()
    s0 = channel.s0_constant()
    rho_probe = np.array([20.0, 40.0, 80.0])
    re = -10.0
    out = {}
    for r0_len in (-0.05, -15.0):
        rv = -(re / 2) * s0**2 - r0_len
        params = _params(inv_a=1e-4, re=re, rv=rv)
        curve = channel.scan(rho_probe, params=params, model=channel.ZR_A_RE_RV)
        out[r0_len] = np.abs(curve.lam - lam0)
    assert np.all(out[-0.05] < 0.01 * abs(lam0))   # plateau present
    assert np.all(out[-15.0] > 0.04 * abs(lam0))   # plateau destroyed


def test_asymptotic_nu_trivial_and_ratio():
    s0 = channel.s0_constant()
    trivial = _params(inv_a=0.0, re=-10.0, rv=-(-10.0 / 2) * s0**2)
    assert trivial.r0 == pytest.approx(0.0, abs=1e-12)
    nu0, _ = channel.efimov_constant()
    for regime in (channel.REGIME_A, channel.REGIME_B):
        assert channel.asymptotic_nu(trivial, 50.0, regime=regime) == pytest.approx(nu0)
    # outer regime at unitarity (no upper rho limit): the 1/rho form's error
    # drops fourfold per rho doubling
    re = -1.0
    r0_len = -0.05
    params = _params(inv_a=0.0, re=re, rv=-(re / 2) * s0**2 - r0_len)
    errs = []
    for rho in (50.0, 100.0):
        sol = channel.solve_expansion(params, rho, model=channel.ZR_A_RE_RV)
        nu_asym = channel.asymptotic_nu(params, rho, regime=channel.REGIME_B)
        errs.append(abs(sol.nu.imag - nu_asym.imag))
    assert errs[1] == pytest.approx(errs[0] / 4, rel=0.25)


def test_regime_a_plateau_of_nu():
    # 1/a = 0 and |R0| << |Re|: nu - nu0 ~ -R0/(nu0 Re), constant in rho
    # (corrections are O(rho/Re), so the plateau needs rho well inside |Re|)
    s0 = channel.s0_constant()
    re = -2000.0
    r0_len = -0.7
    rv = -(re / 2) * s0**2 - r0_len
    params = _params(inv_a=0.0, re=re, rv=rv)
    nu0, _ = channel.efimov_constant()
    expected = (-r0_len / (nu0 * re)).imag
    devs = []
    for rho in (1.0, 3.0, 10.0):
        sol = channel.solve_expansion(params, rho, model=channel.ZR_A_RE_RV)
        devs.append(sol.nu.imag - nu0.imag)
    for d in devs:
        assert d == pytest.approx(expected, rel=0.05)


def test_higher_branch_root(resonant_square_well):
    # branch 1 (nu in (2,4)) holds no free-spectrum state (nu = 4 is the
    # vanishing-total-wave-function point); the first excited channel lives
    # on branch 2
    sol = channel.solve_rigorous(resonant_square_well, rho=8.0, branch=2)
    assert 4.0 < sol.nu.real < 6.0
    assert sol.branch_index == 2


def test_branch_interval_guard():
    with pytest.raises(ValueError):
        channel.solve_expansion(_params(), 10.0, model="bogus")
