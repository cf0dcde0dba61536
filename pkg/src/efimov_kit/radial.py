"""Two-body radial engine (units hbar = m = 1, so u'' = (V - k^2) u).

Grids are uniform and edge-aligned: the last node sits exactly on the
potential's support cutoff (or on r_c for the hyperradius-modified
potential), integration never steps across the truncation discontinuity,
and the logarithmic derivative is taken from the smooth inside stencil.
Free-region quantities at any larger matching radius follow analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from . import model
from .errors import (
    NoBoundState,
    NoConvergence,
    NodeAtMatch,
    ScatteringLengthNearZero,
    ZeroInput,
)
from .universal import s0_constant

DEFAULT_STEPS_PER_UNIT = 10_000


class Normalization(Enum):
    ASYMPTOTIC_ONE_MINUS_R_OVER_A = "asymptotic_1_minus_r_over_a"
    UNIT_NORM = "unit_norm"


@dataclass(frozen=True)
class TwoBodyParams:
    """Low-energy constants of one potential.

    The scattering length is stored as inv_a = 1/a so that |a| = infinity is
    the regular point inv_a = 0; `a` is a derived display quantity.
    r0 here is the combined low-energy length R_0 = (Re/2) nu0^2 - Rv.
    """

    inv_a: float
    re: float
    rv: float
    r0: float
    bd: float | None = None
    kd: float | None = None

    @property
    def a(self) -> float:
        return math.inf if self.inv_a == 0.0 else 1.0 / self.inv_a


@dataclass(frozen=True)
class RadialSolution:
    r: np.ndarray
    u: np.ndarray
    energy: float
    normalization: Normalization
    tail_amplitude: float | None = None  # u(r > r0) = A exp(-kd r) for bound states


def _numerov(f: np.ndarray, h: float) -> np.ndarray:
    """Regular solution of u'' = f u with u(0) = 0, u'(0) ~ 1."""
    n = len(f) - 1
    u = np.empty(n + 1)
    u[0] = 0.0
    u[1] = h
    c = h * h / 12.0
    w_prev = (1.0 - c * f[0]) * u[0]
    w_cur = (1.0 - c * f[1]) * u[1]
    hh = h * h
    for i in range(1, n):
        w_next = 2.0 * w_cur - w_prev + hh * f[i] * u[i]
        u[i + 1] = w_next / (1.0 - c * f[i + 1])
        w_prev, w_cur = w_cur, w_next
    return u


def _edge_derivative(u: np.ndarray, h: float) -> float:
    """One-sided 5-point derivative at the last node (inside stencil, O(h^4))."""
    return (25 * u[-1] - 48 * u[-2] + 36 * u[-3] - 16 * u[-4] + 3 * u[-5]) / (12 * h)


def _grid_derivative(u: np.ndarray, h: float) -> np.ndarray:
    """4th-order derivative on the full uniform grid."""
    du = np.empty_like(u)
    du[2:-2] = (u[:-4] - 8 * u[1:-3] + 8 * u[3:-1] - u[4:]) / (12 * h)
    for i in (0, 1):
        du[i] = (-25 * u[i] + 48 * u[i + 1] - 36 * u[i + 2] + 16 * u[i + 3] - 3 * u[i + 4]) / (12 * h)
    for i in (-2, -1):
        du[i] = (25 * u[i] - 48 * u[i - 1] + 36 * u[i - 2] - 16 * u[i - 3] + 3 * u[i - 4]) / (12 * h)
    return du


def _support_grid(p, n_steps: int | None):
    """Uniform grid [0, r0] with the last node exactly on the support cutoff."""
    if n_steps is None:
        n_steps = int(round(DEFAULT_STEPS_PER_UNIT * p.r0))
    h = p.r0 / n_steps
    r = np.arange(n_steps + 1) * h
    r[-1] = p.r0
    return r, h


def _integrate_to_edge(p, ksq: float, n_steps: int | None = None):
    """Numerov to the support edge; returns (r, u, h, L) with L = u'/u at r0."""
    r, h = _support_grid(p, n_steps)
    f = p(r) - ksq
    u = _numerov(f, h)
    uv = u[-1]
    ud = _edge_derivative(u, h)
    if uv == 0.0 and ud == 0.0:
        raise NodeAtMatch("u and u' both vanish at the matching radius")
    return r, u, h, ud / uv


def _free_propagate(u0: float, du0: float, ksq: float, delta: float):
    """Propagate (u, u') across a field-free interval of length delta."""
    if delta == 0.0:
        return u0, du0
    if ksq > 0.0:
        k = math.sqrt(ksq)
        c, s = math.cos(k * delta), math.sin(k * delta)
        return u0 * c + du0 * s / k, -u0 * k * s + du0 * c
    if ksq == 0.0:
        return u0 + du0 * delta, du0
    kap = math.sqrt(-ksq)
    c, s = math.cosh(kap * delta), math.sinh(kap * delta)
    return u0 * c + du0 * s / kap, u0 * kap * s + du0 * c


def _kcot_from_L(L: float, ksq: float, rm: float) -> float:
    """k cot(delta) at matching radius rm from the log-derivative there.

    Smooth through ksq = 0; for ksq < 0 this is the analytic continuation."""
    if ksq > 0.0:
        k = math.sqrt(ksq)
        s, c = math.sin(k * rm), math.cos(k * rm)
        den = k * c - L * s
        if den == 0.0:
            return math.inf
        return k * (L * c + k * s) / den
    if ksq == 0.0:
        den = 1.0 - L * rm
        if den == 0.0:
            return math.inf
        return -L / den
    kap = math.sqrt(-ksq)
    t = math.tanh(kap * rm)
    den = kap - L * t
    if den == 0.0:
        return math.inf
    return kap * (L - kap * t) / den


def k_cot_delta(p, k_squared: float, r_match: float | None = None,
                mu: float = 1.0, n_steps: int | None = None) -> float:
    """k cot(delta) for the potential p at energy k^2 (k^2 < 0 allowed).

    The potential must vanish beyond r_match (default: its support cutoff).
    The result does not depend on r_match as long as that holds; the
    regular solution is integrated to the support edge and continued
    analytically."""
    del mu  # the two-body equation u'' = (V - k^2) u carries no mu
    rm = p.r0 if r_match is None else r_match
    if rm < p.r0 - 1e-12 * p.r0:
        raise ValueError("potential does not vanish beyond r_match")
    _, u, h, L = _integrate_to_edge(p, k_squared, n_steps)
    uv, du = u[-1], L * u[-1]
    uv, du = _free_propagate(uv, du, k_squared, rm - p.r0)
    if uv == 0.0 and du == 0.0:
        raise NodeAtMatch("u and u' both vanish at the matching radius")
    return _kcot_from_L(du / uv, k_squared, rm)


def k_cot_delta_modified(p, rho: float, k_squared: float, mu: float = 1.0,
                         n_steps: int | None = None) -> float:
    """k cot(delta_rho) of the hyperradius-modified potential, matched at r_c."""
    mp = model.ModifiedPotential(p, rho, mu)
    rc = mp.r_c
    if n_steps is None:
        n_steps = int(round(DEFAULT_STEPS_PER_UNIT * rc))
    h = rc / n_steps
    r = np.arange(n_steps + 1) * h
    s = math.sqrt(mu)
    arg = (rho / s) * np.sin(s * r / rho)
    arg[-1] = p.r0  # exactly the support edge of the base potential
    f = p(arg) - k_squared
    u = _numerov(f, h)
    uv = u[-1]
    ud = _edge_derivative(u, h)
    if uv == 0.0 and ud == 0.0:
        raise NodeAtMatch("u and u' both vanish at r_c")
    return _kcot_from_L(ud / uv, k_squared, rc)


def zero_energy_solution(p, n_steps: int | None = None) -> RadialSolution:
    """Regular zero-energy solution normalized to 1 - r/a beyond the range."""
    r, u, h, L = _integrate_to_edge(p, 0.0, n_steps)
    inv_a = _inv_a_from_L(L, p.r0)
    vm, dvm = 1.0 - p.r0 * inv_a, -inv_a
    if abs(vm) >= p.r0 * abs(dvm):
        scale = vm / u[-1]
    else:
        scale = dvm / (L * u[-1])
    return RadialSolution(r=r, u=u * scale, energy=0.0,
                          normalization=Normalization.ASYMPTOTIC_ONE_MINUS_R_OVER_A)


def _inv_a_from_L(L: float, r0: float) -> float:
    den = L * r0 - 1.0
    if den == 0.0:
        raise ScatteringLengthNearZero("scattering length is zero")
    inv_a = L / den
    if abs(inv_a) > 1e6 / r0:
        raise ScatteringLengthNearZero(f"|a| < 1e-6 r0 (1/a = {inv_a:g})")
    return inv_a


def low_energy_params(p, mu: float = 1.0, n_steps: int | None = None,
                      with_dimer: bool = True) -> TwoBodyParams:
    """Scattering length, effective range, the range correction, and R_0.

    a from the log-derivative match at the support edge; Re from the
    standard wave-function integral; Rv from the integration-by-parts form
    -(m/6 hbar^2) int V (3 r^2 u^2 + 2 r^3 u u') dr, which needs only V and
    is valid for discontinuous potentials."""
    del mu
    sol = zero_energy_solution(p, n_steps)
    r, u = sol.r, sol.u
    h = r[1] - r[0]
    L = _edge_derivative(u, h) / u[-1]
    inv_a = _inv_a_from_L(L, p.r0)
    v = 1.0 - r * inv_a
    re = 2.0 * simpson(v * v - u * u, x=r)
    du = _grid_derivative(u, h)
    rv = -(1.0 / 6.0) * simpson(p(r) * (3.0 * r**2 * u**2 + 2.0 * r**3 * u * du), x=r)
    s0 = s0_constant()
    r_zero = -(re / 2.0) * s0 * s0 - rv
    bd = kd = None
    if with_dimer:
        kappas = bound_state_wavenumbers(p)
        if kappas:
            kd = min(kappas)
            bd = kd * kd
    return TwoBodyParams(inv_a=inv_a, re=re, rv=rv, r0=r_zero, bd=bd, kd=kd)


def rv_derivative_form(p, n_steps: int | None = None) -> float:
    """Range correction from (m/6 hbar^2) int V'(r) r^3 u^2 dr directly.

    Uses the analytic/interpolated derivative of V plus the distributional
    boundary term -V(r0^-) r0^3 u(r0)^2 from the support truncation.  Only
    available for potentials exposing a smooth `derivative`."""
    if not hasattr(p, "derivative"):
        raise TypeError("potential has no smooth derivative; use the by-parts form")
    sol = zero_energy_solution(p, n_steps)
    r, u = sol.r, sol.u
    smooth = simpson(p.derivative(r) * r**3 * u**2, x=r)
    jump = -float(p(np.array([p.r0]))[0]) * p.r0**3 * u[-1] ** 2
    return (smooth + jump) / 6.0


def _dimer_mismatch(p, kappa: float, n_steps: int | None):
    _, u, h, L = _integrate_to_edge(p, -kappa * kappa, n_steps)
    # entire in kappa: u'(r0) + kappa u(r0), scaled to tame the dynamic range
    scale = np.max(np.abs(u))
    return (L + kappa) * u[-1] / scale


def bound_state_wavenumbers(p, n_steps: int | None = None,
                            scan_points: int = 240) -> list[float]:
    """All s-wave bound-state wave numbers kappa (B = kappa^2), ascending."""
    r, h = _support_grid(p, 1024)
    vmin = float(np.min(p(r)))
    if vmin >= 0.0:
        return []
    kap_max = math.sqrt(-vmin) * 1.05 + 1.0 / p.r0
    grid = np.concatenate([
        np.geomspace(1e-8, 0.3 / p.r0, scan_points // 3),
        np.linspace(0.3 / p.r0, kap_max, scan_points - scan_points // 3),
    ])
    coarse = 2000
    vals = [_dimer_mismatch(p, k, int(coarse * p.r0)) for k in grid]
    roots = []
    for i in range(len(grid) - 1):
        if np.sign(vals[i]) != np.sign(vals[i + 1]):
            root = brentq(lambda k: _dimer_mismatch(p, k, n_steps),
                          grid[i], grid[i + 1], xtol=1e-14, rtol=8.9e-16)
            roots.append(root)
    return sorted(roots)


def dimer_state(p, which: str = "shallowest", n_steps: int | None = None) -> RadialSolution:
    """Unit-normalized bound state u_D with u_D ~ exp(-kd r) beyond the range.

    `which` selects "shallowest" (the halo dimer, default) or "deepest"."""
    kappas = bound_state_wavenumbers(p, n_steps)
    if not kappas:
        raise NoBoundState("potential has no s-wave bound state")
    kd = min(kappas) if which == "shallowest" else max(kappas)
    r, h = _support_grid(p, n_steps)
    f = p(r) + kd * kd
    u = _numerov(f, h)
    amp = u[-1] / math.exp(-kd * p.r0)
    norm2 = simpson(u * u, x=r) + amp * amp * math.exp(-2 * kd * p.r0) / (2 * kd)
    scale = 1.0 / math.sqrt(norm2)
    return RadialSolution(r=r, u=u * scale, energy=-kd * kd,
                          normalization=Normalization.UNIT_NORM,
                          tail_amplitude=amp * scale)


def atom_dimer_integrals(p, state: RadialSolution | None = None,
                         n_steps: int | None = None) -> dict:
    """The two 1/rho^2 coefficient integrals of the atom-dimer channel.

    Iv: by-parts form of (m/6 hbar^2) int_0^inf V'(r) r^3 u_D^2 dr.
    Iq: int_0^inf u_D (r u_D' + r^2 u_D'') dr with u_D'' eliminated through
        the radial equation; the exponential tail beyond the range is added
        in closed form.  The two cancel identically."""
    if state is None:
        state = dimer_state(p, n_steps=n_steps)
    if state.normalization is not Normalization.UNIT_NORM or state.energy >= 0:
        raise NoBoundState("atom-dimer integrals need a unit-normalized bound state")
    r, u = state.r, state.u
    h = r[1] - r[0]
    kd = math.sqrt(-state.energy)
    du = _grid_derivative(u, h)
    vr = p(r)
    iv = -(1.0 / 6.0) * simpson(vr * (3.0 * r**2 * u**2 + 2.0 * r**3 * u * du), x=r)
    iq_in = simpson(u * r * du + r**2 * u**2 * (vr - state.energy), x=r)
    a_t = state.tail_amplitude
    r0 = p.r0
    e = math.exp(-2.0 * kd * r0)
    int_r = e * (r0 / (2 * kd) + 1.0 / (4 * kd * kd))
    int_r2 = e * (r0**2 / (2 * kd) + r0 / (2 * kd**2) + 1.0 / (4 * kd**3))
    iq_tail = a_t * a_t * (kd * kd * int_r2 - kd * int_r)
    return {"Iv": iv, "Iq": iq_in + iq_tail}


@dataclass(frozen=True)
class ModifiedParams:
    inv_a_rho: float
    re_rho: float

    @property
    def a_rho(self) -> float:
        return math.inf if self.inv_a_rho == 0.0 else 1.0 / self.inv_a_rho


def modified_params(p, rho: float, mu: float = 1.0, n_steps: int | None = None,
                    k_window: tuple[float, float] = (1e-3, 1e-2),
                    n_k: int = 6, curvature_tol: float = 1e-4) -> ModifiedParams:
    """Effective-range-expansion parameters of the modified potential V_rho.

    Fits k cot(delta_rho) over the small-k window (units of 1/r0) including
    the quadratic-in-k^2 shape term, which is far from negligible for
    large-effective-range potentials; the fit residual against that model
    is the rejection check for windows beyond the expansion's reach."""
    k_lo, k_hi = (k / p.r0 for k in k_window)
    ksq = np.linspace(k_lo**2, k_hi**2, n_k)
    y = np.array([k_cot_delta_modified(p, rho, kk, mu, n_steps) for kk in ksq])
    design = np.vstack([np.ones_like(ksq), ksq, ksq * ksq]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    scale = max(abs(coef[0]), abs(coef[1]) * ksq[-1], 1e-300)
    if np.max(np.abs(resid)) > curvature_tol * scale:
        raise NoConvergence(
            "effective-range fit window shows curvature beyond the quadratic "
            "model; shrink the k window")
    return ModifiedParams(inv_a_rho=-coef[0], re_rho=2.0 * coef[1])


def feshbach_effective_range(delta_b: float, delta_mu: float, a_bg: float,
                             mass: float, hbar: float = 1.0) -> float:
    """Effective range of a magnetically tunable two-body resonance.

    All inputs in one consistent unit system with the given hbar; the result
    carries the same length unit as a_bg.  The sign convention is fixed so
    that the 39K 825 G resonance (delta_b = -32 mG, delta_mu = -3.92 mu_B,
    a_bg = -36 a0) yields a large negative effective range."""
    if delta_b == 0.0 or delta_mu == 0.0 or a_bg == 0.0 or mass == 0.0:
        raise ZeroInput("all Feshbach inputs must be nonzero")
    return 2.0 * hbar * hbar / (delta_b * mass * delta_mu * a_bg)
