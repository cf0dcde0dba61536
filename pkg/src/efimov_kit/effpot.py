"""Effective hyperradial potentials and their closed-form corrections.

V_eff(rho) = (hbar^2 mu / m) [ (nu^2 - 1/4)/rho^2 - Q ] with nu^2 = lambda + 4.
The closed forms cover the inner plateau regime (rho << |Re|), the outer
regime (rho >> |Re|) with its 1/rho^3 correction, the resonant-well form in
which the range-correction terms cancel analytically, and the atom-dimer
channel where the 1/rho^2 terms cancel exactly.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoBoundState
from .faddeev import apply_rotation
from .radial import TwoBodyParams
from .universal import c0_constant, efimov_constant, s0_constant

# source tags for assembled curves
NUMERICAL = "numerical_lambda_plus_q"
REGION_A = "region_a"
REGION_B = "region_b"
BOX = "box"
ATOM_DIMER = "atom_dimer"

DEFAULT_REGION_A_Q_COEF = -1.25  # Q = c/rho^2 in the inner regime, c ~ -5/4


@dataclass(frozen=True)
class EffectivePotentialCurve:
    rho: np.ndarray
    v_eff: np.ndarray
    centrifugal: np.ndarray
    q_part: np.ndarray
    source: str


@dataclass(frozen=True)
class UniversalConstants:
    nu0: complex
    lambda0: float
    c0: float
    m0: float


def v_eff(lam: float, q: float, rho: float, mu: float = 1.0) -> float:
    """Exact assembly (hbar^2 mu/m) [(lambda + 4 - 1/4)/rho^2 - Q]."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return mu * ((lam + 4.0 - 0.25) / rho**2 - q)


def assemble_curve(rho, lam, q, mu: float = 1.0,
                   source: str = NUMERICAL) -> EffectivePotentialCurve:
    rho = np.asarray(rho, dtype=float)
    lam = np.asarray(lam, dtype=float)
    q = np.asarray(q, dtype=float)
    cent = mu * (lam + 4.0 - 0.25) / rho**2
    qp = -mu * q
    return EffectivePotentialCurve(rho=rho, v_eff=cent + qp, centrifugal=cent,
                                   q_part=qp, source=source)


def zero_range_phi(s: float, grid_n: int = 20_000):
    """Zero-range angular function at nu = i s on a quadrature grid.

    psi = sinh(s (pi/2 - alpha)) and Phi = (psi + 2 R[psi]) / sin(2 alpha);
    psi + 2 R[psi] does not vanish at alpha = 0, so Phi itself diverges
    there (only its hyperangular-measure norm is finite).  Returns
    (alpha, phi) with phi = Phi sin(2 alpha), unit-normalized so that
    <Phi|Phi> = int phi^2 d alpha = 1; all inner products of the Phi family
    reduce to plain products of phi."""
    h = (np.pi / 2) / grid_n
    alpha = np.arange(grid_n + 1) * h
    alpha[-1] = np.pi / 2
    psi = np.sinh(s * (np.pi / 2 - alpha))
    phi = psi + 2.0 * apply_rotation(psi, h, alpha)
    norm = math.sqrt(np.trapezoid(phi * phi, x=alpha))
    return alpha, phi / norm


@functools.lru_cache(maxsize=8)
def m0_constant(grid_n: int = 20_000, ds: float = 1e-3) -> float:
    """M0 = <Phi | d^2 Phi / d nu^2> at nu0 for the zero-range angular function.

    The family stays unit-normalized at every nu = i s, so the first
    derivative is orthogonal to Phi and M0 = <(dPhi/ds)^2> >= 0; the second
    nu-derivative along the imaginary axis is -d^2/ds^2.  Since the weight
    sin^2(2 alpha) does not depend on nu, the weighted products of the Phi
    family equal plain products of the phi family."""
    s0 = s0_constant()
    alpha, p0 = zero_range_phi(s0, grid_n)
    _, pm = zero_range_phi(s0 - ds, grid_n)
    _, pp = zero_range_phi(s0 + ds, grid_n)
    dd = (pp - 2.0 * p0 + pm) / ds**2
    return -float(np.trapezoid(p0 * dd, x=alpha))


def constants(grid_n: int = 20_000) -> UniversalConstants:
    nu0, lam0 = efimov_constant()
    return UniversalConstants(nu0=nu0, lambda0=lam0, c0=c0_constant(),
                              m0=m0_constant(grid_n))


def q_zero_range(m0: float, params: TwoBodyParams, rho: float,
                 mu: float = 1.0) -> float:
    """External (zero-range) part of Q: M0 (dnu/drho)^2 = M0 c0^2 nu0^2 R0^2 mu/rho^4."""
    s0 = s0_constant()
    nu0sq = -s0 * s0
    c0 = c0_constant()
    return m0 * c0 * c0 * nu0sq * params.r0**2 * mu / rho**4


def q_box(params: TwoBodyParams, rho: float, mu: float = 1.0) -> float:
    """Internal 1/rho^3 part of Q for the resonant finite well:
    c0 nu0^2 (Re/2 - 2 Rv) sqrt(mu)/rho^3."""
    s0 = s0_constant()
    return (c0_constant() * (-s0 * s0) * (params.re / 2.0 - 2.0 * params.rv)
            * math.sqrt(mu) / rho**3)


def v_eff_asymptotic(params: TwoBodyParams, rho: float, mu: float = 1.0,
                     form: str = REGION_B, q: float = 0.0,
                     region_a_q_coef: float = DEFAULT_REGION_A_Q_COEF) -> float:
    """Closed-form effective potentials.

    REGION_A assumes 1/a = 0 and |R0| << |Re| and uses Q = c/rho^2 with the
    configurable coefficient (default -5/4).  REGION_B takes Q explicitly
    (default 0) so the cancellation between the eigenvalue and Q corrections
    can be probed rather than baked in.  BOX is the resonant-well form in
    which the range-correction terms have cancelled analytically."""
    s0 = s0_constant()
    nu0sq = -s0 * s0
    c0 = c0_constant()
    if form == REGION_A:
        coef = nu0sq - 0.25 - 2.0 * params.r0 / params.re - region_a_q_coef
        return mu * coef / rho**2
    if form == REGION_B:
        return mu * ((nu0sq - 0.25) / rho**2
                     + c0 * nu0sq * math.sqrt(mu)
                     * (params.re * nu0sq - 2.0 * params.rv) / rho**3
                     - q)
    if form == BOX:
        return mu * ((nu0sq - 0.25) / rho**2
                     + c0 * nu0sq * (nu0sq - 0.5) * math.sqrt(mu) * params.re / rho**3)
    raise ValueError(f"unknown closed form {form!r}")


def atom_dimer_veff(params: TwoBodyParams, integrals: dict, rho: float,
                    mu: float = 1.0) -> dict:
    """Atom-dimer effective potential assembled from the channel expansion.

    (lambda+4)/rho^2 = -kd^2/mu - Iv/rho^2 and Q = -1/(4 rho^2) + Iq/rho^2
    compose to V_eff = -B_D - mu (Iv + Iq)/rho^2: the centrifugal -1/4
    cancels against Q's -1/4 and the integrals cancel each other, leaving
    V_eff = -B_D up to order 1/rho^4.  Returns v_eff and the residual
    v_eff + B_D."""
    if params.kd is None or params.bd is None:
        raise NoBoundState("atom-dimer channel needs a bound dimer")
    iv, iq = integrals["Iv"], integrals["Iq"]
    lam_plus_4 = (-params.kd**2 / mu - iv / rho**2) * rho**2
    q = -0.25 / rho**2 + iq / rho**2
    veff = v_eff(lam_plus_4 - 4.0, q, rho, mu)
    return {"v_eff": veff, "residual": veff + params.bd}
