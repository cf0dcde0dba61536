"""Adiabatic channel eigenvalue lambda(rho) = nu(rho)^2 - 4.

Two routes to the same object: the rigorous transcendental equation

    (sqrt(mu)/rho) F(nu) = k_rho cot delta_rho(k_rho),   k_rho = sqrt(mu) nu / rho,

with the phase shift of the hyperradius-modified potential on the right,
and its small-k expansion in three truncations (1/a only; adding the
effective-range term; adding also the range-correction term).

Roots are parameterized by real lambda so one real root finder covers both
the imaginary-nu regime (lambda < -4) and real nu.  Branch 0 spans
lambda in (-inf, 0); branch k >= 1 confines nu to (2k, 2k+2).  With no
guess the solver returns the first root found sweeping down from the upper
branch edge, which follows the physical curve through both the Efimov
plateau and the atom-dimer divergence; a `near` guess selects among
multiple roots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import radial
from .errors import NoRootInBracket, PoleCollision, RhoTooSmall
from .model import rho_c
from .radial import TwoBodyParams
from .universal import (
    branch_interval,
    c0_constant,
    channel_lhs,
    channel_lhs_lambda,
    efimov_constant,
    s0_constant,
)

# truncation tags for the expansion right-hand side
ZR_A = "zr_a"
ZR_A_RE = "zr_a_re"
ZR_A_RE_RV = "zr_a_re_rv"
RIGOROUS = "rigorous"
EXPANSION_MODELS = (ZR_A, ZR_A_RE, ZR_A_RE_RV)

# branch edges are poles of F (in nu); keep this standoff from them
_NU_STANDOFF = 1e-6

efimov_lhs = channel_lhs  # F(nu); the module's canonical name for the LHS


@dataclass(frozen=True)
class EigenvalueBranch:
    lam: float
    branch_index: int
    model: str

    @property
    def nu(self) -> complex:
        nusq = self.lam + 4.0
        if nusq >= 0.0:
            return complex(math.sqrt(nusq), 0.0)
        return complex(0.0, math.sqrt(-nusq))


@dataclass(frozen=True)
class ChannelCurve:
    rho: np.ndarray
    lam: np.ndarray
    model: str
    params: TwoBodyParams | None
    mu: float


def _expansion_rhs(params: TwoBodyParams, rho: float, mu: float, model: str):
    if model == ZR_A:
        return lambda lam: -params.inv_a
    if model == ZR_A_RE:
        return lambda lam: -params.inv_a + (params.re / 2.0) * (lam + 4.0) * mu / rho**2
    if model == ZR_A_RE_RV:
        return lambda lam: (-params.inv_a
                            + (params.re / 2.0) * (lam + 4.0) * mu / rho**2
                            - params.rv * mu / rho**2)
    raise ValueError(f"unknown expansion model {model!r}")


def _branch_lambda_window(branch: int) -> tuple[float, float]:
    lo, hi = branch_interval(branch)
    if branch == 0:
        nu_hi = 2.0 - _NU_STANDOFF
        return -np.inf, nu_hi * nu_hi - 4.0
    nu_lo = 2.0 * branch + _NU_STANDOFF
    nu_hi = 2.0 * branch + 2.0 - _NU_STANDOFF
    return nu_lo * nu_lo - 4.0, nu_hi * nu_hi - 4.0


def _find_root(residual, branch: int, near: float | None, width: float | None,
               lam_floor: float = -1e9):
    lo_lim, hi_lim = _branch_lambda_window(branch)
    lo_lim = max(lo_lim, lam_floor)
    if near is None and branch == 0:
        # default to the universal plateau: both sides of the equation merge
        # as lambda -> -inf, so a blind downward sweep can hop over the
        # physical root pair and land on their residual tail
        near = efimov_constant()[1]

    def _checked(lo, hi):
        root = brentq(residual, lo, hi, xtol=1e-13, rtol=8.9e-16)
        # a sign change through a right-hand-side pole is not a root
        if abs(residual(root)) > 1e-6 * (1.0 + abs(root)):
            raise NoRootInBracket(
                f"sign change at lambda = {root} is a pole, not a root")
        return _pole_checked(root, branch)

    if near is not None:
        w = width if width is not None else max(0.1, 0.01 * abs(near))
        for _ in range(24):
            lo = max(near - w, lo_lim)
            hi = min(near + w, hi_lim)
            glo, ghi = residual(lo), residual(hi)
            if np.sign(glo) != np.sign(ghi):
                return _checked(lo, hi)
            w *= 4.0
            if lo <= lo_lim and hi >= hi_lim:
                break
        raise NoRootInBracket(
            f"no root near lambda = {near} on branch {branch}")
    # no guess: sweep down from the upper branch edge, first sign change wins
    if branch == 0:
        probes = [hi_lim]
        lam, step = hi_lim, 0.25
        while lam > lo_lim:
            lam -= step
            probes.append(max(lam, lo_lim))
            step *= 1.6
    else:
        probes = list(np.linspace(hi_lim, lo_lim, 60))
    g_prev = residual(probes[0])
    for j in range(1, len(probes)):
        g = residual(probes[j])
        if np.sign(g) != np.sign(g_prev):
            return _checked(probes[j], probes[j - 1])
        g_prev = g
    raise NoRootInBracket(f"no root on branch {branch} in the swept range")


def _pole_checked(root: float, branch: int) -> float:
    nusq = root + 4.0
    if nusq > 0.0:
        nu = math.sqrt(nusq)
        nearest = 2.0 * round(nu / 2.0)
        if nearest > 0 and abs(nu - nearest) < _NU_STANDOFF and round(nu / 2.0) % 2 == 1:
            raise PoleCollision(f"root at nu = {nu} within standoff of a pole")
    return root


def solve_expansion(params: TwoBodyParams, rho: float, mu: float = 1.0,
                    model: str = ZR_A_RE_RV, branch: int = 0,
                    near: float | None = None,
                    width: float | None = None) -> EigenvalueBranch:
    """Root of (sqrt(mu)/rho) F(nu) = expansion RHS on the requested branch."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    rhs = _expansion_rhs(params, rho, mu, model)
    pref = math.sqrt(mu) / rho

    def residual(lam):
        return pref * channel_lhs_lambda(lam) - rhs(lam)

    lam = _find_root(residual, branch, near, width)
    return EigenvalueBranch(lam=lam, branch_index=branch, model=model)


def solve_rigorous(p, rho: float, mu: float = 1.0, branch: int = 0,
                   near: float | None = None, width: float | None = None,
                   n_steps: int | None = None) -> EigenvalueBranch:
    """Root of the rigorous channel equation with the numerically computed
    modified phase shift on the right-hand side."""
    if rho < rho_c(p, mu):
        raise RhoTooSmall(f"rho = {rho} below rho_c = {rho_c(p, mu)}")
    pref = math.sqrt(mu) / rho

    def residual(lam):
        ksq = (lam + 4.0) * mu / rho**2
        return pref * channel_lhs_lambda(lam) - radial.k_cot_delta_modified(
            p, rho, ksq, mu, n_steps)

    # no binding deeper than the well bottom: below that both sides of the
    # equation merge exponentially and spurious sign changes appear
    r_probe = np.linspace(0.0, p.r0, 512)
    v_min = float(np.min(p(r_probe)))
    lam_floor = -4.0 - (1.2 * abs(v_min) + 1.0 / p.r0**2) * rho**2 / mu
    lam = _find_root(residual, branch, near, width, lam_floor)
    return EigenvalueBranch(lam=lam, branch_index=branch, model=RIGOROUS)


def scan(rho_grid, mu: float = 1.0, branch: int = 0, *,
         potential=None, params: TwoBodyParams | None = None,
         model: str = RIGOROUS, lambda_start: float | None = None,
         n_steps: int | None = None) -> ChannelCurve:
    """Continuation of one branch along an increasing rho grid.

    Each root is bracketed around a linear predictor from the two previous
    points (bracket width grows x4 on failure), so the returned curve is
    continuous.  `model` selects the rigorous route (needs `potential`) or
    one of the expansion truncations (needs `params`)."""
    rho_grid = np.asarray(rho_grid, dtype=float)
    if np.any(np.diff(rho_grid) <= 0):
        raise ValueError("rho grid must be strictly increasing")
    if model == RIGOROUS:
        if potential is None:
            raise ValueError("rigorous scan needs the potential")
        solver = lambda rho, near, w: solve_rigorous(
            potential, rho, mu, branch, near, w, n_steps).lam
        snapshot = params
    else:
        if params is None:
            raise ValueError("expansion scan needs TwoBodyParams")
        solver = lambda rho, near, w: solve_expansion(
            params, rho, mu, model, branch, near, w).lam
        snapshot = params
    lams = np.empty_like(rho_grid)
    for i, rho in enumerate(rho_grid):
        try:
            if i == 0:
                lams[i] = solver(rho, lambda_start, None)
            elif i == 1:
                lams[i] = solver(rho, lams[0], max(0.1, 0.05 * abs(lams[0])))
            else:
                slope = (lams[i - 1] - lams[i - 2]) / (rho_grid[i - 1] - rho_grid[i - 2])
                pred = lams[i - 1] + slope * (rho - rho_grid[i - 1])
                w = max(0.05, 2.0 * abs(pred - lams[i - 1]))
                lams[i] = solver(rho, pred, w)
        except Exception as exc:
            raise type(exc)(f"{exc} (at rho = {rho})") from exc
    return ChannelCurve(rho=rho_grid, lam=lams, model=model, params=snapshot, mu=mu)


REGIME_A = "A"
REGIME_B = "B"


def asymptotic_nu(params: TwoBodyParams, rho: float, mu: float = 1.0,
                  regime: str = REGIME_B) -> complex:
    """Closed-form nu near nu0: the inner (rho << |Re|) plateau form or the
    outer (rho >> |Re|) 1/rho form.  Regime validity is the caller's call."""
    nu0, _ = efimov_constant()
    if regime == REGIME_A:
        return nu0 - params.r0 / (nu0 * params.re)
    if regime == REGIME_B:
        return nu0 + nu0 * c0_constant() * params.r0 * math.sqrt(mu) / rho
    raise ValueError(f"unknown regime {regime!r}")


__all__ = [
    "ZR_A", "ZR_A_RE", "ZR_A_RE_RV", "RIGOROUS", "EXPANSION_MODELS",
    "REGIME_A", "REGIME_B",
    "EigenvalueBranch", "ChannelCurve",
    "efimov_lhs", "efimov_constant", "s0_constant", "c0_constant",
    "solve_expansion", "solve_rigorous", "scan", "asymptotic_nu",
]
