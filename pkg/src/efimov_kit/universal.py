"""Universal constants of the three-boson s-wave channel.

The transcendental channel function

    F(nu) = [-nu cos(nu pi/2) + (8/sqrt(3)) sin(nu pi/6)] / sin(nu pi/2)

is real both for real nu (between its poles at even integers) and for purely
imaginary nu = i s, where it takes the hyperbolic form

    F(i s) = [-s cosh(s pi/2) + (8/sqrt(3)) sinh(s pi/6)] / sinh(s pi/2).

Its imaginary-axis zero defines the universal channel constant s0 (lambda0 =
-(s0^2 + 4)), and the slope constant c0 enters the 1/rho expansions of the
eigenvalue around it.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.optimize import brentq

from .errors import PoleAt

SQRT3 = math.sqrt(3.0)

# Real-nu poles of F: sin(nu pi/2) = 0 with nonvanishing numerator.  At
# nu = 4 the numerator vanishes too and the singularity is removable.
_POLE_TOL = 1e-9


def _is_pole(nu_real: float) -> bool:
    m = round(nu_real / 2.0)
    if abs(nu_real - 2 * m) > _POLE_TOL:
        return False
    return m != 0 and (2 * m) % 4 != 0


def channel_lhs_imag(s: float) -> float:
    """F(i s) for s > 0, overflow-safe for large s."""
    x = s * math.pi / 2.0
    if x < 30.0:
        return (-s * math.cosh(x) + (8.0 / SQRT3) * math.sinh(x / 3.0)) / math.sinh(x)
    # multiply numerator and denominator by 2 exp(-x)
    num = -s * (1.0 + math.exp(-2.0 * x)) + (8.0 / SQRT3) * (
        math.exp(-2.0 * x / 3.0) - math.exp(-4.0 * x / 3.0)
    )
    return num / (1.0 - math.exp(-2.0 * x))


def channel_lhs_real(nu: float) -> float:
    """F(nu) for real nu >= 0; raises PoleAt at the true poles."""
    if _is_pole(nu):
        raise PoleAt(nu)
    if nu < 1e-7:
        # both numerator and denominator are O(nu); use the limit ratio
        return (4.0 * math.pi / (3.0 * SQRT3) - 1.0) / (math.pi / 2.0)
    m = round(nu / 2.0)
    if abs(nu - 2 * m) <= _POLE_TOL and m != 0 and (2 * m) % 4 == 0:
        # removable point (nu = 4, 12, ...): L'Hopital
        num = (
            -math.cos(nu * math.pi / 2)
            + nu * (math.pi / 2) * math.sin(nu * math.pi / 2)
            + (8.0 / SQRT3) * (math.pi / 6) * math.cos(nu * math.pi / 6)
        )
        den = (math.pi / 2) * math.cos(nu * math.pi / 2)
        return num / den
    den = math.sin(nu * math.pi / 2)
    num = -nu * math.cos(nu * math.pi / 2) + (8.0 / SQRT3) * math.sin(nu * math.pi / 6)
    return num / den


def channel_lhs(nu: complex) -> float:
    """F(nu) for nu real >= 0 or purely imaginary; real output in both regimes."""
    nu = complex(nu)
    if abs(nu.imag) < 1e-14:
        return channel_lhs_real(abs(nu.real))
    if abs(nu.real) > 1e-12 * max(1.0, abs(nu.imag)):
        raise ValueError("nu must be real or purely imaginary")
    return channel_lhs_imag(abs(nu.imag))


def channel_lhs_lambda(lam: float) -> float:
    """F as a function of lambda = nu^2 - 4 (real for all real lambda)."""
    nusq = lam + 4.0
    if nusq >= 0.0:
        return channel_lhs_real(math.sqrt(nusq))
    return channel_lhs_imag(math.sqrt(-nusq))


@functools.lru_cache(maxsize=1)
def efimov_constant() -> tuple[complex, float]:
    """Root of F on the imaginary axis: returns (nu0, lambda0).

    nu0 = i s0 with s0 = 1.00624..., lambda0 = nu0^2 - 4 = -(s0^2 + 4).
    """
    g = lambda s: -s * math.cosh(s * math.pi / 2) + (8.0 / SQRT3) * math.sinh(s * math.pi / 6)
    s0 = brentq(g, 0.5, 1.5, xtol=1e-15, rtol=8.9e-16)
    return 1j * s0, -(s0 * s0 + 4.0)


def s0_constant() -> float:
    return efimov_constant()[0].imag


@functools.lru_cache(maxsize=1)
def c0_constant() -> float:
    """Slope constant of the eigenvalue expansion around nu0.

    c0 = [sin(nu0 pi/2)/nu0] / [ (4 pi/(3 sqrt 3)) cos(nu0 pi/6)
          - cos(nu0 pi/2) + nu0 (pi/2) sin(nu0 pi/2) ],
    evaluated with the hyperbolic real forms at nu0 = i s0.
    """
    s0 = s0_constant()
    num = math.sinh(s0 * math.pi / 2) / s0
    den = (
        (4.0 * math.pi / (3.0 * SQRT3)) * math.cosh(s0 * math.pi / 6)
        - math.cosh(s0 * math.pi / 2)
        - s0 * (math.pi / 2) * math.sinh(s0 * math.pi / 2)
    )
    return num / den


def branch_interval(branch: int) -> tuple[float, float]:
    """Open lambda-interval of the given branch.

    Branch 0 covers nu on the positive imaginary axis and real nu in [0, 2),
    i.e. lambda in (-inf, 0).  Branch k >= 1 covers real nu in (2k, 2k+2).
    """
    if branch < 0:
        raise ValueError("branch index must be >= 0")
    if branch == 0:
        return -np.inf, 0.0
    lo = (2.0 * branch) ** 2 - 4.0
    hi = (2.0 * branch + 2.0) ** 2 - 4.0
    return lo, hi
