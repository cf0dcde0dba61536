"""Finite-range corrections to Efimov physics for three identical bosons.

Units: hbar = m = 1, lengths in units of the potential scale; mu is the
arbitrary hyperspherical mass parameter (default 1) kept explicit
throughout.
"""

__version__ = "0.1.0"

from . import channel, effpot, faddeev, model, radial, universal  # noqa: F401
from .model import (  # noqa: F401
    ModifiedPotential,
    SechBarrier,
    SquareWell,
    Tabulated,
    paper_barrier,
    resonant_barrier,
)
from .radial import TwoBodyParams, low_energy_params  # noqa: F401
