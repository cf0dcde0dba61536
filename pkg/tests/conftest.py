import math

import numpy as np
import pytest

from efimov_kit import model, radial


@pytest.fixture(scope="session")
def barrier():
    return model.paper_barrier()


@pytest.fixture(scope="session")
def barrier_params(barrier):
    return radial.low_energy_params(barrier)


@pytest.fixture(scope="session")
def resonant_barrier():
    return model.resonant_barrier()


@pytest.fixture(scope="session")
def resonant_square_well():
    return model.SquareWell(V0=-(math.pi / 2) ** 2, r0=1.0)


@pytest.fixture(scope="session")
def dimer_square_well():
    # one deep s-wave bound state (kd ~ 0.53), positive scattering length
    return model.SquareWell(V0=-1.5 * (math.pi / 2) ** 2, r0=1.0)


@pytest.fixture(scope="session")
def resonant_square_params(resonant_square_well):
    return radial.low_energy_params(resonant_square_well)


def acceptance_line(num: int, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:2d}: {status} - {detail}")
