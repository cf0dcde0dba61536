import math

import numpy as np
import pytest

from efimov_kit import channel, faddeev, model
from efimov_kit.faddeev import (
    AngularOperator,
    apply_rotation,
    rotation_weights,
    weighted_overlap,
)

SQ3 = math.sqrt(3.0)


def rotation_eigenfactor(q: int) -> float:
    """Exact factor in R[sin(q alpha)] = f_q sin(q alpha) for even q."""
    return 4.0 * math.sin(q * math.pi / 3) / (SQ3 * q)


@pytest.mark.parametrize("q,n", [(2, 2000), (4, 2000), (6, 2000), (8, 4000)])
def test_rotation_on_trig_modes(q, n):
    h = (np.pi / 2) / n
    alpha = np.arange(n + 1) * h
    psi = np.sin(q * alpha)
    got = apply_rotation(psi, h, alpha)
    want = rotation_eigenfactor(q) * psi
    assert np.max(np.abs(got - want)) < 3e-6 * max(1.0, q)


def test_rotation_matrix_rows_match_vector_path():
    n = 1500
    h = (np.pi / 2) / n
    alpha_int = np.arange(1, n) * h
    rows = np.arange(0, n - 1, 7)
    R = rotation_weights(alpha_int, h, rows)
    psi_int = np.sin(2 * alpha_int) + 0.3 * np.sin(6 * alpha_int)
    full = np.concatenate(([0.0], psi_int, [0.0]))
    via_vector = apply_rotation(full, h, alpha_int[rows])
    via_matrix = (R @ psi_int)[rows]
    assert np.max(np.abs(via_vector - via_matrix)) < 1e-13


def test_vanishing_mode_is_exact_eigenvector(barrier):
    # sin(4 alpha) satisfies R[psi] = -psi/2, so it solves the full equation
    # with nu^2 = 16 for any potential and must be filtered as spurious
    op = AngularOperator(barrier, rho=10.0, grid_n=2000)
    psi = np.sin(4.0 * op.alpha)
    out = op.apply(psi)
    assert np.linalg.norm(out - 16.0 * psi) < 5e-2 * np.linalg.norm(psi)
    from efimov_kit.faddeev import _is_spurious
    assert _is_spurious(op, psi)


def test_free_spectrum_dense():
    p = model.SquareWell(V0=0.0, r0=1.0)
    sols = faddeev.eigen_solve(p, rho=10.0, n_lowest=2, grid_n=900, method="dense")
    # lowest lambda = 0 (nu = 2) with constant Phi; lambda = 12 is spurious
    # and filtered, so the next genuine level is nu = 6, lambda = 32
    assert sols[0].lam == pytest.approx(0.0, abs=1e-3)
    assert sols[1].lam == pytest.approx(32.0, abs=0.05)
    phi = sols[0].phi
    assert np.std(phi) < 1e-3 * abs(np.mean(phi))


def test_normalization_and_boundary_values(barrier):
    sol = faddeev.eigen_solve(barrier, rho=8.0, grid_n=3000)[0]
    assert sol.psi[0] == 0.0 and sol.psi[-1] == 0.0
    norm = weighted_overlap(sol.phi, sol.phi, sol.alpha)
    assert norm == pytest.approx(1.0, rel=1e-8)
    assert np.isfinite(sol.phi[0]) and np.isfinite(sol.phi[-1])
    mid = len(sol.phi) // 2
    assert sol.phi[mid] > 0


def test_grid_convergence_is_second_order(barrier, barrier_params):
    rig = channel.solve_rigorous(barrier, 6.0).lam
    lams = [faddeev.eigen_solve(barrier, 6.0, grid_n=n)[0].lam
            for n in (4000, 8000, 16000)]
    d1, d2 = lams[1] - lams[0], lams[2] - lams[1]
    assert d1 / d2 == pytest.approx(4.0, rel=0.2)
    rich = (4 * lams[2] - lams[1]) / 3
    assert rich == pytest.approx(rig, rel=1e-4)


def test_oracle_agreement_with_rigorous(barrier):
    rig = channel.solve_rigorous(barrier, 20.0).lam
    lam, sol = faddeev.oracle_lambda(barrier, 20.0)
    assert lam == pytest.approx(rig, rel=1e-3)


def test_arpack_path_multiple_eigenvalues(barrier):
    sols = faddeev.eigen_solve(barrier, rho=6.0, n_lowest=2, grid_n=2500)
    assert len(sols) == 2
    assert sols[0].lam < sols[1].lam
    for s in sols:
        assert isinstance(s.lam, float)


def test_q_free_potential_vanishes():
    p = model.SquareWell(V0=0.0, r0=1.0)
    est = faddeev.q_term(p, rho=10.0, grid_n=1500, seed=0.0, richardson=False)
    assert abs(est.q) < 1e-6


def test_q_region_a_magnitude(resonant_barrier):
    est = faddeev.q_term(resonant_barrier, rho=8.0, grid_n=8000)
    c = est.q * 8.0**2
    assert -1.15 < c < -0.95
    assert est.richardson_error < 0.05 * abs(est.q)


def test_q_dimer_branch_matches_channel_form(dimer_square_well):
    # Q on the atom-dimer branch approaches -1/(4 rho^2) + Iq/rho^2
    from efimov_kit import radial
    kd = math.sqrt(-radial.dimer_state(dimer_square_well).energy)
    out = radial.atom_dimer_integrals(dimer_square_well)
    rho = 30.0
    est = faddeev.q_term(dimer_square_well, rho=rho, grid_n=16000,
                         seed=-(kd * rho) ** 2 - 4.0, max_rel_error=0.2)
    pred = (-0.25 + out["Iq"]) / rho**2
    assert est.q == pytest.approx(pred, rel=0.2)
