"""Direct hyperangular eigensolver at fixed hyperradius (the toolkit's oracle).

Discretizes  [-d^2/dalpha^2 + U (1 + 2 R)] psi = nu^2 psi  on a uniform
alpha grid over [0, pi/2] with Dirichlet ends, U(alpha) = V(rho sin(alpha)/
sqrt(mu)) m rho^2 / (hbar^2 mu), and R the window integral

    R[psi](alpha) = (2/sqrt 3) int_{|pi/3 - alpha|}^{pi/2 - |pi/6 - alpha|} psi.

Second-order central differences for the derivative; trapezoid weights with
linearly interpolated partial end cells for R.  U is sampled as a local
C^2 kernel average over ~3 cells so that the discrete operator varies
smoothly with rho (needed for non-adiabatic finite differences across
discontinuous wells).  Shifted inverse iteration with the shift system
solved by a tridiagonal factorization plus a Woodbury correction for the
rotation block.

Total angular functions Phi = (psi + 2 R[psi]) / sin(2 alpha) are
normalized in the hyperangular measure, <Phi|Phi> = int Phi^2 sin^2(2
alpha) d alpha = 1 (equivalently unit L2 norm of psi + 2 R[psi]); the
non-adiabatic term and all overlaps use the same measure.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NoConvergence, StepTooLarge
from .universal import efimov_constant

log = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
SPURIOUS_TOL = 1e-8
DENSE_LIMIT = 1500

_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)


@dataclass(frozen=True)
class AngularSolution:
    """One hyperangular eigenpair at fixed rho.

    `alpha`, `psi`, `phi` cover the full grid including both endpoints;
    psi vanishes there and phi carries its one-sided limit values.
    Normalization: int phi^2 sin^2(2 alpha) d alpha = 1."""

    rho: float
    mu: float
    alpha: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    lam: float
    grid_n: int

    @property
    def nu_squared(self) -> float:
        return self.lam + 4.0


@dataclass(frozen=True)
class QEstimate:
    rho: float
    q: float
    h: float
    richardson_error: float


def rotation_window(alpha):
    """Lower and upper limits of the rotation integral at each alpha."""
    alpha = np.asarray(alpha, dtype=float)
    lo = np.abs(np.pi / 3 - alpha)
    hi = np.pi / 2 - np.abs(np.pi / 6 - alpha)
    return lo, hi


def apply_rotation(psi_full: np.ndarray, h: float, alpha) -> np.ndarray:
    """R[psi] at the given alphas from cumulative-trapezoid window integrals.

    psi_full holds nodal values on the full grid (Dirichlet ends included);
    partial end cells use linear interpolation of psi, matching the matrix
    weights."""
    P = np.concatenate(([0.0], np.cumsum((psi_full[:-1] + psi_full[1:]) * h / 2)))

    def antiderivative(x):
        idx = np.clip(np.floor(x / h + 1e-13).astype(int), 0, len(psi_full) - 2)
        t = x / h - idx
        psix = (1 - t) * psi_full[idx] + t * psi_full[idx + 1]
        return P[idx] + t * h * (psi_full[idx] + psix) / 2

    lo, hi = rotation_window(alpha)
    return (2.0 / SQRT3) * (antiderivative(hi) - antiderivative(lo))


def rotation_weights(alpha_int: np.ndarray, h: float, rows) -> sp.csr_matrix:
    """Sparse quadrature weights of R for the requested interior rows."""
    n = len(alpha_int)
    n_nodes = n + 2
    data, ri, ci = [], [], []
    for row in rows:
        lo, hi = rotation_window(alpha_int[row])
        if hi - lo < 1e-15:
            continue
        w: dict[int, float] = {}

        def add(node, val):
            if 1 <= node <= n:  # interior nodes only; boundary psi = 0
                w[node] = w.get(node, 0.0) + val

        klo = int(np.ceil(lo / h - 1e-12))
        khi = int(np.floor(hi / h + 1e-12))
        if klo <= khi:
            for j in range(klo, khi + 1):
                add(j, h)
            add(klo, -h / 2)
            add(khi, -h / 2)
            dl = klo * h - lo
            if dl > 1e-15:
                t = (lo - (klo - 1) * h) / h
                add(klo - 1, dl * (1 - t) / 2)
                add(klo, dl * t / 2 + dl / 2)
            dr = hi - khi * h
            if dr > 1e-15:
                t = (hi - khi * h) / h
                add(khi + 1, dr * t / 2)
                add(khi, dr * (1 - t) / 2 + dr / 2)
        else:
            # window contained in a single cell
            t0 = (lo - (klo - 1) * h) / h
            t1 = (hi - (klo - 1) * h) / h
            dl = hi - lo
            add(klo - 1, dl * (1 - (t0 + t1) / 2))
            add(klo, dl * (t0 + t1) / 2)
        for node, val in w.items():
            ri.append(row)
            ci.append(node - 1)
            data.append(val * 2.0 / SQRT3)
    return sp.csr_matrix((data, (ri, ci)), shape=(n, n), dtype=float)


def _kernel_bspline(t):
    at = np.abs(t)
    return np.where(at <= 1.0, 2.0 / 3.0 - at**2 + at**3 / 2.0,
                    np.where(at <= 2.0, (2.0 - at) ** 3 / 6.0, 0.0))


def sample_U(p, rho: float, mu: float, alpha_int: np.ndarray, h: float,
             cell_average: bool = True) -> np.ndarray:
    """Rescaled potential on the grid: V(rho sin(alpha)/sqrt(mu)) rho^2/mu.

    With cell_average the value is a cubic-B-spline kernel average over the
    neighboring cells (C^2 in rho); otherwise pointwise sampling."""
    s = math.sqrt(mu)
    if not cell_average:
        return rho**2 / mu * np.asarray(p((rho / s) * np.sin(alpha_int)), dtype=float)
    total = np.zeros_like(alpha_int)
    for lo, hi in ((-2.0, -1.0), (-1.0, 0.0), (0.0, 1.0), (1.0, 2.0)):
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        t = mid + half * _GL_X
        nodes = alpha_int[:, None] + h * t[None, :]
        wts = _kernel_bspline(t) * _GL_W * half
        total += p((rho / s) * np.sin(np.clip(nodes, 0.0, np.pi / 2))) @ wts
    return rho**2 / mu * total


class AngularOperator:
    """The discretized operator and its shift-invert machinery."""

    def __init__(self, p, rho: float, mu: float = 1.0, grid_n: int = 4000,
                 cell_average: bool = True):
        if grid_n < 500:
            raise ValueError("grid_n must be >= 500")
        self.p, self.rho, self.mu, self.grid_n = p, rho, mu, grid_n
        h = (np.pi / 2) / grid_n
        self.h = h
        self.alpha_full = np.arange(grid_n + 1) * h
        self.alpha_full[-1] = np.pi / 2
        self.alpha = self.alpha_full[1:-1]
        U = sample_U(p, rho, mu, self.alpha, h, cell_average)
        U[np.abs(U) < 1e-280] = 0.0
        self.U = U
        n = grid_n - 1
        self.rows_i = np.nonzero(U)[0]
        if len(self.rows_i):
            R = rotation_weights(self.alpha, h, self.rows_i)
            S = sp.diags(2.0 * U) @ R
            self.cols_j = np.unique(S.tocoo().col)
            self.S_dense = np.asarray(S[self.rows_i][:, self.cols_j].todense())
        else:
            self.cols_j = np.array([], dtype=int)
            self.S_dense = np.zeros((0, 0))
        self.diag = 2.0 / h**2 + U
        self.off = -1.0 / h**2

    @property
    def size(self) -> int:
        return self.grid_n - 1

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[1:] += self.off * v[:-1]
        out[:-1] += self.off * v[1:]
        if len(self.rows_i):
            out[self.rows_i] += self.S_dense @ v[self.cols_j]
        return out

    def dense_matrix(self) -> np.ndarray:
        n = self.size
        A = np.diag(self.diag)
        idx = np.arange(n - 1)
        A[idx, idx + 1] = self.off
        A[idx + 1, idx] = self.off
        if len(self.rows_i):
            A[np.ix_(self.rows_i, self.cols_j)] += self.S_dense
        return A

    def shift_solver(self, sigma: float):
        """Callable solving (A - sigma I) x = b via tridiagonal LU plus a
        Woodbury correction for the rotation block."""
        n = self.size
        T = sp.diags(
            [np.full(n - 1, self.off), self.diag - sigma, np.full(n - 1, self.off)],
            [-1, 0, 1], format="csc")
        base_lu = spla.splu(T)
        if len(self.rows_i) == 0:
            return lambda b: base_lu.solve(b)
        m2 = len(self.cols_j)
        G = np.empty((m2, m2))
        chunk = max(1, int(2e7 // n))
        for s in range(0, m2, chunk):
            e = min(m2, s + chunk)
            rhs = np.zeros((n, e - s))
            rhs[self.rows_i, :] = self.S_dense[:, s:e]
            G[:, s:e] = base_lu.solve(rhs)[self.cols_j, :]
        cap_lu = sla.lu_factor(np.eye(m2) + G)

        def solve(b):
            y = base_lu.solve(b)
            w = sla.lu_solve(cap_lu, y[self.cols_j])
            b2 = np.zeros(n)
            b2[self.rows_i] = self.S_dense @ w
            return y - base_lu.solve(b2)

        return solve

    def eig_near(self, lam_seed: float, tol: float = 1e-14,
                 maxit: int = 400) -> tuple[float, np.ndarray, float]:
        """Inverse iteration at a fixed shift; returns (lambda, psi, residual).

        The Rayleigh quotient fluctuates at roundoff times the operator
        scale, so convergence uses an absolute floor tied to it."""
        solve = self.shift_solver(lam_seed + 4.0)
        scale = 2.0 / self.h**2 + float(np.max(np.abs(self.U), initial=0.0))
        floor = 64.0 * np.finfo(float).eps * scale
        v = np.sin(2.0 * self.alpha)
        v /= np.linalg.norm(v)
        theta = None
        for _ in range(maxit):
            v = solve(v)
            v /= np.linalg.norm(v)
            av = self.apply(v)
            tnew = v @ av
            if theta is not None and abs(tnew - theta) <= max(tol * abs(tnew), floor):
                theta = tnew
                break
            theta = tnew
        else:
            raise NoConvergence("inverse iteration did not settle")
        resid = float(np.linalg.norm(av - theta * v))
        return theta - 4.0, v, resid

    def total_angular(self, psi: np.ndarray) -> np.ndarray:
        """phi = psi + 2 R[psi] on the full grid (zero at both ends)."""
        full = np.concatenate(([0.0], psi, [0.0]))
        rot = apply_rotation(full, self.h, self.alpha_full)
        out = full + 2.0 * rot
        out[0] = 0.0
        out[-1] = 0.0
        return out


def _phi_from_psi(op: AngularOperator, psi: np.ndarray):
    """Total angular function Phi on the full grid, weighted-normalized,
    sign fixed by Phi at mid grid; returns (phi_small, Phi)."""
    phi_small = op.total_angular(psi)
    s2a = np.sin(2.0 * op.alpha_full)
    Phi = np.empty_like(phi_small)
    Phi[1:-1] = phi_small[1:-1] / s2a[1:-1]
    # removable endpoints: phi'(edge) / (2 cos 2 alpha), one-sided
    h = op.h
    dphi0 = (-3 * phi_small[0] + 4 * phi_small[1] - phi_small[2]) / (2 * h)
    dphiN = (3 * phi_small[-1] - 4 * phi_small[-2] + phi_small[-3]) / (2 * h)
    Phi[0] = dphi0 / 2.0
    Phi[-1] = -dphiN / 2.0
    norm = math.sqrt(np.trapezoid(phi_small * phi_small, dx=h))
    Phi = Phi / norm
    phi_small = phi_small / norm
    mid = len(Phi) // 2
    if Phi[mid] < 0:
        Phi, phi_small, psi = -Phi, -phi_small, -psi
    return psi, phi_small, Phi


def _is_spurious(op: AngularOperator, psi: np.ndarray) -> bool:
    # the vanishing-total-wave-function mode is annihilated by the exact
    # rotation integral but only to O(h^2) by its trapezoid discretization
    phi = op.total_angular(psi)
    tol = max(SPURIOUS_TOL, 100.0 * op.h**2)
    return np.linalg.norm(phi) < tol * np.linalg.norm(psi)


def eigen_solve(p, rho: float, mu: float = 1.0, n_lowest: int = 1,
                grid_n: int = 4000, seed: float | None = None,
                method: str = "auto", cell_average: bool = True) -> list[AngularSolution]:
    """Low-lying hyperangular eigenpairs near the seed (default: the
    universal plateau value), sorted by lambda.

    Solutions whose total angular function vanishes identically (the
    discrete operator keeps the free sin(4 alpha) mode for any potential)
    are filtered out and logged.  No rho >= rho_c restriction applies here;
    this solver has no two-region assumption."""
    if seed is None:
        seed = efimov_constant()[1]
    op = AngularOperator(p, rho, mu, grid_n, cell_average)
    out: list[AngularSolution] = []
    if method == "dense" or (method == "auto" and grid_n <= DENSE_LIMIT and n_lowest > 1):
        A = op.dense_matrix()
        vals, vecs = sla.eig(A)
        if np.max(np.abs(vals.imag)) > 1e-8 * max(1.0, np.max(np.abs(vals.real))):
            log.warning("dense eigensolve returned notably complex eigenvalues")
        order = np.argsort(vals.real)
        for idx in order:
            psi = vecs[:, idx].real
            if _is_spurious(op, psi):
                log.info("discarding spurious eigenvector at lambda = %.6f",
                         vals[idx].real - 4.0)
                continue
            psi, phi_small, Phi = _phi_from_psi(op, psi)
            out.append(AngularSolution(rho=rho, mu=mu, alpha=op.alpha_full,
                                       psi=np.concatenate(([0.0], psi, [0.0])),
                                       phi=Phi, lam=float(vals[idx].real) - 4.0,
                                       grid_n=grid_n))
            if len(out) >= n_lowest:
                break
    elif n_lowest == 1:
        lam, psi, resid = op.eig_near(seed)
        scale = 2.0 / op.h**2 + float(np.max(np.abs(op.U), initial=0.0))
        if resid > max(1e-6 * max(1.0, abs(lam)), 1e-8 * scale):
            raise NoConvergence(f"inverse iteration residual {resid:g}")
        if _is_spurious(op, psi):
            raise NoConvergence("converged to a spurious (vanishing-Phi) mode")
        psi, phi_small, Phi = _phi_from_psi(op, psi)
        out.append(AngularSolution(rho=rho, mu=mu, alpha=op.alpha_full,
                                   psi=np.concatenate(([0.0], psi, [0.0])),
                                   phi=Phi, lam=lam, grid_n=grid_n))
    else:
        sigma = seed + 4.0
        solve = op.shift_solver(sigma)
        n = op.size
        opinv = spla.LinearOperator((n, n), matvec=solve)
        aop = spla.LinearOperator((n, n), matvec=op.apply)
        v0 = np.sin(2.0 * op.alpha)
        k = min(n_lowest + 3, n - 2)
        vals, vecs = spla.eigs(aop, k=k, sigma=sigma, OPinv=opinv, v0=v0,
                               which="LM", tol=1e-12)
        if np.max(np.abs(vals.imag)) > 1e-8 * max(1.0, np.max(np.abs(vals.real))):
            log.warning("ARPACK returned notably complex eigenvalues")
        order = np.argsort(vals.real)
        for idx in order:
            psi = vecs[:, idx].real
            if _is_spurious(op, psi):
                log.info("discarding spurious eigenvector at lambda = %.6f",
                         float(vals[idx].real) - 4.0)
                continue
            psi, phi_small, Phi = _phi_from_psi(op, psi)
            out.append(AngularSolution(rho=rho, mu=mu, alpha=op.alpha_full,
                                       psi=np.concatenate(([0.0], psi, [0.0])),
                                       phi=Phi, lam=float(vals[idx].real) - 4.0,
                                       grid_n=grid_n))
            if len(out) >= n_lowest:
                break
    for a, b in zip(out, out[1:]):
        if abs(a.lam - b.lam) < 1e-8:
            log.warning("near-degenerate eigenvalues at lambda = %.9f", a.lam)
    return out


def grid_for_accuracy(p, rho: float, mu: float = 1.0, grid_n: int = 4000,
                      per_width: float = 220.0) -> int:
    """Grid size keeping the interaction region resolved as rho grows.

    Calibrated on the barrier potential so that the (N, 2N) Richardson pair
    tracks the rigorous channel eigenvalue to better than 1e-4 relative."""
    x = rho / (math.sqrt(mu) * p.r0) * 1.5  # in units of the calibration setup
    return max(grid_n, int(math.ceil(per_width * x**1.5)))


def oracle_lambda(p, rho: float, mu: float = 1.0, grid_n: int = 4000,
                  seed: float | None = None, max_grid: int = 220_000,
                  cell_average: bool = True) -> tuple[float, AngularSolution]:
    """Richardson-extrapolated lowest eigenvalue near the seed.

    Runs the rho-scaled grid and its double, extrapolates the second-order
    error, and returns the extrapolated lambda with the finer solution."""
    n1 = grid_for_accuracy(p, rho, mu, grid_n)
    if 2 * n1 > max_grid:
        raise NoConvergence(
            f"rho = {rho} needs grid {2 * n1} > cap {max_grid} for the "
            "requested accuracy")
    sol1 = eigen_solve(p, rho, mu, 1, n1, seed, cell_average=cell_average)[0]
    sol2 = eigen_solve(p, rho, mu, 1, 2 * n1, sol1.lam, cell_average=cell_average)[0]
    lam = (4.0 * sol2.lam - sol1.lam) / 3.0
    return lam, sol2


def weighted_overlap(phi_a: np.ndarray, phi_b: np.ndarray, alpha: np.ndarray) -> float:
    """<a|b> in the hyperangular measure sin^2(2 alpha) d alpha."""
    w = np.sin(2.0 * alpha) ** 2
    return float(np.trapezoid(w * phi_a * phi_b, x=alpha))


def q_step_floor(p, rho: float, mu: float, grid_n: int) -> float:
    """Smallest safe rho step: several grid cells of interaction-edge travel."""
    h = (np.pi / 2) / grid_n
    return 8.0 * h * rho**2 / (math.sqrt(mu) * p.r0)


def q_term(p, rho: float, mu: float = 1.0, h: float | None = None,
           grid_n: int = 4000, seed: float | None = None,
           richardson: bool = True, max_rel_error: float = 0.05) -> QEstimate:
    """Non-adiabatic term Q = <Phi | d^2/drho^2 | Phi> by central differences.

    Solves at rho and rho +/- h (and +/- h/2 for the Richardson pair), with
    phases aligned by the weighted overlap.  The default step combines the
    1e-3 rho scale with a floor of several cells of edge travel so the
    discrete operator varies smoothly across the stencil."""
    if h is None:
        h = max(1e-3 * rho, q_step_floor(p, rho, mu, grid_n))
    if rho - h <= 0:
        raise ValueError("rho - h must stay positive")
    if seed is None:
        seed = efimov_constant()[1]

    cache: dict[float, AngularSolution] = {}

    def phi_at(rr: float) -> AngularSolution:
        if rr not in cache:
            cache[rr] = eigen_solve(p, rr, mu, 1, grid_n, seed)[0]
        return cache[rr]

    def q_of(step: float) -> float:
        center = phi_at(rho)
        lo, hi = phi_at(rho - step), phi_at(rho + step)
        plo, phi_v = lo.phi.copy(), hi.phi.copy()
        if weighted_overlap(center.phi, plo, center.alpha) < 0:
            plo = -plo
        if weighted_overlap(center.phi, phi_v, center.alpha) < 0:
            phi_v = -phi_v
        dd = (phi_v - 2.0 * center.phi + plo) / step**2
        return weighted_overlap(center.phi, dd, center.alpha)

    q_h = q_of(h)
    if not richardson:
        return QEstimate(rho=rho, q=q_h, h=h, richardson_error=math.nan)
    q_h2 = q_of(h / 2.0)
    q_ext = (4.0 * q_h2 - q_h) / 3.0
    err = abs(q_h2 - q_h) / 3.0
    if err > max_rel_error * abs(q_ext):
        raise StepTooLarge(
            f"Richardson error {err:g} exceeds {max_rel_error:.0%} of Q = {q_ext:g}")
    return QEstimate(rho=rho, q=q_ext, h=h, richardson_error=err)
