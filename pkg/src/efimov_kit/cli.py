"""Command-line front end.

Subcommands: constants, params, scan, veff, direct, qscan, feshbach.
Output is RFC-4180-compatible CSV preceded by '#' comment lines; the first
carries `# efimov-kit <version> <command> <config-hash>` for provenance.
Exit codes: 0 success, 2 config/usage error, 3 partial numerical failure
(fewer than 90% of scan points succeeded), 4 total solver failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import math
import sys

import numpy as np

from . import __version__, channel, effpot, faddeev, radial
from .config import ConfigError, RunConfig, load_config
from .errors import EfimovKitError
from .model import rho_c
from .universal import s0_constant

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARTIAL = 3
EXIT_TOTAL = 4

# SI values used only at this boundary to convert lab units to hbar-based ones
_HBAR = 1.054571817e-34        # J s
_ATOMIC_MASS = 1.66053906660e-27  # kg
_BOHR_MAGNETON = 9.2740100783e-24  # J/T
_BOHR_RADIUS = 5.29177210903e-11   # m
_GAUSS = 1e-4                  # T


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _config_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def write_csv(stream, command: str, config_hash: str, header: list[str],
              rows: list[list], comments: list[str] = ()) -> None:
    stream.write(f"# efimov-kit {__version__} {command} {config_hash}\n")
    for line in comments:
        stream.write(f"# {line}\n")
    stream.write(",".join(header) + "\r\n")
    for row in rows:
        stream.write(",".join(_fmt(x) for x in row) + "\r\n")


def _open_output(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def cmd_constants(args) -> int:
    g = args.grid_n
    consts = effpot.constants(grid_n=g)
    m0_fine = effpot.m0_constant(grid_n=2 * g)
    rows = [[consts.nu0.imag, consts.lambda0, consts.c0, consts.m0,
             abs(m0_fine - consts.m0)]]
    stream, close = _open_output(args.output)
    write_csv(stream, "constants", _config_hash(f"grid_n={g}"),
              ["s0", "lambda0", "c0", "M0", "M0_grid_change"], rows,
              comments=["M0_grid_change: |M0(2N) - M0(N)| quadrature diagnostic"])
    if close:
        stream.close()
    return EXIT_OK


def cmd_params(args) -> int:
    cfg = load_config(args.config)
    n1 = cfg.tolerances.ode_steps_per_unit
    p = cfg.potential
    params = radial.low_energy_params(p, n_steps=int(n1 * p.r0))
    coarse = radial.low_energy_params(p, n_steps=int(n1 * p.r0 / 2),
                                      with_dimer=False)
    rows = [[params.inv_a, params.a, params.re, params.rv, params.r0,
             params.bd, params.kd,
             abs(params.inv_a - coarse.inv_a),
             abs(params.re - coarse.re),
             abs(params.rv - coarse.rv)]]
    stream, close = _open_output(args.output)
    write_csv(stream, "params", _config_hash(cfg.raw_text),
              ["inv_a", "a", "Re", "Rv", "R0", "B_D", "k_D",
               "err_inv_a", "err_Re", "err_Rv"], rows,
              comments=["err_*: change under halving the radial step"])
    if close:
        stream.close()
    return EXIT_OK


def _scan_one(model_name: str, cfg: RunConfig, rho_grid, params, warn):
    lam = np.full(len(rho_grid), np.nan)
    if model_name == "direct":
        for i, rho in enumerate(rho_grid):
            try:
                lam[i], _ = faddeev.oracle_lambda(cfg.potential, rho, cfg.mu,
                                                  grid_n=cfg.grid_n)
            except Exception as exc:
                warn(f"direct model failed at rho={rho:g}: {exc}")
        return lam
    try:
        if model_name == channel.RIGOROUS:
            grid = rho_grid[rho_grid >= rho_c(cfg.potential, cfg.mu) - 1e-12]
            if len(grid) < len(rho_grid):
                warn(f"rigorous model: {len(rho_grid) - len(grid)} points below rho_c dropped")
            curve = channel.scan(grid, cfg.mu, cfg.branch,
                                 potential=cfg.potential, model=model_name,
                                 n_steps=int(cfg.tolerances.ode_steps_per_unit
                                             * cfg.potential.r0))
            lam[len(rho_grid) - len(grid):] = curve.lam
        else:
            curve = channel.scan(rho_grid, cfg.mu, cfg.branch, params=params,
                                 model=model_name)
            lam[:] = curve.lam
    except Exception as exc:
        warn(f"model {model_name} failed: {exc}")
    return lam


def cmd_scan(args) -> int:
    cfg = load_config(args.config)
    rho_grid = cfg.rho_grid()
    known = set(channel.EXPANSION_MODELS) | {channel.RIGOROUS, "direct"}
    for m in cfg.models:
        if m not in known:
            raise ConfigError(f"unknown model {m!r}; choose from {sorted(known)}")
    params = None
    if set(cfg.models) & set(channel.EXPANSION_MODELS):
        params = radial.low_energy_params(cfg.potential)

    warnings: list[str] = []
    warn = lambda msg: warnings.append(msg)
    columns = {}
    for m in cfg.models:
        columns[m] = _scan_one(m, cfg, rho_grid, params, warn)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)

    header = ["rho"] + [f"lambda_{m}" for m in cfg.models]
    rows = []
    for i, rho in enumerate(rho_grid):
        row = [rho]
        for m in cfg.models:
            v = columns[m][i]
            row.append(None if np.isnan(v) else v)
        rows.append(row)
    stream, close = _open_output(args.output or cfg.output_path)
    write_csv(stream, "scan", _config_hash(cfg.raw_text), header, rows)
    if close:
        stream.close()

    total = len(rho_grid) * len(cfg.models)
    good = sum(int(not np.isnan(columns[m][i]))
               for m in cfg.models for i in range(len(rho_grid)))
    if good == 0:
        return EXIT_TOTAL
    if good < 0.9 * total:
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_veff(args) -> int:
    cfg = load_config(args.config)
    rho_grid = cfg.rho_grid()
    source = args.source
    params = radial.low_energy_params(cfg.potential)
    rows = []
    failures = 0
    if source in (effpot.REGION_A, effpot.REGION_B, effpot.BOX):
        nu0sq = -s0_constant() ** 2
        for rho in rho_grid:
            v = effpot.v_eff_asymptotic(params, rho, cfg.mu, form=source)
            cent = cfg.mu * (nu0sq - 0.25) / rho**2
            rows.append([rho, v, cent, v - cent, source])
    elif source == effpot.ATOM_DIMER:
        integrals = radial.atom_dimer_integrals(cfg.potential)
        for rho in rho_grid:
            out = effpot.atom_dimer_veff(params, integrals, rho, cfg.mu)
            cent = -params.bd
            rows.append([rho, out["v_eff"], cent, out["residual"], source])
    else:  # numerical: rigorous lambda + direct Q
        for rho in rho_grid:
            try:
                lam = channel.solve_rigorous(cfg.potential, rho, cfg.mu,
                                             cfg.branch).lam
                q = faddeev.q_term(cfg.potential, rho, cfg.mu,
                                   grid_n=cfg.grid_n).q
                cent = cfg.mu * (lam + 4 - 0.25) / rho**2
                rows.append([rho, cent - cfg.mu * q, cent, -cfg.mu * q, source])
            except Exception as exc:
                print(f"warning: veff failed at rho={rho:g}: {exc}", file=sys.stderr)
                rows.append([rho, None, None, None, source])
                failures += 1
    stream, close = _open_output(args.output or cfg.output_path)
    write_csv(stream, "veff", _config_hash(cfg.raw_text),
              ["rho", "v_eff", "centrifugal", "q_part", "source"], rows)
    if close:
        stream.close()
    if failures == len(rho_grid):
        return EXIT_TOTAL
    if failures > 0.1 * len(rho_grid):
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_direct(args) -> int:
    cfg = load_config(args.config)
    sols = faddeev.eigen_solve(cfg.potential, args.rho, cfg.mu,
                               n_lowest=cfg.n_lowest, grid_n=cfg.grid_n)
    rows = [[args.rho, s.lam, s.grid_n] for s in sols]
    stream, close = _open_output(args.output)
    write_csv(stream, "direct", _config_hash(cfg.raw_text + f"rho={args.rho}"),
              ["rho", "lambda", "grid_n"], rows)
    if close:
        stream.close()
    return EXIT_OK


def cmd_qscan(args) -> int:
    cfg = load_config(args.config)
    rho_grid = cfg.rho_grid()
    rows = []
    failures = 0
    seed = None
    for rho in rho_grid:
        try:
            est = faddeev.q_term(cfg.potential, rho, cfg.mu, grid_n=cfg.grid_n,
                                 seed=seed)
            rows.append([rho, est.q, est.h, est.richardson_error])
        except Exception as exc:
            print(f"warning: qscan failed at rho={rho:g}: {exc}", file=sys.stderr)
            rows.append([rho, None, None, None])
            failures += 1
    stream, close = _open_output(args.output or cfg.output_path)
    write_csv(stream, "qscan", _config_hash(cfg.raw_text),
              ["rho", "Q", "h", "richardson_error"], rows)
    if close:
        stream.close()
    if failures == len(rho_grid):
        return EXIT_TOTAL
    if failures > 0.1 * len(rho_grid):
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_feshbach(args) -> int:
    from .errors import ZeroInput

    delta_b = args.dB * 1e-3 * _GAUSS          # mG -> T
    delta_mu = args.dmu * _BOHR_MAGNETON       # mu_B -> J/T
    a_bg = args.abg * _BOHR_RADIUS             # a0 -> m
    mass = args.mass * _ATOMIC_MASS            # u -> kg
    try:
        re_m = radial.feshbach_effective_range(delta_b, delta_mu, a_bg, mass,
                                               hbar=_HBAR)
    except ZeroInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    re_a0 = re_m / _BOHR_RADIUS
    stream, close = _open_output(args.output)
    argtext = f"dB={args.dB} dmu={args.dmu} abg={args.abg} mass={args.mass}"
    write_csv(stream, "feshbach", _config_hash(argtext),
              ["dB_mG", "dmu_muB", "abg_a0", "mass_u", "Re_a0"],
              [[args.dB, args.dmu, args.abg, args.mass, re_a0]])
    if close:
        stream.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="efimov-kit",
        description="Finite-range corrections to Efimov physics: two-body "
                    "parameters, adiabatic channel eigenvalues, the direct "
                    "hyperangular oracle, and effective potentials.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="universal channel constants")
    p.add_argument("--grid-n", type=int, default=20000)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("params", help="two-body low-energy parameters")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("scan", help="channel eigenvalue scan over rho")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("veff", help="effective hyperradial potential")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--source", default="numerical_lambda_plus_q",
                   choices=[effpot.NUMERICAL, effpot.REGION_A, effpot.REGION_B,
                            effpot.BOX, effpot.ATOM_DIMER])
    p.set_defaults(func=cmd_veff)

    p = sub.add_parser("direct", help="direct hyperangular eigensolve at one rho")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_direct)

    p = sub.add_parser("qscan", help="non-adiabatic term over a rho grid")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_qscan)

    p = sub.add_parser("feshbach", help="effective range of a narrow resonance")
    p.add_argument("--dB", type=float, required=True, help="field width in mG")
    p.add_argument("--dmu", type=float, required=True,
                   help="magnetic-moment difference in Bohr magnetons")
    p.add_argument("--abg", type=float, required=True,
                   help="background scattering length in Bohr radii")
    p.add_argument("--mass", type=float, required=True,
                   help="atom mass in atomic mass units")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_feshbach)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EfimovKitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOTAL


if __name__ == "__main__":
    sys.exit(main())
