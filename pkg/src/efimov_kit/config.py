"""INI-style run configuration.

Sections: [potential] (kind plus family parameters), [scan] (rho grid,
models, branch, mu), [tolerances], and optional [direct] / [veff] blocks.
Example:

    [potential]
    kind = sech_barrier
    D = -138.27095925
    B = 128.49
    chi = 4.6667
    r0 = 1.0

    [scan]
    rho_min = 2.0
    rho_max = 2000.0
    rho_points = 40
    spacing = log
    models = zr_a, zr_a_re, zr_a_re_rv
    branch = 0
    mu = 1.0

Tabulated potentials use `kind = tabulated` and `file = pot.csv` where the
CSV has header `r,V` and numeric rows from 0 to the support cutoff.
"""

from __future__ import annotations

import configparser
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import model


class ConfigError(Exception):
    """Malformed or incomplete run configuration."""


@dataclass(frozen=True)
class Tolerances:
    ode_rel: float = 1e-16    # target relative radial discretization error
    root_abs: float = 1e-13
    fd_step: float = 1e-3     # base non-adiabatic step, fraction of rho

    @property
    def ode_steps_per_unit(self) -> int:
        # fixed-step 4th-order scheme: h ~ ode_rel^(1/4)
        return max(200, int(round(self.ode_rel ** -0.25)))


@dataclass(frozen=True)
class RunConfig:
    potential: object
    mu: float = 1.0
    rho_min: float = 2.0
    rho_max: float = 100.0
    rho_points: int = 20
    rho_spacing: str = "log"
    models: tuple = ("zr_a_re_rv",)
    branch: int = 0
    output_path: str | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    grid_n: int = 4000
    n_lowest: int = 1
    raw_text: str = ""

    def rho_grid(self) -> np.ndarray:
        if self.rho_points < 2:
            raise ConfigError("rho_points must be >= 2")
        if not (0 < self.rho_min < self.rho_max):
            raise ConfigError("need 0 < rho_min < rho_max")
        if self.rho_spacing == "log":
            return np.geomspace(self.rho_min, self.rho_max, self.rho_points)
        if self.rho_spacing == "linear":
            return np.linspace(self.rho_min, self.rho_max, self.rho_points)
        raise ConfigError(f"unknown spacing {self.rho_spacing!r}")


def _require(section, key, cast=float):
    if key not in section:
        raise ConfigError(f"missing key {key!r} in section [{section.name}]")
    try:
        return cast(section[key])
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {section[key]!r}") from exc


def potential_from_section(section, base_dir: Path = Path(".")):
    kind = section.get("kind")
    if kind is None:
        raise ConfigError("potential section needs a 'kind' key")
    kind = kind.strip().lower()
    if kind == "sech_barrier":
        width = _require(section, "r0")
        support = float(section.get("support", 1.5 * width))
        return model.SechBarrier(D=_require(section, "d"),
                                 B=_require(section, "b"),
                                 chi=_require(section, "chi"),
                                 width=width, r0=support)
    if kind == "square_well":
        return model.SquareWell(V0=_require(section, "v0"),
                                r0=_require(section, "r0"))
    if kind == "tabulated":
        path = base_dir / _require(section, "file", str)
        try:
            with open(path, newline="") as fh:
                reader = csv.DictReader(fh)
                rows = [(float(row["r"]), float(row["V"])) for row in reader]
        except (OSError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"cannot read tabulated potential {path}: {exc}") from exc
        r, v = zip(*rows)
        return model.Tabulated(r_grid=tuple(r), v_grid=tuple(v))
    raise ConfigError(f"unknown potential kind {kind!r}")


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base_dir=path.parent)


def parse_config(text: str, base_dir: Path = Path(".")) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    if "potential" not in cp:
        raise ConfigError("missing [potential] section")
    pot = potential_from_section(cp["potential"], base_dir)
    kwargs: dict = {"potential": pot, "raw_text": text}
    if "scan" in cp:
        sc = cp["scan"]
        kwargs.update(
            mu=float(sc.get("mu", 1.0)),
            rho_min=float(sc.get("rho_min", 2.0)),
            rho_max=float(sc.get("rho_max", 100.0)),
            rho_points=int(sc.get("rho_points", 20)),
            rho_spacing=sc.get("spacing", "log").strip(),
            branch=int(sc.get("branch", 0)),
        )
        if "models" in sc:
            models = tuple(m.strip() for m in sc["models"].split(",") if m.strip())
            kwargs["models"] = models
        if "output" in sc:
            kwargs["output_path"] = sc["output"].strip()
    if "tolerances" in cp:
        tl = cp["tolerances"]
        kwargs["tolerances"] = Tolerances(
            ode_rel=float(tl.get("ode_rel", 1e-16)),
            root_abs=float(tl.get("root_abs", 1e-13)),
            fd_step=float(tl.get("fd_step", 1e-3)),
        )
    if "direct" in cp:
        dr = cp["direct"]
        kwargs["grid_n"] = int(dr.get("grid_n", 4000))
        kwargs["n_lowest"] = int(dr.get("n_lowest", 1))
    cfg = RunConfig(**kwargs)
    for val, name in ((cfg.tolerances.ode_rel, "ode_rel"),
                      (cfg.tolerances.root_abs, "root_abs"),
                      (cfg.tolerances.fd_step, "fd_step")):
        if not (val > 0 and math.isfinite(val)):
            raise ConfigError(f"tolerance {name} must be positive")
    return cfg
