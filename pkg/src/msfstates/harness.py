"""Experiment runner: configuration, scenario execution, CSV/JSON emission.

A run is a single JSON config file plus CLI flag overrides (flags win).
Every CSV carries a header row and a comment line with the config hash and
tool version; fixed config + seed gives byte-identical delimited output.
"""

from __future__ import annotations

import cmath
import copy
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .classical import ClassicalOrbit, FluxConfig, Units, classical_observables, classify_orbit, orbit_state
from .coherent import (
    CoherentParams,
    build_lattice,
    evolve,
    mean_a,
    mean_geometry,
    observable_moments,
    transverse_state,
)
from .errors import ConfigError
from .spectrum import level_diagram
from . import verify as verify_mod

DEFAULT_CONFIG = {
    "units": {"hbar": 1.0, "mass": 1.0, "omega": 1.0},
    "flux": {"flux_quanta": 0.5},
    "seed": verify_mod.DEFAULT_SEED,
    "figures": True,
    "tolerances": {},
    "numeric_tol": 1e-10,
    "spectrum": {"m_max": 3, "l_min": -3, "l_max": 3},
    "classical": {"R": 2.0, "Rc": 1.0, "psi0": 0.0, "alpha_c": 0.0,
                  "pz": 0.0, "z0": 0.0, "periods": 1.0, "samples": 256},
    "coherent": {"j": 1, "z1": [2.0, 0.0], "z2": [1.0, 0.0]},
    "evolve": {"j": 1, "z1": [-4.0, 0.0], "z2": [1.0, 0.0], "pz": 0.0,
               "periods": 1.0, "samples": 128,
               "spread": {"nr": 72, "nphi": 90, "time": 0.0, "r_max": None}},
    "sweep": {"scenario": "coherent", "parameter": "flux.flux_quanta",
              "values": [0.0, 0.25, 0.5, 0.75]},
}

SCENARIOS = ("spectrum", "classical", "coherent", "evolve", "verify", "sweep")


@dataclass
class RunConfig:
    """Validated configuration of one run."""

    raw: dict
    units: Units
    flux: FluxConfig
    seed: int
    figures: bool
    numeric_tol: float
    tolerances: dict

    def block(self, name: str) -> dict:
        return self.raw.get(name, {})

    @property
    def sha(self) -> str:
        return config_hash(self.raw)


def config_hash(raw: dict) -> str:
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha1(blob.encode()).hexdigest()[:12]


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_config(path=None, overrides: dict = None) -> RunConfig:
    """Read a JSON config file, apply defaults and flag overrides."""
    raw = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        raw = _merge(raw, user)
    if overrides:
        raw = _merge(raw, overrides)
    return _validate(raw)


def _validate(raw: dict) -> RunConfig:
    try:
        units = Units(**raw["units"])
    except (TypeError, ConfigError) as exc:
        raise ConfigError(f"invalid units block: {exc}") from exc
    fb = raw["flux"]
    try:
        if "flux_quanta" in fb:
            flux = FluxConfig.from_flux(float(fb["flux_quanta"]))
        else:
            flux = FluxConfig.from_parts(int(fb["l0"]), float(fb["mu"]))
    except (KeyError, TypeError, ValueError, ConfigError) as exc:
        raise ConfigError(f"invalid flux block: {exc}") from exc
    seed = int(raw.get("seed", verify_mod.DEFAULT_SEED))
    tol = float(raw.get("numeric_tol", 1e-10))
    if tol <= 0:
        raise ConfigError("numeric_tol must be > 0")
    tolerances = {}
    for key, val in raw.get("tolerances", {}).items():
        tolerances[int(key)] = float(val)
    return RunConfig(raw=raw, units=units, flux=flux, seed=seed,
                     figures=bool(raw.get("figures", True)),
                     numeric_tol=tol, tolerances=tolerances)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, columns, rows, sha: str):
    lines = [f"# config_sha1={sha} tool=msfstates-{__version__}"]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _coherent_params(cfg: RunConfig, block: dict) -> CoherentParams:
    try:
        j = int(block["j"])
        z1 = complex(*[float(x) for x in block["z1"]])
        z2 = complex(*[float(x) for x in block["z2"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid coherent parameters: {exc}") from exc
    try:
        return CoherentParams(j=j, z1=z1, z2=z2, mu=cfg.flux.mu,
                              l0=cfg.flux.l0)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def run_spectrum(cfg: RunConfig, out_dir: Path):
    """Level table of both sectors plus the splitting diagram."""
    blk = cfg.block("spectrum")
    m_max = int(blk.get("m_max", 3))
    l_min = int(blk.get("l_min", -3))
    l_max = int(blk.get("l_max", 3))
    if m_max < 0 or l_min > l_max:
        raise ConfigError("spectrum ranges invalid")
    entries = level_diagram(cfg.flux.mu, m_max, l_min, l_max, l0=cfg.flux.l0)
    rows = [(e.qn.j, e.qn.m, e.qn.l, e.qn.mu, e.energy_hw, e.lz_hbar)
            for e in entries]
    files = [out_dir / "levels.csv"]
    write_csv(files[0], ["j", "m", "l", "mu", "energy_hw", "lz_hbar"],
              rows, cfg.sha)
    if cfg.figures:
        from .plots import plot_levels

        files.append(out_dir / "levels.png")
        plot_levels(entries, files[-1])
    return files


def run_classical(cfg: RunConfig, out_dir: Path):
    """Sampled classical orbit plus its conserved quantities."""
    blk = cfg.block("classical")
    try:
        orbit = ClassicalOrbit(
            R=float(blk.get("R", 2.0)), Rc=float(blk.get("Rc", 1.0)),
            psi0=float(blk.get("psi0", 0.0)),
            alpha_c=float(blk.get("alpha_c", 0.0)),
            pz=float(blk.get("pz", 0.0)), z0=float(blk.get("z0", 0.0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    samples = int(blk.get("samples", 256))
    periods = float(blk.get("periods", 1.0))
    ts = np.linspace(0.0, periods * 2.0 * math.pi / cfg.units.omega,
                     samples, endpoint=True)
    rows = []
    for t in ts:
        x, y, z, px, py = orbit_state(orbit, cfg.units, float(t))
        rows.append((float(t), x, y, z, px, py))
    energy, lz = classical_observables(orbit, cfg.units, cfg.flux)
    files = [out_dir / "orbit.csv", out_dir / "summary.json"]
    write_csv(files[0], ["t", "x", "y", "z", "px", "py"], rows, cfg.sha)
    write_json(files[1], {
        "config_sha1": cfg.sha,
        "energy": energy,
        "lz": lz,
        "sector": str(classify_orbit(orbit)),
        "r_min": orbit.r_min,
        "r_max": orbit.r_max,
        "touches_flux_line": orbit.touches_flux_line,
    })
    if cfg.figures:
        from .plots import plot_orbit

        files.append(out_dir / "orbit.png")
        plot_orbit(rows, orbit, files[-1])
    return files


def _mean_row(p: CoherentParams, cfg: RunConfig):
    rep = mean_geometry(p, cfg.units)
    return rep, (
        p.j, p.mu, p.l0, p.z1.real, p.z1.imag, p.z2.real, p.z2.imag,
        rep.n1_mean, rep.n2_mean,
        rep.a1_mean.real, rep.a1_mean.imag,
        rep.a2_mean.real, rep.a2_mean.imag,
        rep.position_mean.real, rep.position_mean.imag,
        rep.R_mean, rep.Rc_mean,
        rep.var_R2, rep.var_Rc2, rep.var_position,
    )


MEANS_COLUMNS = [
    "j", "mu", "l0", "z1_re", "z1_im", "z2_re", "z2_im",
    "n1_mean", "n2_mean", "a1_re", "a1_im", "a2_re", "a2_im",
    "x_mean", "y_mean", "R_mean", "Rc_mean",
    "var_R2", "var_Rc2", "var_position",
]


def run_coherent(cfg: RunConfig, out_dir: Path):
    """Mean values, variances, and the coefficient lattice of one state."""
    p = _coherent_params(cfg, cfg.block("coherent"))
    rep, row = _mean_row(p, cfg)
    lat = build_lattice(p, tol=cfg.numeric_tol)
    files = [out_dir / "means.csv", out_dir / "lattice.txt"]
    write_csv(files[0], MEANS_COLUMNS, [row], cfg.sha)
    files[1].write_text(lat.to_text())
    if cfg.figures:
        from .plots import plot_lattice

        files.append(out_dir / "lattice.png")
        plot_lattice(lat, files[-1])
    return files


def run_evolve(cfg: RunConfig, out_dir: Path):
    """Trajectory of mean values over full periods plus a density snapshot."""
    blk = cfg.block("evolve")
    p = _coherent_params(cfg, blk)
    samples = int(blk.get("samples", 128))
    periods = float(blk.get("periods", 1.0))
    period = 2.0 * math.pi / cfg.units.omega
    ts = np.linspace(0.0, periods * period, samples, endpoint=True)
    traj_rows = []
    for t in ts:
        pt = evolve(p, float(t), cfg.units)
        lat = build_lattice(pt, tol=cfg.numeric_tol)
        pos, var_pos = observable_moments(lat, "X_plus_iY", units=cfg.units)
        r2_mean = var_pos + abs(pos) ** 2
        scale = math.sqrt(cfg.units.magnetic_length_sq)
        traj_rows.append((
            float(t), pos.real, pos.imag,
            scale * abs(mean_a(pt, 1)), scale * abs(mean_a(pt, 2)),
            var_pos, r2_mean,
        ))
    files = [out_dir / "trajectory.csv"]
    write_csv(files[0],
              ["t", "mean_x", "mean_y", "R_mean", "Rc_mean",
               "var_position", "r2_mean"],
              traj_rows, cfg.sha)

    # matched classical orbit: R, Rc from the state moduli, phases from z1, z2
    scale = math.sqrt(cfg.units.magnetic_length_sq)
    orbit = ClassicalOrbit(
        R=scale * abs(p.z1), Rc=scale * abs(p.z2),
        psi0=math.pi - cmath.phase(p.z1) if p.z1 != 0 else 0.0,
        alpha_c=cmath.phase(p.z2) if p.z2 != 0 else 0.0,
    )
    overlay = []
    for t in ts:
        x, y, _, _, _ = orbit_state(orbit, cfg.units, float(t))
        overlay.append((float(t), x, y))
    files.append(out_dir / "classical_overlay.csv")
    write_csv(files[-1], ["t", "x", "y"], overlay, cfg.sha)

    # |Psi|^2 snapshot on a polar grid
    spread = blk.get("spread", {})
    nr = int(spread.get("nr", 72))
    nphi = int(spread.get("nphi", 90))
    t_snap = float(spread.get("time", 0.0))
    r_max = spread.get("r_max")
    if r_max is None:
        r_max = 1.35 * (orbit.r_max + 2.0 * scale)
    r_grid = np.linspace(1e-9, float(r_max), nr)
    phi_grid = np.arange(nphi) * (2.0 * math.pi / nphi)
    lat = build_lattice(p, tol=cfg.numeric_tol)
    norm = lat.norm_sq()
    dens = np.empty((nphi, nr))
    for i, phi in enumerate(phi_grid):
        vals = transverse_state(p, cfg.units, t_snap, r_grid, float(phi),
                                l_bounds=lat.l_bounds)
        dens[i] = np.abs(vals) ** 2 / norm
    spread_rows = []
    for i, phi in enumerate(phi_grid):
        for k, r in enumerate(r_grid):
            spread_rows.append((float(r), float(phi), float(dens[i, k])))
    files.append(out_dir / "spread.csv")
    write_csv(files[-1], ["r", "phi", "density"], spread_rows, cfg.sha)

    if cfg.figures:
        from .plots import plot_spread, plot_trajectory

        files.append(out_dir / "trajectory.png")
        plot_trajectory(traj_rows, overlay, files[-1])
        files.append(out_dir / "spread.png")
        rep = mean_geometry(p, cfg.units)
        plot_spread(r_grid, phi_grid, dens,
                    radii={"R_mean": rep.R_mean, "Rc_mean": rep.Rc_mean,
                           "classical_R": orbit.R, "classical_Rc": orbit.Rc},
                    path=files[-1])
    return files


def run_verify(cfg: RunConfig, out_dir: Path):
    """Acceptance battery; returns (files, all_passed)."""
    results = verify_mod.run_all(seed=cfg.seed, tol_overrides=cfg.tolerances)
    payload = {
        "config_sha1": cfg.sha,
        "tool": f"msfstates-{__version__}",
        "seed": cfg.seed,
        "all_passed": all(r.passed for r in results),
        "criteria": [
            {
                "id": r.cid,
                "name": r.name,
                "passed": r.passed,
                "measured": r.measured,
                "tolerance": r.tolerance,
                "details": r.details,
            }
            for r in results
        ],
    }
    files = [out_dir / "report.json"]
    write_json(files[0], payload)
    return files, payload["all_passed"], results


def _set_by_path(raw: dict, dotted: str, value):
    node = raw
    parts = dotted.split(".")
    for key in parts[:-1]:
        if key not in node or not isinstance(node[key], dict):
            node[key] = {}
        node = node[key]
    node[parts[-1]] = value


def run_sweep(cfg: RunConfig, out_dir: Path):
    """Run one scenario over a list of parameter values.

    Each point writes into points/NNN/; the merged summary is sorted by
    parameter value and rendered as one figure.
    """
    blk = cfg.block("sweep")
    scenario = blk.get("scenario", "coherent")
    if scenario not in ("spectrum", "classical", "coherent", "evolve"):
        raise ConfigError(f"sweep cannot wrap scenario {scenario!r}")
    parameter = blk.get("parameter")
    values = blk.get("values")
    if not parameter or not isinstance(values, list) or not values:
        raise ConfigError("sweep needs 'parameter' and a nonempty 'values' list")
    files = []
    summary_rows = []
    for i, value in enumerate(values):
        raw = copy.deepcopy(cfg.raw)
        _set_by_path(raw, parameter, value)
        sub_cfg = _validate(raw)
        sub_dir = out_dir / "points" / f"{i:03d}"
        sub_dir.mkdir(parents=True, exist_ok=True)
        files.extend(RUNNERS[scenario](sub_cfg, sub_dir))
        summary_rows.append((value, i, sub_cfg.sha))
    summary_rows.sort(key=lambda r: (r[0], r[1]))
    files.append(out_dir / "sweep_summary.csv")
    write_csv(files[-1], ["value", "point", "point_sha1"],
              summary_rows, cfg.sha)
    if scenario == "coherent":
        merged = _merge_means(out_dir, summary_rows, parameter, cfg)
        files.extend(merged)
    return files


def _merge_means(out_dir: Path, summary_rows, parameter: str,
                 cfg: RunConfig):
    rows = []
    for value, i, _sha in summary_rows:
        text = (out_dir / "points" / f"{i:03d}" / "means.csv").read_text()
        data_line = text.strip().splitlines()[-1]
        rows.append((value, *data_line.split(",")))
    files = [out_dir / "sweep_means.csv"]
    write_csv(files[0], ["value"] + MEANS_COLUMNS, rows, cfg.sha)
    if cfg.figures:
        from .plots import plot_sweep

        files.append(out_dir / "sweep.png")
        plot_sweep(parameter, rows, MEANS_COLUMNS, files[-1])
    return files


RUNNERS = {
    "spectrum": run_spectrum,
    "classical": run_classical,
    "coherent": run_coherent,
    "evolve": run_evolve,
}
