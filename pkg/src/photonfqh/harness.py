"""Sweep harness: validated configs, deterministic CSV output, manifests.

Every run writes into its output directory:

* ``manifest.json``   - config snapshot, versions, seed, chosen Laughlin
  convention and start timestamp; written before the first result row and
  never touched again.
* ``results.csv``     - one row per sweep point, fixed column order, floats
  rendered with repr-faithful precision so identical config + seed gives a
  bit-identical file.
* ``diagnostics.json`` - per-point convergence diagnostics, flagged-row
  count, end timestamp; written after the run.
* ``plot.svg``        - optional quick look rendered from the CSV.

Failed points never produce silent NaN rows: the flag column carries a
nonzero code and flag_reason the message, and the process exit status is
nonzero whenever any row is flagged.
"""

from __future__ import annotations

import json
import math
import multiprocessing
import os
import subprocess
import time
from dataclasses import replace

import numpy as np

from . import __version__
from .errors import ConfigError, PhotonFqhError
from .lattice import build_geometry
from .laughlin import build_laughlin_pair, ed_ground_manifold
from .lindblad import build_liouvillian, compare_gn, exact_steady_state
from .observables import g2_cm, g3_cm, manifold_overlap, nonlinearity_estimate
from .operators import HARD_CORE, ModelParams, assemble_heff_blocks
from .protocol import ProtocolSchedule, run_protocol
from .steady_state import solve_perturbative_chain

SCHEMA_VERSION = "1.0"

FLAG_OK = 0
FLAG_SOLVER = 1
FLAG_POINT_CONFIG = 2

MODES = (
    "sweep-frequency",
    "sweep-interaction",
    "sweep-size",
    "protocol",
    "lindblad-validate",
)

_DEFAULTS = {
    "j": 1.0,
    "kappa": 0.01,
    "beta": 0.01,
    "nmax": 2,
    "observables": ["n_tot", "g2_cm"],
    "plot": False,
}


def load_config(path: str) -> dict:
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _parse_u(value) -> float:
    if isinstance(value, str):
        if value.lower() in ("hardcore", "hard_core", "inf"):
            return HARD_CORE
        raise ConfigError(f"interaction must be a number or 'hardcore', got {value!r}")
    u = float(value)
    if u < 0:
        raise ConfigError(f"interaction must be >= 0, got {u}")
    return u


def _require(cfg: dict, key, kind, where="config"):
    if key not in cfg:
        raise ConfigError(f"{where} is missing required key {key!r}")
    value = cfg[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if isinstance(value, kind) and not (kind is not bool and isinstance(value, bool)):
        return value
    raise ConfigError(f"{where} key {key!r} must be {kind.__name__}, got {value!r}")


def _params_from_cfg(cfg: dict, delta: float = 0.0, u=None) -> ModelParams:
    return ModelParams(
        J=float(cfg.get("j", _DEFAULTS["j"])),
        U=_parse_u(cfg["u"]) if u is None else u,
        delta=delta,
        kappa=float(cfg.get("kappa", _DEFAULTS["kappa"])),
        beta=float(cfg.get("beta", _DEFAULTS["beta"])),
    )


def _format_cell(value) -> str:
    if isinstance(value, str):
        if any(c in value for c in ",\n\""):
            escaped = value.replace('"', '""')
            return f'"{escaped}"'
        return value
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    raise ConfigError(f"cannot format CSV cell of type {type(value).__name__}")


def write_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ConfigError("row length does not match CSV header")
        lines.append(",".join(_format_cell(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _git_commit() -> str | None:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "HEAD"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
    except OSError:
        return None
    if out.returncode != 0:
        return None
    return out.stdout.strip() or None


def write_manifest(out_dir: str, mode: str, cfg: dict, seed: int, threads: int, extra: dict) -> None:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "git_commit": _git_commit(),
        "mode": mode,
        "config": cfg,
        "seed": seed,
        "threads": threads,
        "start_time": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        **extra,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)
        fh.write("\n")


def write_diagnostics(out_dir: str, diag: dict) -> None:
    diag = {"end_time": time.strftime("%Y-%m-%dT%H:%M:%S%z"), **diag}
    with open(os.path.join(out_dir, "diagnostics.json"), "w") as fh:
        json.dump(diag, fh, indent=2, default=str)
        fh.write("\n")


# worker context shared with forked pool workers
_CTX: dict = {}


def _pool_map(fn, n_points: int, threads: int) -> list:
    if threads <= 1 or n_points <= 1:
        return [fn(i) for i in range(n_points)]
    with multiprocessing.get_context("fork").Pool(min(threads, n_points)) as pool:
        return pool.map(fn, range(n_points))


def _nan_row(columns: list[str], fixed: dict, flag: int, reason: str) -> list:
    row = []
    for col in columns:
        if col == "flag":
            row.append(flag)
        elif col == "flag_reason":
            row.append(reason)
        elif col in fixed:
            row.append(fixed[col])
        else:
            row.append(float("nan"))
    return row


def _observable_columns(cfg: dict) -> list[str]:
    cols = []
    for name in cfg["observables"]:
        if name == "n_tot":
            cols.append("n_tot")
        elif name == "g2_cm":
            cols.extend(["g2_cm", "g2_cm_err"])
        elif name == "g3_cm":
            cols.extend(["g3_cm", "g3_cm_err"])
        elif name == "overlap":
            cols.extend(["overlap_span", "overlap_l0", "overlap_l1"])
        else:
            raise ConfigError(f"unknown observable {name!r}")
    return cols


def _validate_common(cfg: dict, require_dims: bool = True) -> dict:
    cfg = dict(cfg)
    for key, default in _DEFAULTS.items():
        cfg.setdefault(key, default)
    if require_dims:
        nx = _require(cfg, "nx", int)
        ny = _require(cfg, "ny", int)
        if nx < 1 or ny < 1:
            raise ConfigError(f"lattice dims must be positive, got {nx}x{ny}")
    _require(cfg, "u", object)
    _parse_u(cfg["u"])
    nmax = _require(cfg, "nmax", int)
    if nmax < 1:
        raise ConfigError(f"nmax must be >= 1, got {nmax}")
    if not isinstance(cfg["observables"], list) or not cfg["observables"]:
        raise ConfigError("observables must be a non-empty list")
    if "g3_cm" in cfg["observables"] and nmax < 3:
        raise ConfigError("g3_cm requires nmax >= 3")
    return cfg


def _state_row_values(cfg, blocks, state, targets):
    """Observable cells for one converged sweep point, in column order."""
    cells = {}
    norms_sq = [state.norm(n) ** 2 for n in range(state.nmax + 1)]
    total = sum(norms_sq)
    for name in cfg["observables"]:
        if name == "n_tot":
            cells["n_tot"] = sum(n * w for n, w in enumerate(norms_sq)) / total
        elif name == "g2_cm":
            rep = g2_cm(state, blocks, annotate_error=True)
            cells["g2_cm"] = rep.value
            cells["g2_cm_err"] = rep.error_bound
        elif name == "g3_cm":
            rep = g3_cm(state, blocks, annotate_error=True)
            cells["g3_cm"] = rep.value
            cells["g3_cm_err"] = rep.error_bound
        elif name == "overlap":
            n_ph = cfg["_laughlin_n_ph"]
            ov = manifold_overlap(state.components[n_ph], targets)
            cells["overlap_span"] = ov.span
            cells["overlap_l0"] = ov.per_state[0]
            cells["overlap_l1"] = ov.per_state[1]
    cells["residual_max"] = max(state.diagnostics["solve_residuals"], default=0.0)
    return cells


def _setup_overlap_targets(cfg: dict, geometry):
    """Laughlin pair for the overlap observable, or None when not requested."""
    if "overlap" not in cfg["observables"]:
        return None, None
    if geometry.nphi <= 0 or geometry.nphi % 2:
        raise ConfigError(
            f"overlap observable needs an even positive flux count, got {geometry.nphi}"
        )
    n_ph = geometry.nphi // 2
    if n_ph > cfg["nmax"]:
        raise ConfigError(
            f"overlap targets live in manifold {n_ph} but nmax = {cfg['nmax']}"
        )
    l0, l1, meta = build_laughlin_pair(geometry, n_ph)
    cfg["_laughlin_n_ph"] = n_ph
    return [l0, l1], meta


def _freq_point(i: int) -> tuple[list, dict]:
    ctx = _CTX
    cfg = ctx["cfg"]
    delta = ctx["deltas"][i]
    columns = ctx["columns"]
    fixed = {"Delta/J": delta}
    try:
        blocks = ctx["blocks"].with_params(replace(ctx["params"], delta=delta))
        state = solve_perturbative_chain(blocks)
        cells = _state_row_values(cfg, blocks, state, ctx["targets"])
        cells.update(fixed)
        cells["flag"] = FLAG_OK
        cells["flag_reason"] = ""
        row = [cells[c] for c in columns]
        diag = {"index": i, "Delta/J": delta, "residuals": state.diagnostics["solve_residuals"]}
    except PhotonFqhError as exc:
        row = _nan_row(columns, fixed, FLAG_SOLVER, str(exc))
        diag = {"index": i, "Delta/J": delta, "error": str(exc)}
    return row, diag


def sweep_frequency(cfg: dict, out_dir: str, threads: int = 1, seed: int = 0) -> int:
    """Detuning sweep at fixed interaction; returns the flagged-row count."""
    cfg = _validate_common(cfg)
    nphi = _require(cfg, "nphi", int)
    start = _require(cfg, "delta_start", float)
    stop = _require(cfg, "delta_stop", float)
    points = _require(cfg, "delta_points", int)
    if points < 1:
        raise ConfigError("delta_points must be >= 1")

    geometry = build_geometry(cfg["nx"], cfg["ny"], nphi)
    params = _params_from_cfg(cfg)
    blocks = assemble_heff_blocks(geometry, params, cfg["nmax"])
    targets, laughlin_meta = _setup_overlap_targets(cfg, geometry)
    deltas = np.linspace(start, stop, points)

    columns = ["Delta/J"] + _observable_columns(cfg) + ["residual_max", "flag", "flag_reason"]
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(
        out_dir,
        "sweep-frequency",
        {k: v for k, v in cfg.items() if not k.startswith("_")},
        seed,
        threads,
        {"laughlin_convention": laughlin_meta["convention"] if laughlin_meta else None,
         "csv_columns": columns},
    )

    _CTX.clear()
    _CTX.update(cfg=cfg, params=params, blocks=blocks, targets=targets, deltas=deltas, columns=columns)
    results = _pool_map(_freq_point, points, threads)
    rows = [r for r, _ in results]
    diags = [d for _, d in results]
    write_csv(os.path.join(out_dir, "results.csv"), columns, rows)
    flagged = sum(1 for r in rows if r[columns.index("flag")] != FLAG_OK)
    write_diagnostics(out_dir, {"points": diags, "flagged_rows": flagged})
    if cfg.get("plot"):
        _quicklook(out_dir, columns, rows, x="Delta/J")
    return flagged


def _interaction_point(i: int) -> tuple[list, dict]:
    ctx = _CTX
    cfg = ctx["cfg"]
    u = ctx["u_values"][i]
    columns = ctx["columns"]
    fixed = {"U/J": u}
    try:
        params = _params_from_cfg(cfg, delta=cfg["delta"], u=u)
        blocks = assemble_heff_blocks(ctx["geometry"], params, cfg["nmax"])
        state = solve_perturbative_chain(blocks)
        cells = _state_row_values(cfg, blocks, state, ctx["targets"])
        cells.update(fixed)
        cells["flag"] = FLAG_OK
        cells["flag_reason"] = ""
        row = [cells[c] for c in columns]
        diag = {"index": i, "U/J": u, "residuals": state.diagnostics["solve_residuals"]}
    except PhotonFqhError as exc:
        row = _nan_row(columns, fixed, FLAG_SOLVER, str(exc))
        diag = {"index": i, "U/J": u, "error": str(exc)}
    return row, diag


def sweep_interaction(cfg: dict, out_dir: str, threads: int = 1, seed: int = 0) -> int:
    """Interaction sweep at fixed detuning; returns the flagged-row count."""
    cfg = _validate_common(cfg)
    nphi = _require(cfg, "nphi", int)
    cfg["delta"] = _require(cfg, "delta", float)
    if "u_list" not in cfg or not isinstance(cfg["u_list"], list) or not cfg["u_list"]:
        raise ConfigError("sweep-interaction needs a non-empty u_list")
    u_values = [_parse_u(u) for u in cfg["u_list"]]
    if "overlap" in cfg["observables"]:
        raise ConfigError("overlap is defined for the hard-core flux branch; use sweep-frequency")

    geometry = build_geometry(cfg["nx"], cfg["ny"], nphi)
    columns = ["U/J"] + _observable_columns(cfg) + ["residual_max", "flag", "flag_reason"]
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(
        out_dir,
        "sweep-interaction",
        {k: v for k, v in cfg.items() if not k.startswith("_")},
        seed,
        threads,
        {"laughlin_convention": None, "csv_columns": columns},
    )

    _CTX.clear()
    _CTX.update(cfg=cfg, geometry=geometry, u_values=u_values, targets=None, columns=columns)
    results = _pool_map(_interaction_point, len(u_values), threads)
    rows = [r for r, _ in results]
    diags = [d for _, d in results]
    write_csv(os.path.join(out_dir, "results.csv"), columns, rows)
    flagged = sum(1 for r in rows if r[columns.index("flag")] != FLAG_OK)
    write_diagnostics(out_dir, {"points": diags, "flagged_rows": flagged})
    if cfg.get("plot"):
        _quicklook(out_dir, columns, rows, x="U/J")
    return flagged


def _size_point(i: int) -> tuple[list, dict]:
    ctx = _CTX
    cfg = ctx["cfg"]
    nx, ny = ctx["sizes"][i]
    columns = ctx["columns"]
    branch = cfg["branch"]
    fixed = {"nx": nx, "ny": ny, "area": nx * ny, "branch": branch}
    try:
        nphi = cfg["nphi"] if (branch == "fqh" or cfg["bh_flux"] == "on") else 0
        geometry = build_geometry(nx, ny, nphi)
        params = _params_from_cfg(cfg)
        blocks = assemble_heff_blocks(geometry, params, cfg["nmax"])
        delta_u, g2_est = nonlinearity_estimate(blocks)

        if branch == "fqh":
            n_ph = cfg["nphi"] // 2
            ed = ed_ground_manifold(geometry, n_ph, k=2)
            l0, l1, _ = build_laughlin_pair(geometry, n_ph, ed=ed)
            targets = [l0, l1]
            centre = float(ed.values[0]) / n_ph if n_ph else 0.0
            pick = min
        else:
            targets = None
            # two-photon resonance sits at half the lowest pair energy,
            # i.e. one single-photon energy plus the nonlinearity shift
            centre = float(delta_u + _lowest_single(blocks))
            pick = max

        if cfg["delta_mode"] == "fixed":
            scan = [cfg["delta"]]
        else:
            w = cfg["auto_window_kappa"] * params.kappa
            scan = np.linspace(centre - w, centre + w, cfg["auto_points"])

        best = None
        for delta in scan:
            b = blocks.with_params(replace(params, delta=float(delta)))
            state = solve_perturbative_chain(b)
            rep = g2_cm(state, b, annotate_error=True)
            if best is None or pick(rep.value, best[0]) == rep.value:
                best = (rep.value, rep.error_bound, float(delta), state, b)
        g2, g2_err, delta_star, state, b = best

        norms_sq = [state.norm(n) ** 2 for n in range(state.nmax + 1)]
        cells = dict(fixed)
        cells["Delta/J"] = delta_star
        cells["n_tot"] = sum(n * w for n, w in enumerate(norms_sq)) / sum(norms_sq)
        cells["g2_cm"] = g2
        cells["g2_cm_err"] = g2_err
        cells["delta_u"] = delta_u
        cells["g2max_estimate"] = g2_est
        if branch == "fqh":
            ov = manifold_overlap(state.components[cfg["nphi"] // 2], targets)
            cells["overlap_span"] = ov.span
            cells["overlap_l0"] = ov.per_state[0]
            cells["overlap_l1"] = ov.per_state[1]
        else:
            cells["overlap_span"] = cells["overlap_l0"] = cells["overlap_l1"] = float("nan")
        cells["residual_max"] = max(state.diagnostics["solve_residuals"], default=0.0)
        cells["flag"] = FLAG_OK
        cells["flag_reason"] = ""
        row = [cells[c] for c in columns]
        diag = {"index": i, "size": [nx, ny], "Delta/J": delta_star}
    except PhotonFqhError as exc:
        row = _nan_row(columns, fixed, FLAG_SOLVER, str(exc))
        diag = {"index": i, "size": [nx, ny], "error": str(exc)}
    return row, diag


def _lowest_single(blocks) -> float:
    from .solvers import lowest_hermitian_eigs

    vals, _, _ = lowest_hermitian_eigs(blocks.undriven_block(1), k=1)
    return float(vals[0])


def sweep_size(cfg: dict, out_dir: str, threads: int = 1, seed: int = 0) -> int:
    """System-size sweep at fixed flux count; returns the flagged-row count.

    branch = "fqh" keeps the flux on and reports Laughlin overlap at the
    one-photon filling implied by nphi; branch = "bh" reports the two-photon
    nonlinearity estimate, with bh_flux choosing whether the flux stays on.
    The detuning is either fixed or auto-centred on the branch resonance.
    """
    cfg = _validate_common(cfg, require_dims=False)
    _require(cfg, "nphi", int)
    sizes = cfg.get("sizes")
    if not isinstance(sizes, list) or not sizes or not all(
        isinstance(s, list) and len(s) == 2 for s in sizes
    ):
        raise ConfigError("sweep-size needs sizes = [[nx, ny], ...]")
    branch = cfg.get("branch", "fqh")
    if branch not in ("fqh", "bh"):
        raise ConfigError(f"branch must be 'fqh' or 'bh', got {branch!r}")
    cfg["branch"] = branch
    cfg["bh_flux"] = cfg.get("bh_flux", "off")
    if cfg["bh_flux"] not in ("on", "off"):
        raise ConfigError("bh_flux must be 'on' or 'off'")
    cfg["delta_mode"] = cfg.get("delta_mode", "auto")
    if cfg["delta_mode"] == "fixed":
        cfg["delta"] = _require(cfg, "delta", float)
    elif cfg["delta_mode"] != "auto":
        raise ConfigError("delta_mode must be 'fixed' or 'auto'")
    cfg["auto_window_kappa"] = float(cfg.get("auto_window_kappa", 10.0))
    cfg["auto_points"] = int(cfg.get("auto_points", 41))
    if cfg["nmax"] < 2:
        raise ConfigError("sweep-size reports g2_cm and needs nmax >= 2")
    if branch == "fqh":
        if cfg["nphi"] % 2 or cfg["nphi"] <= 0:
            raise ConfigError("fqh branch needs an even positive nphi")
        if cfg["nphi"] // 2 > cfg["nmax"]:
            raise ConfigError("fqh branch needs nmax >= nphi/2 for the overlap manifold")

    columns = [
        "nx", "ny", "area", "branch", "Delta/J", "n_tot",
        "g2_cm", "g2_cm_err", "delta_u", "g2max_estimate",
        "overlap_span", "overlap_l0", "overlap_l1",
        "residual_max", "flag", "flag_reason",
    ]
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(
        out_dir,
        "sweep-size",
        {k: v for k, v in cfg.items() if not k.startswith("_")},
        seed,
        threads,
        {"laughlin_convention": None, "csv_columns": columns},
    )

    _CTX.clear()
    _CTX.update(cfg=cfg, sizes=[tuple(s) for s in sizes], columns=columns)
    results = _pool_map(_size_point, len(sizes), threads)
    rows = [r for r, _ in results]
    diags = [d for _, d in results]
    write_csv(os.path.join(out_dir, "results.csv"), columns, rows)
    flagged = sum(1 for r in rows if r[columns.index("flag")] != FLAG_OK)
    write_diagnostics(out_dir, {"points": diags, "flagged_rows": flagged})
    if cfg.get("plot"):
        _quicklook(out_dir, columns, rows, x="area")
    return flagged


def run_protocol_mode(cfg: dict, out_dir: str, threads: int = 1, seed: int = 0) -> int:
    """Adiabatic preparation trace; returns the flagged-row count."""
    schedule = ProtocolSchedule(
        nx=int(cfg.get("nx", 4)),
        ny=int(cfg.get("ny", 4)),
        super_nx=int(cfg.get("super_nx", 2)),
        super_ny=int(cfg.get("super_ny", 1)),
        v_sl_max=float(cfg.get("v_sl_max", 40.0)),
        v_pert_max=float(cfg.get("v_pert_max", 2.0)),
        impurity=tuple(cfg.get("impurity", (2, 2))),
        points_per_stage=int(cfg.get("points_per_stage", 64)),
        include_impurity=bool(cfg.get("include_impurity", True)),
    )
    columns = [
        "stage", "s", "V_sl/J", "V_pert/J", "alpha",
        "E0/J", "E1/J", "gap/J",
        "overlap_ground_pair", "overlap_excited_pair",
        "continuity", "crossing", "flag", "flag_reason",
    ]
    os.makedirs(out_dir, exist_ok=True)

    flagged = 0
    try:
        result = run_protocol(schedule)
        convention = result.laughlin_metadata.get("convention")
    except PhotonFqhError as exc:
        write_manifest(out_dir, "protocol", cfg, seed, threads,
                       {"laughlin_convention": None, "csv_columns": columns})
        row = _nan_row(columns, {"stage": "setup", "flag_reason": str(exc)}, FLAG_SOLVER, str(exc))
        write_csv(os.path.join(out_dir, "results.csv"), columns, [row])
        write_diagnostics(out_dir, {"points": [], "flagged_rows": 1, "error": str(exc)})
        return 1

    write_manifest(out_dir, "protocol", cfg, seed, threads,
                   {"laughlin_convention": convention, "csv_columns": columns})
    rows = []
    for rec in result.records:
        rows.append([
            rec.stage, rec.s, rec.v_sl, rec.v_pert, rec.alpha,
            rec.energies[0], rec.energies[1], rec.gap,
            rec.overlap_ground_pair, rec.overlap_excited_pair,
            rec.continuity, rec.crossing_suspected, FLAG_OK, "",
        ])
    write_csv(os.path.join(out_dir, "results.csv"), columns, rows)
    write_diagnostics(out_dir, {
        "min_gap_by_stage": result.min_gap_by_stage,
        "mott_overlap": result.mott_overlap,
        "final_overlap_pair": result.final_overlap_pair,
        "crossings_suspected": sum(1 for r in result.records if r.crossing_suspected),
        "flagged_rows": flagged,
    })
    if cfg.get("plot"):
        _quicklook(out_dir, columns, rows, x="index")
    return flagged


def lindblad_validate(cfg: dict, out_dir: str, threads: int = 1, seed: int = 0) -> int:
    """Exact-oracle comparison across lattices and drive strengths."""
    lattices = cfg.get("lattices", [[2, 2], [1, 3]])
    betas = cfg.get("betas", [0.01, 0.005])
    orders = tuple(cfg.get("orders", [1, 2]))
    nmax = int(cfg.get("nmax", 2))
    kappa = float(cfg.get("kappa", 0.02))
    delta = float(cfg.get("delta", -2.0))
    u = _parse_u(cfg.get("u", "hardcore"))
    nphi = int(cfg.get("nphi", 0))

    columns = ["nx", "ny", "beta", "order", "g_exact", "g_metastable", "rel_err",
               "flag", "flag_reason"]
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(out_dir, "lindblad-validate", cfg, seed, threads,
                   {"laughlin_convention": None, "csv_columns": columns})

    rows, diags = [], []
    errors = {}
    flagged = 0
    for nx, ny in lattices:
        for beta in betas:
            fixed = {"nx": nx, "ny": ny, "beta": beta}
            try:
                geometry = build_geometry(nx, ny, nphi)
                params = ModelParams(J=float(cfg.get("j", 1.0)), U=u, delta=delta,
                                     kappa=kappa, beta=beta)
                system = build_liouvillian(geometry, params, nmax)
                rho = exact_steady_state(system)
                state = solve_perturbative_chain(system.blocks)
                comps = compare_gn(system, rho, state, orders=orders)
                for comp in comps:
                    rows.append([nx, ny, beta, comp.order, comp.exact, comp.metastable,
                                 comp.rel_err, FLAG_OK, ""])
                    errors[(nx, ny, beta, comp.order)] = comp.rel_err
                diags.append({"size": [nx, ny], "beta": beta,
                              "steady_residual": rho.residual,
                              "min_population": rho.min_population})
            except PhotonFqhError as exc:
                for order in orders:
                    rows.append(_nan_row(columns, {**fixed, "order": order}, FLAG_SOLVER, str(exc)))
                    flagged += 1
                diags.append({"size": [nx, ny], "beta": beta, "error": str(exc)})

    ratios = {}
    if len(betas) >= 2:
        b_hi, b_lo = betas[0], betas[1]
        for nx, ny in lattices:
            for order in orders:
                hi = errors.get((nx, ny, b_hi, order))
                lo = errors.get((nx, ny, b_lo, order))
                if hi is not None and lo is not None and lo > 0:
                    ratios[f"{nx}x{ny}_order{order}"] = hi / lo

    write_csv(os.path.join(out_dir, "results.csv"), columns, rows)
    write_diagnostics(out_dir, {"points": diags, "scaling_ratios": ratios,
                                "flagged_rows": flagged})
    return flagged


def _quicklook(out_dir: str, columns: list[str], rows: list[list], x: str) -> None:
    """Minimal SVG rendering of the numeric CSV columns against one axis."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if x == "index" or x not in columns:
        xs = np.arange(len(rows), dtype=float)
        xlabel = "point index"
    else:
        xi = columns.index(x)
        xs = np.array([float(r[xi]) for r in rows])
        xlabel = x
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for j, col in enumerate(columns):
        if col in (x, "flag", "flag_reason", "residual_max") or col.endswith("_err"):
            continue
        try:
            ys = np.array([float(rows[i][j]) for i in range(len(rows))])
        except (TypeError, ValueError):
            continue
        if np.all(np.isnan(ys)):
            continue
        ax.plot(xs, ys, label=col, lw=1.2)
    ax.set_xlabel(xlabel)
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "plot.svg"))
    plt.close(fig)


RUNNERS = {
    "sweep-frequency": sweep_frequency,
    "sweep-interaction": sweep_interaction,
    "sweep-size": sweep_size,
    "protocol": run_protocol_mode,
    "lindblad-validate": lindblad_validate,
}


def run_mode(mode: str, cfg: dict, out_dir: str, threads: int = 1, seed: int = 0) -> int:
    if mode not in RUNNERS:
        raise ConfigError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    cfg_mode = cfg.get("mode")
    if cfg_mode is not None and cfg_mode != mode:
        raise ConfigError(f"config declares mode {cfg_mode!r} but {mode!r} was requested")
    return RUNNERS[mode](cfg, out_dir, threads=threads, seed=seed)
