"""Command-line driver: single experiments and parameter sweeps to CSV.

Every run writes ``<output>.csv`` plus ``<output>.manifest.json`` (the full
configuration, package versions and seed).  Rows carry the complete
parameter tuple, floats are printed with 12 significant digits, and output
is byte-identical for identical (config, seed) pairs.  Exit codes: 0 ok,
2 configuration error, 3 numerical (convergence) error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict, fields, replace

import numpy as np

from . import __version__
from .chain import ChainSpec, teleport_over_chain
from .errors import ConfigError, ConvergenceError
from .evolve import PropagatorConfig
from .hilbert import fidelity, measure_qubit
from .metrics import concurrence
from . import protocol as proto

EXPERIMENTS = ("encode", "entangle", "couple", "bell", "teleport", "chain")

SWEEP_AXES = ("w", "phi", "U_max", "Uprime_max", "bell_U", "T_ent", "T_couple",
              "T_ghz", "wait_angle", "alpha_abs", "beta_phase", "n_support", "seed")

PARAM_COLUMNS = ("experiment", "mode", "w", "phi", "U_max", "Uprime_max", "bell_U",
                 "T_ent", "T_couple", "T_ghz", "wait_angle", "alpha_abs", "beta_phase",
                 "n_support", "seed", "dt")

RESULT_COLUMNS = {
    "encode": ("t_bar", "achieved_alpha_re", "achieved_alpha_im",
               "achieved_beta_re", "achieved_beta_im"),
    "entangle": ("bell_overlap_sq", "reference_overlap_sq", "ground_overlap_sq",
                 "min_gap", "concurrence"),
    "couple": ("target_overlap_sq", "norm"),
    "bell": ("p0", "p1", "effective_overlap_sq"),
    "teleport": ("outcome", "p0", "p1", "fidelity", "fidelity_branch0", "fidelity_branch1"),
    "chain": ("outcome", "p0", "p1", "fidelity", "fidelity_branch0", "fidelity_branch1",
              "ghz_overlap_sq"),
}


@dataclass
class RunConfig:
    experiment: str = "teleport"
    mode: str = "full"
    w: float = 1.0
    phi: float = 0.0
    U_max: float = 100.0
    Uprime_max: float | None = None
    bell_U: float | None = None
    T_ent: float | None = None
    T_couple: float | None = None
    T_ghz: float | None = None
    wait_angle: float = float(np.pi / 4)
    alpha_abs: float = 0.6
    beta_phase: float = 0.0
    n_support: int = 2
    seed: int = 7
    dt: float | None = None
    richardson: bool = False
    tolerance: float = 1e-9
    axis: str | None = None
    values: str | None = None
    output: str | None = None


def validate_config(cfg: RunConfig) -> list:
    """Schema and invariant checks; an empty list means the config is runnable."""
    errors = []
    if cfg.experiment not in EXPERIMENTS:
        errors.append(f"unknown experiment {cfg.experiment!r}")
    if cfg.mode not in ("full", "effective"):
        errors.append(f"mode must be 'full' or 'effective', got {cfg.mode!r}")
    if cfg.w <= 0:
        errors.append(f"w must be positive, got {cfg.w}")
    if cfg.U_max < 0:
        errors.append("U_max must be nonnegative")
    if cfg.Uprime_max is not None and cfg.Uprime_max < 0:
        errors.append("Uprime_max must be nonnegative")
    if cfg.bell_U is not None and cfg.bell_U <= 0:
        errors.append("bell_U must be positive when given")
    for name in ("T_ent", "T_couple", "T_ghz"):
        v = getattr(cfg, name)
        if v is not None and v <= 0:
            errors.append(f"{name} must be positive when given")
    if not 0.0 <= cfg.alpha_abs <= 1.0:
        errors.append(f"alpha_abs must lie in [0, 1], got {cfg.alpha_abs}")
    if not 2 <= cfg.n_support <= 11:
        errors.append(f"n_support must lie in [2, 11], got {cfg.n_support}")
    if cfg.dt is not None and cfg.dt <= 0:
        errors.append("dt must be positive when given")
    if cfg.tolerance <= 0:
        errors.append("tolerance must be positive")
    if cfg.axis is not None and cfg.axis not in SWEEP_AXES:
        errors.append(f"unknown sweep axis {cfg.axis!r}; choose from {', '.join(SWEEP_AXES)}")
    if cfg.axis is not None or cfg.values is not None:
        if cfg.axis is None or cfg.values is None:
            errors.append("a sweep needs both --axis and --values")
        elif cfg.axis in SWEEP_AXES:
            try:
                parse_values(cfg.axis, cfg.values)
            except ValueError as exc:
                errors.append(str(exc))
    if cfg.w > 0 and cfg.U_max > 0 and cfg.w / cfg.U_max > 0.1:
        print(f"advisory: w/U_max = {cfg.w / cfg.U_max:.3f} > 0.1; "
              "the effective two-level picture degrades", file=sys.stderr)
    return errors


def parse_values(axis: str, text: str) -> list:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            out.append(int(piece) if axis in ("n_support", "seed") else float(piece))
        except ValueError:
            raise ValueError(f"cannot parse sweep value {piece!r} for axis {axis}")
    if not out:
        raise ValueError("sweep value list is empty")
    return out


def build_params(cfg: RunConfig) -> proto.ProtocolParams:
    return proto.ProtocolParams(
        w=cfg.w, phi=cfg.phi, U_max=cfg.U_max, Uprime_max=cfg.Uprime_max,
        T_ent=cfg.T_ent, T_couple=cfg.T_couple, bell_U=cfg.bell_U,
        wait_angle=cfg.wait_angle, mode=cfg.mode, seed=cfg.seed,
        integrator=PropagatorConfig(dt=cfg.dt, richardson_check=cfg.richardson,
                                    tolerance=cfg.tolerance),
    )


def input_qubit(cfg: RunConfig) -> proto.InputQubit:
    a = cfg.alpha_abs
    b = np.sqrt(max(0.0, 1.0 - a * a)) * np.exp(1j * cfg.beta_phase)
    return proto.InputQubit(a, b)


def _param_cells(cfg: RunConfig) -> dict:
    params = build_params(cfg)
    return {
        "experiment": cfg.experiment,
        "mode": cfg.mode,
        "w": cfg.w,
        "phi": cfg.phi,
        "U_max": cfg.U_max,
        "Uprime_max": params.resolved_Uprime(),
        "bell_U": params.resolved_bell_U(),
        "T_ent": params.resolved_T_ent(),
        "T_couple": cfg.T_couple if cfg.T_couple is not None else "",
        "T_ghz": cfg.T_ghz if cfg.T_ghz is not None else "",
        "wait_angle": cfg.wait_angle,
        "alpha_abs": cfg.alpha_abs,
        "beta_phase": cfg.beta_phase,
        "n_support": cfg.n_support,
        "seed": cfg.seed,
        "dt": cfg.dt if cfg.dt is not None else "",
    }


def run_experiment(cfg: RunConfig) -> dict:
    """Execute one experiment and return its CSV row cells."""
    row = _param_cells(cfg)
    params = build_params(cfg)
    target = input_qubit(cfg)

    if cfg.experiment == "encode":
        enc = proto.encode_qubit(target, cfg.w, cfg.phi)
        row.update(
            t_bar=enc.t_bar,
            achieved_alpha_re=enc.achieved.alpha.real,
            achieved_alpha_im=enc.achieved.alpha.imag,
            achieved_beta_re=enc.achieved.beta.real,
            achieved_beta_im=enc.achieved.beta.imag,
        )
        return row

    if cfg.experiment == "entangle":
        state, diag = proto.make_entangled_pair(params)
        row.update(
            bell_overlap_sq=fidelity(state, proto.bell_target(2)),
            reference_overlap_sq=fidelity(
                state, proto.entangled_pair_reference(cfg.U_max, cfg.w)),
            ground_overlap_sq=diag.final_ground_overlap_sq if diag else 1.0,
            min_gap=diag.min_gap if diag else "",
            concurrence=concurrence(state),
        )
        return row

    enc = proto.encode_qubit(target, cfg.w, cfg.phi)

    if cfg.experiment in ("couple", "bell"):
        pair, _ = proto.make_entangled_pair(params)
        coupled = proto.couple_unknown(enc.state, pair, params)
        ghz_ref = proto.ghz_encoded(enc.achieved.alpha, enc.achieved.beta, 3)
        if cfg.experiment == "couple":
            row.update(
                target_overlap_sq=fidelity(coupled, ghz_ref),
                norm=float(np.linalg.norm(coupled.amps)),
            )
            return row
        om = proto.effective_rabi(cfg.w, params.resolved_bell_U())
        t_wait = cfg.wait_angle / om
        post = proto.bell_evolution(coupled, params, t_wait)
        eff = replace(params, mode="effective")
        meas = measure_qubit(post, 0)
        row.update(
            p0=meas.p0,
            p1=meas.p1,
            effective_overlap_sq=fidelity(post, proto.bell_evolution(ghz_ref, eff, t_wait)),
        )
        return row

    if cfg.experiment == "teleport":
        res = proto.teleport_end_to_end(target, params)
        by_outcome = {b.outcome: b for b in res.branches}
        row.update(
            outcome=res.outcome, p0=res.p0, p1=res.p1,
            fidelity=res.fidelity_to_input,
            fidelity_branch0=by_outcome[0].fidelity if 0 in by_outcome else "",
            fidelity_branch1=by_outcome[1].fidelity if 1 in by_outcome else "",
        )
        return row

    if cfg.experiment == "chain":
        res = teleport_over_chain(target, ChainSpec(cfg.n_support, params, cfg.T_ghz))
        by_outcome = {b.outcome: b for b in res.branches}
        row.update(
            outcome=res.outcome, p0=res.p0, p1=res.p1,
            fidelity=res.fidelity_to_input,
            fidelity_branch0=by_outcome[0].fidelity if 0 in by_outcome else "",
            fidelity_branch1=by_outcome[1].fidelity if 1 in by_outcome else "",
            ghz_overlap_sq=res.step_log["channel"]["ghz_overlap_sq"],
        )
        return row

    raise ConfigError(f"unknown experiment {cfg.experiment!r}")


def _sweep_workers(n_points: int) -> int:
    raw = os.environ.get("DQD_SIM_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(f"DQD_SIM_THREADS must be an integer, got {raw!r}")
    if cap <= 0:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_points))


def run_sweep(cfg: RunConfig) -> list:
    values = parse_values(cfg.axis, cfg.values)
    points = []
    for v in sorted(values):
        point = replace(cfg, axis=None, values=None)
        setattr(point, cfg.axis, v)
        points.append(point)
    workers = _sweep_workers(len(points))
    if workers == 1:
        return [run_experiment(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_experiment, points))


def format_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def write_outputs(cfg: RunConfig, rows: list, columns: tuple, out_base: str):
    csv_path = out_base + ".csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row.get(c, "")) for c in columns])
    manifest = {
        "config": asdict(cfg),
        "seed": cfg.seed,
        "versions": {
            "dqdsim": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
    }
    with open(out_base + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path


def run(cfg: RunConfig) -> int:
    """Validate, execute and write artifacts; returns the process exit code."""
    errors = validate_config(cfg)
    if errors:
        for e in errors:
            print(f"config error: {e}", file=sys.stderr)
        return 2
    is_sweep = cfg.axis is not None
    try:
        rows = run_sweep(cfg) if is_sweep else [run_experiment(cfg)]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    columns = PARAM_COLUMNS + RESULT_COLUMNS[cfg.experiment]
    out_base = cfg.output or (f"sweep_{cfg.experiment}_{cfg.axis}" if is_sweep else cfg.experiment)
    csv_path = write_outputs(cfg, rows, columns, out_base)
    print(f"wrote {csv_path} ({len(rows)} row{'s' if len(rows) != 1 else ''})")
    return 0


# --------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--mode", choices=("full", "effective"))
    p.add_argument("--w", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--u-max", dest="U_max", type=float)
    p.add_argument("--uprime-max", dest="Uprime_max", type=float)
    p.add_argument("--bell-u", dest="bell_U", type=float)
    p.add_argument("--t-ent", dest="T_ent", type=float)
    p.add_argument("--t-couple", dest="T_couple", type=float)
    p.add_argument("--t-ghz", dest="T_ghz", type=float)
    p.add_argument("--wait-angle", dest="wait_angle", type=float)
    p.add_argument("--alpha-abs", dest="alpha_abs", type=float)
    p.add_argument("--beta-phase", dest="beta_phase", type=float)
    p.add_argument("--n-support", dest="n_support", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--richardson", action="store_true", default=None)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--output", help="basename for the .csv/.manifest.json pair")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqdsim",
        description="Charge-qubit teleportation experiments on simulated DQD arrays.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        _add_common(sp)
        sp.add_argument("--axis", help="sweep this parameter instead of a single run")
        sp.add_argument("--values", help="comma-separated sweep values")
    sw = sub.add_parser("sweep", help="sweep a parameter of another experiment")
    _add_common(sw)
    sw.add_argument("--experiment", dest="inner_experiment", choices=EXPERIMENTS,
                    default="teleport")
    sw.add_argument("--axis", required=True)
    sw.add_argument("--values", required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, an optional JSON config file, and CLI flags (strongest)."""
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        valid = {f.name for f in fields(RunConfig)}
        for key, value in doc.items():
            if key not in valid:
                raise ConfigError(f"unknown config field {key!r}")
            setattr(cfg, key, value)
    for f in fields(RunConfig):
        if f.name in ("experiment",):
            continue
        v = getattr(args, f.name, None)
        if v is not None:
            setattr(cfg, f.name, v)
    # the sweep subcommand names its target experiment; others are themselves
    cfg.experiment = getattr(args, "inner_experiment", None) or args.experiment
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(config_from_args(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
