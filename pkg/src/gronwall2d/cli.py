"""Command-line adapter: parse parameters, call the library, write results.

Parameters come from three layers, later ones winning: built-in defaults,
``--config FILE`` (YAML or JSON mapping), then explicit flags and
``--set key=value``. Unknown keys in a config file or ``--set`` are errors.

Exit status: 0 on success, 1 on invalid input, 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from .bound_engine import (
    ModelConstants,
    integrate_bound,
    picard_solve,
    thresholds,
)
from .errors import NumericalFailure
from .experiments import (
    RunManifest,
    SweepSpec,
    run_sweep,
    sim_vs_bound,
    write_sim_vs_bound,
)
from .spectral2d import Grid2D, InitSpec, SimConfig, init_from_spec, simulate, write_series
from .spectral2d.io import write_snapshot


class UsageError(ValueError):
    pass


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


_SIM = {
    "n": (int, 64),
    "dt": (float, 1e-3),
    "t_end": (float, 1.0),
    "epsilon": (float, 0.0),
    "system": (str, "boussinesq"),
    "seed": (int, 0),
    "pressure_tol": (float, 1e-13),
    "pressure_max_iter": (int, 50),
    "cfl_max": (float, 0.5),
    "init": (str, "random_band"),
    "target_u_h3": (float, 10.0),
    "target_phi_h3": (float, 10.0),
    "nonneg_phi": (_bool, False),
    "sample_every": (int, 1),
}

# key -> (parser, default); None as default means required
SCHEMAS: dict[str, dict[str, tuple]] = {
    "thresholds": {
        "c_const": (float, 1.0),
        "horizon": (float, 1.0),
        "m_bound": (float, None),
        "b_const": (float, math.exp(-1.0)),
    },
    "bound": {
        "system": (str, "boussinesq"),
        "epsilon": (float, 0.0),
        "z0": (float, math.e),
        "c_const": (float, 1.0),
        "horizon": (float, 1.0),
        "b_const": (float, math.exp(-1.0)),
        "rtol": (float, 1e-10),
        "atol": (float, 1e-12),
        "n_eval": (int, 100),
    },
    "picard": {
        "w0": (float, 2.0),
        "epsilon": (float, 0.01),
        "c_const": (float, 1.0),
        "horizon": (float, 0.1),
        "b_const": (float, math.exp(-1.0)),
        "grid_n": (int, 1000),
        "tol": (float, 1e-10),
        "max_iter": (int, 200),
    },
    "simulate": dict(_SIM),
    "sweep": {
        "variable": (str, None),
        "values": (_floats, None),
        "c_const": (float, 1.0),
        "horizon": (float, 1.0),
        "epsilon": (float, 0.0),
        "b_const": (float, math.exp(-1.0)),
        "m_tilde": (float, 1.0),
        "w0": (float, 2.0),
        "grid_n": (int, 1000),
        "tol": (float, 1e-10),
        "t_cap": (float, 10.0),
        "workers": (int, 0),
    },
    "compare": {
        **_SIM,
        "c_const": (float, 1.0),
        "b_const": (float, math.exp(-1.0)),
        "calibrate": (_bool, True),
        "calibration": (str, "t0"),
        "z0_offset": (float, 1.0),
    },
}

# flag name -> schema key, per subcommand
FLAGS: dict[str, dict[str, str]] = {
    "thresholds": {"--C": "c_const", "--T": "horizon", "--M": "m_bound", "--b": "b_const"},
    "bound": {"--system": "system", "--eps": "epsilon", "--z0": "z0", "--C": "c_const",
              "--T": "horizon", "--b": "b_const", "--rtol": "rtol", "--atol": "atol",
              "--n-eval": "n_eval"},
    "picard": {"--w0": "w0", "--eps": "epsilon", "--C": "c_const", "--T": "horizon",
               "--b": "b_const", "--grid-n": "grid_n", "--tol": "tol", "--max-iter": "max_iter"},
    "simulate": {"--n": "n", "--dt": "dt", "--T": "t_end", "--eps": "epsilon",
                 "--system": "system", "--seed": "seed", "--init": "init"},
    "sweep": {"--variable": "variable", "--values": "values", "--workers": "workers"},
    "compare": {"--n": "n", "--dt": "dt", "--T": "t_end", "--eps": "epsilon",
                "--system": "system", "--seed": "seed", "--init": "init", "--C": "c_const"},
}

HELP = {
    "thresholds": "contraction thresholds eps1, eps2, eps0 as JSON",
    "bound": "integrate the bound equation through its augmented ODE",
    "picard": "solve the mild form by Picard iteration",
    "simulate": "run the pseudo-spectral simulation (requires --config)",
    "sweep": "sweep one parameter and write summary.csv",
    "compare": "simulate and compare the continuation norm against the bound",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gronwall2d", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, flags in FLAGS.items():
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", type=Path, help="YAML or JSON parameter file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one parameter (repeatable)")
        p.add_argument("--out", type=Path, help="output directory")
        for flag, key in flags.items():
            p.add_argument(flag, dest=f"opt_{key}", default=None, metavar=key.upper())
        if name == "thresholds":
            p.add_argument("--m-tilde", dest="opt_m_tilde", default=None,
                           help="initial value w0; sets M = 2 * m_tilde")
    return parser


def _load_config(path: Path | None, required: bool) -> dict:
    if path is None:
        if required:
            raise UsageError("--config is required for this command")
        return {}
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise UsageError(f"{path}: top level must be a mapping")
    return data


def resolve_params(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config file, flags and ``--set`` with strict key checking."""
    schema = SCHEMAS[command]
    raw: dict = {}
    for key, value in _load_config(args.config, required=command == "simulate").items():
        if key not in schema:
            raise UsageError(f"unknown config key {key!r} for {command}")
        raw[key] = value
    for key in schema:
        value = getattr(args, f"opt_{key}", None)
        if value is not None:
            raw[key] = value
    for item in args.set:
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in schema:
            raise UsageError(f"unknown override {item!r} for {command}")
        raw[key] = value
    if command == "thresholds" and getattr(args, "opt_m_tilde", None) is not None:
        if "m_bound" in raw:
            raise UsageError("give only one of --M and --m-tilde")
        raw["m_bound"] = 2.0 * float(args.opt_m_tilde)

    params = {}
    for key, (conv, default) in schema.items():
        if key in raw:
            try:
                params[key] = conv(raw[key])
            except (TypeError, ValueError) as exc:
                raise UsageError(f"bad value for {key}: {raw[key]!r}") from exc
        elif default is None:
            raise UsageError(f"missing required parameter {key!r}")
        else:
            params[key] = default
    return params


def _sim_objects(p: dict) -> tuple[SimConfig, InitSpec]:
    cfg = SimConfig(Grid2D(p["n"]), p["dt"], p["t_end"], p["epsilon"], p["system"],
                    p["pressure_tol"], p["pressure_max_iter"], p["seed"], p["cfl_max"])
    init = InitSpec(p["init"], p["target_u_h3"], p["target_phi_h3"], p["nonneg_phi"])
    return cfg, init


def _emit(obj: dict) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _prepare_out(out: Path | None) -> Path | None:
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_thresholds(p: dict, out: Path | None) -> None:
    mc = ModelConstants(p["c_const"], p["horizon"], b_const=p["b_const"])
    report = thresholds(p["m_bound"] / 2.0, mc)
    print(report.to_json())
    if _prepare_out(out):
        report.to_json(out / "thresholds.json")
        RunManifest(p, 0, {"thresholds": "thresholds.json"}).finish(out)


def cmd_bound(p: dict, out: Path | None) -> None:
    mc = ModelConstants(p["c_const"], p["horizon"], p["epsilon"], p["b_const"])
    grid = np.linspace(0.0, mc.horizon, max(p["n_eval"], 1) + 1)
    traj = integrate_bound(p["system"], p["z0"], mc, p["rtol"], p["atol"], t_eval=grid)
    _emit({"system": p["system"], "t_end": traj.t_end, "final": traj.final})
    if _prepare_out(out):
        traj.to_csv(out / "trajectory.csv")
        RunManifest(p, 0, {"trajectory": "trajectory.csv"}).finish(out)


def cmd_picard(p: dict, out: Path | None) -> None:
    mc = ModelConstants(p["c_const"], p["horizon"], p["epsilon"], p["b_const"])
    res = picard_solve(p["w0"], mc, p["grid_n"], p["tol"], p["max_iter"])
    _emit({"iterations": res.iterations, "contraction_estimate": res.contraction_estimate,
           "in_regime": res.in_regime, "final_w": res.trajectory.final})
    if _prepare_out(out):
        res.trajectory.to_csv(out / "w.csv")
        RunManifest(p, 0, {"w": "w.csv"}).finish(out)


def cmd_simulate(p: dict, out: Path | None) -> None:
    cfg, init = _sim_objects(p)
    f0 = init_from_spec(init, cfg.grid, cfg.seed)
    manifest = RunManifest(p, cfg.seed)
    res = simulate(cfg, f0, sample_every=p["sample_every"], check_invariants=True)
    last = res.history[-1]
    _emit({"steps": res.steps, "t": last.t, "u_h3": last.u_h3, "phi_h3": last.phi_h3,
           "y_norm": last.y_norm, "invariant_failures": len(res.invariant_failures)})
    if _prepare_out(out):
        write_series(res.history, out / "series.csv")
        g = cfg.grid
        write_snapshot(out / "omega.bin", g.ifft(res.final.omega_hat), "omega", g, last.t)
        write_snapshot(out / "phi.bin", g.ifft(res.final.phi_hat), "phi", g, last.t)
        manifest.outputs = {"series": "series.csv", "omega": "omega.bin", "phi": "phi.bin"}
        manifest.checks = {"invariants": not res.invariant_failures}
        manifest.finish(out)


def cmd_sweep(p: dict, out: Path | None) -> None:
    base = {k: v for k, v in p.items() if k not in ("variable", "values", "workers")}
    spec = SweepSpec(p["variable"], tuple(p["values"]), base, out)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    table = run_sweep(spec, p["workers"] or None)
    _emit({"columns": table.columns, "rows": table.rows, "regression": table.regression})
    if out is not None:
        outputs = {"summary": "summary.csv"}
        if table.regression is not None:
            outputs["regression"] = "regression.json"
        RunManifest(p, 0, outputs).finish(out)


def cmd_compare(p: dict, out: Path | None) -> None:
    cfg, init = _sim_objects(p)
    mc = ModelConstants(p["c_const"], cfg.t_end, min(cfg.epsilon, 1.0), p["b_const"])
    report = sim_vs_bound(cfg, mc, p["calibrate"], init, sample_every=p["sample_every"],
                          z0_offset=p["z0_offset"], calibration=p["calibration"])
    _emit(report.summary())
    if out is not None:
        write_sim_vs_bound(report, out, p, cfg.seed)


COMMANDS = {
    "thresholds": cmd_thresholds,
    "bound": cmd_bound,
    "picard": cmd_picard,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params = resolve_params(args.command, args)
        COMMANDS[args.command](params, args.out)
    except NumericalFailure as exc:
        when = "" if exc.time is None else f" (reached t={exc.time:.6g})"
        print(f"numerical failure{when}: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
