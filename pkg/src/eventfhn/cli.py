"""Experiment configuration, orchestration and result files.

Usage::

    eventfhn run --config cfg.json [--mode event_triggered] [--out results/]
    eventfhn sweep --config cfg.json
    eventfhn certify --config cfg.json
    eventfhn kernel-table --config cfg.json
"""

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import analysis
from .discretization import build_grid, build_system
from .kernel import gain_norm, gain_vector, transform_matrices
from .params import SystemParams
from .simulator import MODES, run, sample_initial

log = logging.getLogger(__name__)

SWEEP_AXES = ("lambda_damp", "beta", "epsilon")
PROFILES = ("paper_default", "zero", "custom")
_PARAM_KEYS = tuple(f.name for f in fields(SystemParams))
_GRID_KEYS = ("n_interior", "n_steps", "horizon")
_OTHER_KEYS = ("mode", "profile", "out_dir", "sweep_axis", "sweep_values", "seed", "v0", "w0", "cap_n")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams = field(default_factory=SystemParams)
    n_interior: int = 40
    n_steps: int = 2000
    horizon: float = 6.0
    mode: str = "event_triggered"
    profile: str = "paper_default"
    out_dir: str = "results"
    sweep_axis: str = None
    sweep_values: tuple = ()
    seed: int = 0
    v0: tuple = None
    w0: tuple = None
    cap_n: int = 200

    def plan(self):
        """One ``(label, params)`` pair per run; a single entry without a sweep."""
        if self.sweep_axis is None:
            return [(self.mode, self.params)]
        return [
            (f"{self.mode}_{self.sweep_axis}={_fmt(v)}", replace(self.params, **{self.sweep_axis: v}))
            for v in self.sweep_values
        ]


def _fmt(x):
    return format(float(x), ".17g")


def config_from_dict(doc):
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = set(doc) - set(_PARAM_KEYS) - set(_GRID_KEYS) - set(_OTHER_KEYS)
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")

    pvals = {k: doc[k] for k in _PARAM_KEYS if k in doc}
    for k, v in pvals.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{k}: expected a number, got {v!r}")
    try:
        params = SystemParams(**{k: float(v) for k, v in pvals.items()})
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    kw = {"params": params}
    for k in ("n_interior", "n_steps", "seed", "cap_n"):
        if k in doc:
            if isinstance(doc[k], bool) or not isinstance(doc[k], int):
                raise ConfigError(f"{k}: expected an integer, got {doc[k]!r}")
            kw[k] = doc[k]
    if "horizon" in doc:
        kw["horizon"] = float(doc["horizon"])
    for k in ("mode", "profile", "out_dir"):
        if k in doc:
            kw[k] = str(doc[k])
    if kw.get("mode", "event_triggered") not in MODES:
        raise ConfigError(f"mode: expected one of {MODES}, got {kw['mode']!r}")
    if kw.get("profile", "paper_default") not in PROFILES:
        raise ConfigError(f"profile: expected one of {PROFILES}, got {kw['profile']!r}")
    if kw.get("profile") == "custom":
        if "v0" not in doc or "w0" not in doc:
            raise ConfigError("profile: custom profile needs v0 and w0 tables")
        kw["v0"] = tuple(float(x) for x in doc["v0"])
        kw["w0"] = tuple(float(x) for x in doc["w0"])

    if "sweep_axis" in doc or "sweep_values" in doc:
        axis = doc.get("sweep_axis")
        if axis not in SWEEP_AXES:
            raise ConfigError(f"sweep_axis: expected one of {SWEEP_AXES}, got {axis!r}")
        values = doc.get("sweep_values")
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep_values: expected a non-empty list of numbers")
        for v in values:
            try:
                replace(params, **{axis: float(v)})
            except ValueError as exc:
                raise ConfigError(f"sweep_values: {exc}") from None
        kw["sweep_axis"] = axis
        kw["sweep_values"] = tuple(float(v) for v in values)

    cfg = ExperimentConfig(**kw)
    try:
        grid = build_grid(cfg.n_interior, cfg.n_steps, cfg.horizon)
        if cfg.profile == "custom":
            sample_initial(grid, "custom", (cfg.v0, cfg.w0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path):
    """Read a flat JSON document; missing fields take the desk-experiment defaults."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return config_from_dict(doc)


def certify(params, grid=None, cap_n=200):
    """Certificates that need no simulation."""
    kp = params.kernel_params()
    grid = grid or build_grid(40, 1, 1.0)
    tm = transform_matrices(grid, kp)
    knorm = gain_norm(kp)
    out = {
        "gain_norm": knorm,
        "pi_norm": tm.pi_norm,
        "pi_inv_norm": tm.pi_inv_norm,
        "gronwall_c": analysis.gronwall_constant(params),
        "instability": analysis.instability_check(params),
    }
    try:
        out["lambda_1"] = analysis.mode_spectrum(1, params).lambda_n
    except ValueError:
        out["lambda_1"] = None
    try:
        out["vartheta"] = analysis.iss_gain(params)
        out["phi_e"] = analysis.certificate_phi(params.beta, out["vartheta"], knorm, tm.pi_inv_norm)
    except ValueError:
        out["vartheta"] = out["phi_e"] = None
    try:
        tau, consts = analysis.dwell_time_bound(params, cap_n=cap_n)
        out["tau"] = tau
        out["dwell_n_trunc"] = consts.n_trunc
        out["dwell_error"] = None
    except ValueError as exc:
        out["tau"] = None
        out["dwell_n_trunc"] = None
        out["dwell_error"] = str(exc)
    return out


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def run_one(cfg, label, params, out_root):
    grid = build_grid(cfg.n_interior, cfg.n_steps, cfg.horizon)
    system = build_system(grid, params)
    table = (cfg.v0, cfg.w0) if cfg.profile == "custom" else None
    initial = sample_initial(grid, cfg.profile, table)
    try:
        traj, events = run(system, grid, params, initial, cfg.mode)
    except Exception as exc:
        raise RuntimeError(f"run {label!r} failed: {exc}") from exc

    out = Path(out_root) / label
    out.mkdir(parents=True, exist_ok=True)
    n = grid.n_interior
    t = grid.t_nodes
    _write_csv(
        out / "trajectory.csv",
        ["t", "x_index", "v", "w"],
        ((_fmt(t[k]), i + 1, _fmt(traj.states[k, i]), _fmt(traj.states[k, n + i])) for k in range(t.size) for i in range(n)),
    )
    nv, nw = traj.norms()
    _write_csv(out / "norms.csv", ["t", "norm_v", "norm_w", "V"], ((_fmt(t[k]), _fmt(nv[k]), _fmt(nw[k]), _fmt(nv[k] + nw[k])) for k in range(t.size)))
    fired = set(events.trigger_steps)
    _write_csv(
        out / "control.csv",
        ["t", "q", "is_trigger"],
        ((_fmt(t[k + 1]), _fmt(traj.controls[k]), int(k + 1 in fired)) for k in range(grid.n_steps)),
    )
    times = events.trigger_times
    _write_csv(
        out / "events.csv",
        ["j", "t_j", "gap"],
        ((j, _fmt(tj), "" if j == 0 else _fmt(events.gaps[j - 1])) for j, tj in enumerate(times)),
    )

    try:
        slope = analysis.decay_rate_fit(traj, (cfg.horizon / 3.0, cfg.horizon))
    except ValueError:
        slope = None
    gaps = events.gaps
    summary = {
        "label": label,
        "mode": cfg.mode,
        "params": asdict(params),
        "grid": {"n_interior": grid.n_interior, "n_steps": grid.n_steps, "horizon": grid.horizon, "h": grid.h, "dt": grid.dt},
        "fit_window": [cfg.horizon / 3.0, cfg.horizon],
        "decay_rate": slope,
        "trigger_count": events.count,
        "min_gap": min(gaps) if gaps else None,
        "mean_gap": float(np.mean(gaps)) if gaps else None,
        "initial_norm": float(nv[0] + nw[0]),
        "final_norm": float(nv[-1] + nw[-1]),
        "discrete_gain_norm": system.gain_norm,
    }
    summary.update(certify(params, grid, cfg.cap_n))
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    log.info("wrote %s", out)
    return label, summary


def run_experiment(cfg, out_dir=None, max_workers=None):
    """Run every planned experiment; returns ``(status, {label: summary})``."""
    root = Path(out_dir or cfg.out_dir)
    root.mkdir(parents=True, exist_ok=True)
    plan = cfg.plan()
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = dict(pool.map(lambda item: run_one(cfg, item[0], item[1], root), plan))
    if cfg.sweep_axis is not None:
        index = {
            "sweep_axis": cfg.sweep_axis,
            "runs": [{"label": lbl, "value": v} for (lbl, _), v in zip(plan, cfg.sweep_values)],
        }
        (root / "sweep_index.json").write_text(json.dumps(index, indent=2) + "\n")
    return 0, results


def kernel_table(params, grid):
    """Rows ``(i, x_i, k(1, x_i))`` on the interior nodes."""
    k = gain_vector(grid, params.kernel_params())
    return [(i + 1, float(x), float(kv)) for i, (x, kv) in enumerate(zip(grid.x_nodes, k))]


def _parser():
    ap = argparse.ArgumentParser(prog="eventfhn", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="single simulation")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--mode", choices=MODES)
    p_run.add_argument("--out")
    p_sweep = sub.add_parser("sweep", help="runs over sweep_axis/sweep_values")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out")
    for name, text in (("certify", "print vartheta, Phi_e, tau, lambda_1"), ("kernel-table", "emit k(1, x_i) as CSV")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True)
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "run":
            if args.mode:
                cfg = replace(cfg, mode=args.mode)
            cfg = replace(cfg, sweep_axis=None, sweep_values=())
            status, _ = run_experiment(cfg, args.out)
            return status
        if args.command == "sweep":
            if cfg.sweep_axis is None:
                print("error: sweep needs sweep_axis and sweep_values in the config", file=sys.stderr)
                return 2
            status, _ = run_experiment(cfg, args.out)
            return status
        grid = build_grid(cfg.n_interior, cfg.n_steps, cfg.horizon)
        if args.command == "certify":
            print(json.dumps(certify(cfg.params, grid, cfg.cap_n), indent=2, sort_keys=True))
            return 0
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["i", "x", "k1"])
        writer.writerows((i, _fmt(x), _fmt(k)) for i, x, k in kernel_table(cfg.params, grid))
        return 0
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
