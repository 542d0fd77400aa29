"""Command-line front end: simulate / impact / paradox-map / sweep.

Configuration lives in a JSON file (see RunConfig) with a schema_version
field; a few flags override it per invocation.  Outputs are a trajectory CSV
(columns t,x,y,theta,xdot,ydot,thetadot,mode, full-precision, dot decimal
point), an events JSONL stream, a paradox-region CSV and sweep summary CSVs.

Exit codes: 0 success, 1 configuration/grid error, 2 run terminated on the
Coulomb paradox (simulate, classical mode), 3 impact command invoked on a
state that is not on the line.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import copy
import itertools
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .classical import critical_mu, paradox_map
from .errors import InvalidGrid, ModelError, NotOnContact
from .geometry import Config, Params, State, VerticalVector
from .impact import Law, LawParams, apply, classify
from .simulator import (EventKind, ModeKind, Trajectory, kinetic_energy, run,
                        total_energy)

SCHEMA_VERSION = 1

_LAW_FIELDS = ("epsilon", "mu_cap", "lambda1", "lambda2", "alpha1", "alpha2",
               "gamma", "sigma_gain", "b_unilateral", "sign_convention",
               "detach_variant", "e_newton")
_PARAM_FIELDS = ("m", "L", "A", "g", "mu_s", "mu_d", "tol")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    params: Params
    law: Law
    mode: str
    initial: State
    t_max: float
    dt: float = 1e-4
    dt_out: float = 1e-2
    out_dir: str = "."
    trajectory_csv: str = "trajectory.csv"
    events_jsonl: str = "events.jsonl"
    coulomb_in_rgims: bool = False
    seed: int = 0

    @staticmethod
    def from_dict(raw: dict) -> "RunConfig":
        try:
            return _config_from_dict(raw)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        p = self.params
        lp = self.law.params
        c = self.initial.config
        v = self.initial.vel
        return {
            "schema_version": SCHEMA_VERSION,
            "params": {k: getattr(p, k) for k in _PARAM_FIELDS},
            "law": {"family": self.law.family,
                    **{k: getattr(lp, k) for k in _LAW_FIELDS}},
            "mode": self.mode,
            "initial": {"t": c.t, "x": c.x, "y": c.y, "theta": c.theta,
                        "xdot": v.dx, "ydot": v.dy, "thetadot": v.dtheta},
            "t_max": self.t_max,
            "dt": self.dt,
            "dt_out": self.dt_out,
            "out_dir": self.out_dir,
            "trajectory_csv": self.trajectory_csv,
            "events_jsonl": self.events_jsonl,
            "coulomb_in_rgims": self.coulomb_in_rgims,
            "seed": self.seed,
        }

    @staticmethod
    def load(path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return RunConfig.from_dict(raw)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def _config_from_dict(raw: dict) -> RunConfig:
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    params = Params(**{k: float(raw["params"][k])
                       for k in _PARAM_FIELDS if k in raw["params"]})
    law_raw = dict(raw["law"])
    family = law_raw.pop("family")
    law = Law(family, LawParams(**law_raw))
    mode = raw["mode"]
    if mode not in ("rgims", "classical"):
        raise ConfigError(f"mode must be 'rgims' or 'classical', got {mode!r}")
    init = dict(raw["initial"])
    theta = float(init["theta"])
    thetadot = float(init.get("thetadot", 0.0))
    # convenience forms: y defaults to contact, "slip" / tangent ydot
    if "y" in init:
        y = float(init["y"])
    else:
        y = params.L * math.sin(theta)
    if "ydot" in init:
        ydot = float(init["ydot"])
    else:
        ydot = params.L * thetadot * math.cos(theta)
    if "xdot" in init:
        xdot = float(init["xdot"])
    elif "slip" in init:
        xdot = float(init["slip"]) + params.L * thetadot * math.sin(theta)
    else:
        xdot = 0.0
    state = State(
        Config(t=float(init.get("t", 0.0)), x=float(init.get("x", 0.0)),
               y=y, theta=theta),
        VerticalVector(xdot, ydot, thetadot))
    return RunConfig(
        params=params, law=law, mode=mode, initial=state,
        t_max=float(raw["t_max"]),
        dt=float(raw.get("dt", 1e-4)),
        dt_out=float(raw.get("dt_out", 1e-2)),
        out_dir=str(raw.get("out_dir", ".")),
        trajectory_csv=str(raw.get("trajectory_csv", "trajectory.csv")),
        events_jsonl=str(raw.get("events_jsonl", "events.jsonl")),
        coulomb_in_rgims=bool(raw.get("coulomb_in_rgims", False)),
        seed=int(raw.get("seed", 0)),
    )


# ---------------------------------------------------------------------------
# serialization of runs
# ---------------------------------------------------------------------------

TRAJECTORY_HEADER = "t,x,y,theta,xdot,ydot,thetadot,mode"
PARADOX_MAP_HEADER = "theta,mu,label,b,c"


def write_trajectory_csv(traj: Trajectory, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for state, mode in traj.samples:
            c = state.config
            v = state.vel
            fh.write(f"{c.t!r},{c.x!r},{c.y!r},{c.theta!r},"
                     f"{v.dx!r},{v.dy!r},{v.dtheta!r},{mode.label()}\n")


def write_events_jsonl(traj: Trajectory, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in traj.events:
            fh.write(json.dumps({
                "time": e.time,
                "kind": e.kind.value,
                "pre_velocity": list(e.pre_state.vel.as_tuple()),
                "post_velocity": list(e.post_state.vel.as_tuple()),
                "impulse": list(e.impulse.as_tuple()) if e.impulse else None,
                "energy_delta": e.energy_delta,
                "regime": e.regime,
            }) + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "mode", None):
        cfg.mode = args.mode
    if getattr(args, "law", None):
        cfg.law = Law(args.law, cfg.law.params)
    if getattr(args, "t_max", None) is not None:
        cfg.t_max = args.t_max
    if getattr(args, "dt", None) is not None:
        cfg.dt = args.dt
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "out_dir", None):
        cfg.out_dir = args.out_dir
    return cfg


def cmd_simulate(args) -> int:
    try:
        cfg = _apply_overrides(RunConfig.load(args.config), args)
        traj = run(cfg.initial, cfg.params, cfg.law, sim_mode=cfg.mode,
                   t_max=cfg.t_max, dt=cfg.dt, dt_out=cfg.dt_out,
                   coulomb_in_rgims=cfg.coulomb_in_rgims)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    os.makedirs(cfg.out_dir, exist_ok=True)
    write_trajectory_csv(traj, os.path.join(cfg.out_dir, cfg.trajectory_csv))
    write_events_jsonl(traj, os.path.join(cfg.out_dir, cfg.events_jsonl))
    reason = traj.terminated_reason
    if reason == "paradox":
        print("terminated: Coulomb contact paradox", file=sys.stderr)
        return 2
    if reason:
        print(f"warning: terminated early ({reason})", file=sys.stderr)
    return 0


def cmd_impact(args) -> int:
    try:
        cfg = _apply_overrides(RunConfig.load(args.config), args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    state, p, law = cfg.initial, cfg.params, cfg.law
    try:
        cls = classify(state, p, law.params)
    except NotOnContact as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    report = {"classification": cls.tag.value, "n_s": cls.n_s,
              "n_b": cls.n_b, "impact": cls.is_impact}
    if cls.is_impact:
        outcome = apply(law, state, p)
        v = outcome.p_r.vel
        theta = state.config.theta
        report.update({
            "sigma": outcome.coefficients.sigma,
            "beta": outcome.coefficients.beta,
            "regime": outcome.regime,
            "p_R": {"xdot": v.dx, "ydot": v.dy, "thetadot": v.dtheta},
            "impulse": list(outcome.impulse.as_tuple()),
            "slip_R": v.dx - p.L * v.dtheta * math.sin(theta),
            "energy_delta": outcome.energy_delta,
        })
    print(json.dumps(report, indent=2))
    return 0


def cmd_paradox_map(args) -> int:
    try:
        cfg = RunConfig.load(args.config)
        if args.theta_steps < 1 or args.mu_steps < 1:
            raise InvalidGrid("grids need at least one point")
        thetas = np.linspace(args.theta_min, args.theta_max, args.theta_steps)
        mus = np.linspace(args.mu_min, args.mu_max, args.mu_steps)
        cells = paradox_map(thetas, mus, cfg.params, args.slip_sign,
                            thetadot=args.thetadot)
    except (ConfigError, InvalidGrid, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir = args.out_dir or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "paradox_map.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(PARADOX_MAP_HEADER + "\n")
        for cell in cells:
            fh.write(f"{cell.theta!r},{cell.mu!r},{cell.label},"
                     f"{cell.b!r},{cell.c!r}\n")
    mu_star = critical_mu(cfg.params, args.slip_sign)
    print(f"critical_mu={mu_star!r}")
    return 0


def _summarize(raw_cfg: dict) -> dict:
    cfg = RunConfig.from_dict(raw_cfg)
    traj = run(cfg.initial, cfg.params, cfg.law, sim_mode=cfg.mode,
               t_max=cfg.t_max, dt=cfg.dt, dt_out=cfg.dt_out,
               coulomb_in_rgims=cfg.coulomb_in_rgims)
    e0 = total_energy(traj.samples[0][0], cfg.params)
    e1 = total_energy(traj.final_state, cfg.params)
    detached = (traj.final_mode.kind is ModeKind.FREE_FLIGHT
                or any(e.kind is EventKind.LIFT_OFF for e in traj.events))
    return {
        "final_t": traj.final_state.config.t,
        "final_mode": traj.final_mode.label(),
        "energy_initial": e0,
        "energy_final": e1,
        "energy_loss": e0 - e1,
        "detached": int(detached),
        "paradox": int(traj.terminated_reason == "paradox"),
        "n_events": len(traj.events),
    }


def _sweep_cell(job: tuple[dict, tuple[tuple[str, float], ...]]) -> dict:
    raw_cfg, assignment = job
    cfg = copy.deepcopy(raw_cfg)
    for key, value in assignment:
        node = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            node = node[part]
        node[parts[-1]] = value
    row = {key: value for key, value in assignment}
    row.update(_summarize(cfg))
    return row


def _parse_axis(spec: str) -> tuple[str, list[float]]:
    if "=" not in spec:
        raise ConfigError(f"axis spec must be KEY=V1,V2,... got {spec!r}")
    key, _, values = spec.partition("=")
    vals = [float(v) for v in values.split(",") if v.strip() != ""]
    if not vals:
        raise ConfigError(f"axis {key!r} has no values")
    return key, vals


SWEEP_SUMMARY_FIELDS = ("final_t", "final_mode", "energy_initial",
                        "energy_final", "energy_loss", "detached",
                        "paradox", "n_events")


def cmd_sweep(args) -> int:
    try:
        cfg = _apply_overrides(RunConfig.load(args.config), args)
        axes = [_parse_axis(spec) for spec in args.axis]
        if not axes:
            raise ConfigError("sweep needs at least one --axis")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raw = cfg.to_dict()
    keys = [k for k, _ in axes]
    jobs = [(raw, tuple(zip(keys, combo)))
            for combo in itertools.product(*(vals for _, vals in axes))]
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(job) for job in jobs]
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "sweep.csv")
    columns = keys + list(SWEEP_SUMMARY_FIELDS)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(
                row[c] if isinstance(row[c], str) else repr(row[c])
                for c in columns) + "\n")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(sub):
    sub.add_argument("--config", required=True, help="JSON run configuration")
    sub.add_argument("--mode", choices=("rgims", "classical"))
    sub.add_argument("--law", choices=("rebound", "stop", "max_braking",
                                       "detach"))
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out-dir", dest="out_dir")
    sub.add_argument("--t-max", dest="t_max", type=float)
    sub.add_argument("--dt", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="painleve-rod",
        description="Rod-on-a-rough-line contact models: Coulomb baseline "
                    "and impulsive-constraint reformulation.")
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="integrate one trajectory")
    _add_common(sim)
    sim.set_defaults(fn=cmd_simulate)

    imp = subs.add_parser("impact", help="classify and resolve one impact")
    _add_common(imp)
    imp.set_defaults(fn=cmd_impact)

    pm = subs.add_parser("paradox-map",
                         help="scan contact solvability over (theta, mu)")
    _add_common(pm)
    pm.add_argument("--theta-min", type=float, default=0.05)
    pm.add_argument("--theta-max", type=float, default=math.pi - 0.05)
    pm.add_argument("--theta-steps", type=int, default=61)
    pm.add_argument("--mu-min", type=float, default=0.0)
    pm.add_argument("--mu-max", type=float, default=3.0)
    pm.add_argument("--mu-steps", type=int, default=61)
    pm.add_argument("--slip-sign", type=int, choices=(-1, 1), default=-1)
    pm.add_argument("--thetadot", type=float, default=0.0)
    pm.set_defaults(fn=cmd_paradox_map)

    sw = subs.add_parser("sweep", help="run a Cartesian parameter sweep")
    _add_common(sw)
    sw.add_argument("--axis", action="append", default=[],
                    metavar="KEY=V1,V2,...",
                    help="dotted config key and values, e.g. "
                         "law.epsilon=0.1,0.5,0.9 or initial.slip=1,2")
    sw.add_argument("--jobs", type=int, default=1)
    sw.set_defaults(fn=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
