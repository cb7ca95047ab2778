"""Command-line runner: turn a YAML config into simulation artifacts.

Subcommands: terrain | hop | climb | study | calibrate.  Every run is
deterministic given (config, seed); `--seed` overrides the config seed.
All artifacts carry a provenance header (config hash, seed, version) so
a plot can always be traced to the exact run that made it.

Exit codes: 0 success, 1 runtime error, 2 validation error,
3 simulated-system failure (a FAILED climb or an unflyable hop).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .climber import ClimbStatus, run_climb
from .config import (
    build_hop,
    build_robot,
    build_scenario,
    build_study,
    build_terrain,
    config_seed,
    load_config,
)
from .dynamics import (
    BODIES,
    RobotState,
    calibrate_thrust,
    execute_hop,
    hop_apex_height,
)
from .errors import (
    ConfigValidationError,
    ConvergenceError,
    ParameterDomainError,
    PlanningError,
)
from .study import critical_spines, failure_curve, fitness_study
from .terrain import (
    asperities_to_csv,
    extract_asperities,
    generate_patch,
    patch_to_csv,
    write_patch_meta,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_VALIDATION = 2
EXIT_SIM_FAILURE = 3


def _load(args) -> tuple:
    """(config dict, provenance dict, seed) for one command invocation."""
    if args.config is None:
        config, digest = {}, "default"
    else:
        config, digest = load_config(args.config)
    seed = config_seed(config, args.seed)
    provenance = {
        "config_sha256": digest,
        "seed": seed,
        "version": __version__,
    }
    return config, provenance, seed


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _write_json(path, payload, provenance) -> None:
    payload = dict(payload)
    payload["_provenance"] = dict(provenance)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_terrain(args) -> int:
    config, provenance, seed = _load(args)
    params, extent, spacing = build_terrain(config, seed)
    out = _outdir(args)
    patch = generate_patch(params, extent, spacing)
    asperities = extract_asperities(patch)
    patch_to_csv(patch, os.path.join(out, "patch.csv"), provenance=provenance)
    asperities_to_csv(
        asperities, os.path.join(out, "asperities.csv"), provenance=provenance
    )
    write_patch_meta(patch, os.path.join(out, "patch_meta.json"), provenance=provenance)
    print(
        f"terrain: {patch.heights.shape[0]}x{patch.heights.shape[1]} patch, "
        f"{len(asperities)} asperities -> {out}"
    )
    return EXIT_OK


def cmd_hop(args) -> int:
    config, provenance, seed = _load(args)
    robot = build_robot(config)
    hop = build_hop(config, robot)
    body = BODIES[hop.body]
    if hop.calibrate and robot.thrust <= 0.0:
        robot = calibrate_thrust(
            body, robot, climb_height=hop.height, hop_time=hop.hop_time
        )
    out = _outdir(args)
    state = RobotState(
        position=np.zeros(3), velocity=np.zeros(3), propellant=hop.propellant
    )
    start = state.position.copy()
    result = execute_hop(
        state,
        robot,
        body,
        np.array(hop.displacement),
        hop_time=hop.hop_time,
        dt=hop.dt,
        control=hop.control,
        allow_extended_time=hop.allow_extended_time,
    )
    traj = result.trajectory
    traj.to_csv(os.path.join(out, "trajectory.csv"), provenance=provenance)
    achieved = traj.position[-1] - start
    summary = {
        "body": hop.body,
        "thrust": robot.thrust,
        "burn_time": result.burn_time,
        "planned_displacement": list(hop.displacement),
        "achieved_displacement": achieved.tolist(),
        "distance": float(np.linalg.norm(achieved)),
        "flight_time": float(traj.t[-1]),
        "propellant_used": float(hop.propellant - traj.propellant[-1]),
    }
    _write_json(os.path.join(out, "hop_summary.json"), summary, provenance)
    with open(os.path.join(out, "apex_by_body.csv"), "w", encoding="utf-8") as fh:
        for key in sorted(provenance):
            fh.write(f"# {key}: {provenance[key]}\n")
        fh.write("body,gravity,apex_height\n")
        for name in hop.bodies:
            apex = hop_apex_height(robot, BODIES[name])
            fh.write(f"{name},{BODIES[name].gravity:.17g},{apex:.17g}\n")
    print(
        f"hop: {summary['distance']:.3f} m in {summary['flight_time']:.3f} s, "
        f"{summary['propellant_used'] * 1e3:.2f} g propellant -> {out}"
    )
    return EXIT_OK


def cmd_calibrate(args) -> int:
    config, provenance, seed = _load(args)
    robot = build_robot(config)
    hop = build_hop(config, robot)
    body = BODIES[hop.body]
    calibrated = calibrate_thrust(
        body, robot, climb_height=hop.height, hop_time=hop.hop_time
    )
    impulse = 0.005 * calibrated.specific_impulse * 9.80665
    payload = {
        "body": hop.body,
        "climb_height": hop.height,
        "hop_time": hop.hop_time,
        "propellant_mass": 0.005,
        "specific_impulse": calibrated.specific_impulse,
        "thrust": calibrated.thrust,
        "burn_time": impulse / calibrated.thrust,
    }
    out = _outdir(args)
    _write_json(os.path.join(out, "calibration.json"), payload, provenance)
    print(
        f"calibrate: {payload['thrust']:.4f} N, burn {payload['burn_time']:.4f} s "
        f"({hop.body}) -> {out}"
    )
    return EXIT_OK


def cmd_climb(args) -> int:
    config, provenance, seed = _load(args)
    scenario = build_scenario(config, seed)
    out = _outdir(args)
    log = run_climb(scenario)
    log.events_to_csv(os.path.join(out, "climb_events.csv"), provenance=provenance)
    log.traces_to_csv(os.path.join(out, "climb_traces.csv"), provenance=provenance)
    log.center_to_csv(os.path.join(out, "climb_center.csv"), provenance=provenance)
    log.to_json(os.path.join(out, "climb_log.json"), provenance=provenance)
    print(
        f"climb: {log.status.value}, {log.cycles_completed}/{scenario.n_cycles} "
        f"cycles, {log.fault_count} faults, "
        f"{log.propellant_used * 1e3:.1f} g propellant -> {out}"
    )
    if log.status == ClimbStatus.FAILED:
        print("climb: system failure; snapshot in climb_log.json", file=sys.stderr)
        return EXIT_SIM_FAILURE
    return EXIT_OK


def cmd_study(args) -> int:
    config, provenance, seed = _load(args)
    settings = build_study(config, trials=args.trials, threads=args.threads)
    trade = settings.trade
    out = _outdir(args)
    spine_counts = list(range(settings.spine_min, settings.spine_max + 1))
    criticals = []
    with open(os.path.join(out, "failure_curves.csv"), "w", encoding="utf-8") as fh:
        for key in sorted(provenance):
            fh.write(f"# {key}: {provenance[key]}\n")
        fh.write("n_robots,hang_count,spines,p_fail\n")
        for n in trade.system_sizes:
            for hang in settings.hang_counts:
                if hang >= n:
                    continue
                curve = failure_curve(
                    n,
                    hang,
                    spine_counts,
                    trials=settings.trials,
                    seed=seed,
                    mass=trade.robot_mass,
                    gravity=trade.gravity,
                    capacity_band=settings.capacity_band,
                    threads=settings.threads,
                )
                for k, p in zip(spine_counts, curve):
                    fh.write(f"{n},{hang},{k},{p:.17g}\n")
                criticals.append(
                    {
                        "n_robots": n,
                        "hang_count": hang,
                        "critical_spines": critical_spines(
                            n,
                            hang,
                            mass=trade.robot_mass,
                            gravity=trade.gravity,
                            per_contact_load=trade.per_contact_load,
                        ),
                    }
                )
    reports = {}
    for batch in settings.hop_batches:
        report = fitness_study(replace(trade, hop_batch=batch))
        report.to_json(
            os.path.join(out, f"fitness_n{batch}.json"), provenance=provenance
        )
        reports[batch] = report
    summary = {
        "trials": settings.trials,
        "critical_spines": criticals,
        "argmax_by_batch": {str(b): r.argmax_n for b, r in reports.items()},
        "argmin_by_batch": {str(b): r.argmin_n for b, r in reports.items()},
    }
    _write_json(os.path.join(out, "study_summary.json"), summary, provenance)
    argmax = ", ".join(f"n={b}: N={r.argmax_n}" for b, r in sorted(reports.items()))
    print(f"study: {settings.trials} trials, best sizes {argmax} -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument(
        "--seed", type=int, default=None, help="override the config seed"
    )
    common.add_argument(
        "--trials", type=int, default=None, help="Monte Carlo trials (study)"
    )
    common.add_argument(
        "--threads", type=int, default=None, help="Monte Carlo worker threads (study)"
    )
    parser = argparse.ArgumentParser(
        prog="climbsim",
        description="Deterministic simulation toolkit for tethered "
        "rocket-hopping cliff climbers.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_text in (
        ("terrain", cmd_terrain, "synthesize a fractal terrain patch"),
        ("hop", cmd_hop, "fly one calibrated rocket hop"),
        ("climb", cmd_climb, "run a tethered team climb"),
        ("study", cmd_study, "reliability curves and system-size fitness"),
        ("calibrate", cmd_calibrate, "solve the thruster datum calibration"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigValidationError, ParameterDomainError) as exc:
        print(f"climbsim: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"climbsim: cannot read {exc.filename}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PlanningError, ConvergenceError) as exc:
        print(f"climbsim: simulated-system failure: {exc}", file=sys.stderr)
        return EXIT_SIM_FAILURE
    except OSError as exc:
        print(f"climbsim: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
