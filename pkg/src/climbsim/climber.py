"""Tethered team gait: sequenced rocket hops up a cliff face.

The team climbs a vertical wall (the y = 0 plane, +z up) in a fixed
two-row stance.  Robots hop in index order in waves of ``hop_batch``;
a full pass of the team is one gait cycle, advancing the stance by one
hop height.  Wave members share a launch clock (their flights are
simulated one after another but overlap in simulated time); anchored
teammates hold the tether network while a wave flies, so at least
N - hop_batch robots are anchored at every instant.

Grip is decided at each landing by sampling the microspine/asperity
census.  A failed engagement or an overloaded anchored grip turns into
a tether-arrested fall followed by recovery hops back to the stance, up
to a retry limit.  Landings arrest on the spines (velocity zeroed) and
danglers park at the static hang equilibrium, so the system is settled
quasi-statically before every launch.  Every dangle episode is checked
against an energy-bound safety floor.

`run_climb` is fully deterministic for a given scenario and seed.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from . import rng
from .dynamics import (
    BODIES,
    Body,
    RobotMode,
    RobotParams,
    RobotState,
    calibrate_thrust,
    execute_hop,
    step as dynamics_step,
)
from .errors import ConfigValidationError, ParameterDomainError, PlanningError
from .grip import GripState, SpineArray, sample_grip
from .terrain import TerrainParams, extract_asperities, generate_patch
from .tether import TetherSpec, TetherSystem, settle_drop_depth

DEFAULT_TERRAIN = TerrainParams(
    fractal_dim=2.5,
    roughness_amp=3.0e-4,
    sample_length=1.0e-3,
    freq_scale=1.5,
    ridge_count=10,
    max_freq_index=11,
    phase_seed=11,
)
DEFAULT_PATCH_SPACING = 8.0e-5
DEFAULT_PATCH_EXTENT = 128 * 8.0e-5


class EventKind(enum.Enum):
    HOP_START = "HOP_START"
    GRIP_OK = "GRIP_OK"
    GRIP_FAIL = "GRIP_FAIL"
    SLIP = "SLIP"
    RECOVERED = "RECOVERED"
    ABORT = "ABORT"


class ClimbStatus(enum.Enum):
    COMPLETED = "COMPLETED"  # all cycles, zero grip faults
    RECOVERED = "RECOVERED"  # all cycles, every fault recovered
    PARTIAL = "PARTIAL"  # stopped early (retries/propellant), system holds
    FAILED = "FAILED"  # anchored set overloaded or safety floor violated


@dataclass(frozen=True)
class ClimbEvent:
    t: float
    kind: EventKind
    cycle: int
    robot: int
    attempt: int = 0
    detail: str = ""


@dataclass(frozen=True)
class FailureInjection:
    """Force one grip fault for testing the recovery path.

    kind 'grip': the robot's landing engagement in that cycle fails.
    kind 'slip': the robot's anchored grip releases right after it lands.
    """

    robot: int
    cycle: int
    kind: str = "grip"

    def __post_init__(self):
        if self.kind not in ("grip", "slip"):
            raise ConfigValidationError(f"unknown injection kind {self.kind!r}")
        if self.cycle < 0 or self.robot < 0:
            raise ConfigValidationError("injection cycle and robot must be >= 0")


@dataclass(frozen=True)
class ClimbScenario:
    """Everything a climb run needs; all fields have working defaults.

    ``approach_angle_deg`` is the spine approach angle against the wall,
    recorded with the run for provenance (the engagement model works on
    asperity geometry, so the angle does not enter the mechanics).
    ``initial_positions`` overrides the default two-row stance.
    """

    n_robots: int = 4
    hop_batch: int = 1
    n_cycles: int = 2
    hop_height: float = 1.27
    hop_time: float = 1.5
    column_spacing: float = 1.5
    row_spacing: float = 1.5
    approach_angle_deg: float = 55.0
    body: str = "mars"
    seed: int = 42
    robot: RobotParams = RobotParams()
    tether: TetherSpec = TetherSpec(damping=25.0)
    spines_per_robot: int = 48
    spines: Optional[SpineArray] = None
    terrain: TerrainParams = DEFAULT_TERRAIN
    patch_spacing: float = DEFAULT_PATCH_SPACING
    patch_extent: float = DEFAULT_PATCH_EXTENT
    propellant: float = 0.05
    retry_limit: int = 5
    settle_time: float = 6.0
    dt: float = 1.0e-3
    initial_positions: Optional[tuple] = None
    injections: tuple = ()

    def __post_init__(self):
        if self.spines is None:
            if self.spines_per_robot < 1:
                raise ParameterDomainError("spines_per_robot must be >= 1")
            object.__setattr__(self, "spines", SpineArray.uniform(self.spines_per_robot))
        if self.n_robots < 2:
            raise ParameterDomainError("a tethered team needs n_robots >= 2")
        if not 1 <= self.hop_batch < self.n_robots:
            raise ConfigValidationError(
                f"need 1 <= hop_batch < n_robots so someone stays anchored, "
                f"got hop_batch={self.hop_batch}, n_robots={self.n_robots}"
            )
        if self.n_cycles < 1:
            raise ParameterDomainError("n_cycles must be >= 1")
        if self.hop_height < 0 or self.hop_time <= 0:
            raise ParameterDomainError("hop_height must be >= 0 and hop_time > 0")
        if not 45.0 <= self.approach_angle_deg <= 65.0:
            raise ParameterDomainError(
                f"approach_angle_deg must be in [45, 65], got {self.approach_angle_deg}"
            )
        if self.body not in BODIES:
            raise ConfigValidationError(
                f"unknown body {self.body!r}; known: {sorted(BODIES)}"
            )
        if self.retry_limit < 0:
            raise ParameterDomainError("retry_limit must be >= 0")
        if self.initial_positions is not None:
            pts = tuple(tuple(float(c) for c in p) for p in self.initial_positions)
            if len(pts) != self.n_robots:
                raise ConfigValidationError(
                    f"initial_positions needs {self.n_robots} entries, got {len(pts)}"
                )
            if any(len(p) != 3 for p in pts):
                raise ConfigValidationError("initial positions must be 3-vectors")
            if len(set(pts)) != len(pts):
                raise ConfigValidationError("initial positions must be distinct")
            object.__setattr__(self, "initial_positions", pts)
        for inj in self.injections:
            if inj.cycle >= self.n_cycles or inj.robot >= self.n_robots:
                raise ConfigValidationError(
                    "injection targets a cycle/robot outside the run"
                )

    def stance_positions(self) -> np.ndarray:
        """Start stance; robot k sits in column k//2 (right to left),
        row k%2 (top first)."""
        if self.initial_positions is not None:
            return np.array(self.initial_positions, dtype=np.float64)
        n_cols = math.ceil(self.n_robots / 2)
        pos = np.zeros((self.n_robots, 3))
        for k in range(self.n_robots):
            col, row = k // 2, k % 2
            pos[k, 0] = (n_cols - 1 - col) * self.column_spacing
            pos[k, 2] = (1 - row) * self.row_spacing
        return pos


def inject_failure(
    scenario: ClimbScenario, robot: int, cycle: int, kind: str = "grip"
) -> ClimbScenario:
    """Copy of the scenario with one more forced grip fault."""
    addition = FailureInjection(robot=robot, cycle=cycle, kind=kind)
    return replace(scenario, injections=scenario.injections + (addition,))


@dataclass
class DangleEpisode:
    """Bookkeeping for one arrested fall: bound and observed depth."""

    t_start: float
    robot: int
    safety_floor: float
    min_z: float
    settled_z: float = 0.0


@dataclass
class ClimbLog:
    """Everything a climb run produced."""

    status: ClimbStatus
    cycles_completed: int
    events: list
    final_positions: np.ndarray
    total_time: float
    traces: dict  # robot -> (t array, position array)
    center_trace: tuple  # (t array, position array) of the system center
    dangles: list
    propellant_used: float
    propellant_by_robot: np.ndarray

    @property
    def fault_count(self) -> int:
        return sum(
            1 for e in self.events if e.kind in (EventKind.GRIP_FAIL, EventKind.SLIP)
        )

    def events_to_csv(self, path, provenance=None) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for key in sorted(provenance or {}):
                fh.write(f"# {key}: {provenance[key]}\n")
            fh.write("t,kind,cycle,robot,attempt,detail\n")
            for e in self.events:
                detail = e.detail.replace(",", ";")
                fh.write(
                    f"{e.t:.6f},{e.kind.value},{e.cycle},{e.robot},{e.attempt},{detail}\n"
                )

    def traces_to_csv(self, path, provenance=None) -> None:
        """Long-format per-robot position traces: robot, t, x, y, z."""
        with open(path, "w", encoding="utf-8") as fh:
            for key in sorted(provenance or {}):
                fh.write(f"# {key}: {provenance[key]}\n")
            fh.write("robot,t,x,y,z\n")
            for robot in sorted(self.traces):
                ts, ps = self.traces[robot]
                for i in range(len(ts)):
                    fh.write(
                        f"{robot},{ts[i]:.6f},{ps[i][0]:.9g},{ps[i][1]:.9g},{ps[i][2]:.9g}\n"
                    )

    def center_to_csv(self, path, provenance=None) -> None:
        ts, ps = self.center_trace
        with open(path, "w", encoding="utf-8") as fh:
            for key in sorted(provenance or {}):
                fh.write(f"# {key}: {provenance[key]}\n")
            fh.write("t,x,y,z\n")
            for i in range(len(ts)):
                fh.write(f"{ts[i]:.6f},{ps[i][0]:.9g},{ps[i][1]:.9g},{ps[i][2]:.9g}\n")

    def to_json(self, path, provenance=None) -> None:
        payload = {
            "status": self.status.value,
            "cycles_completed": self.cycles_completed,
            "total_time": self.total_time,
            "fault_count": self.fault_count,
            "propellant_used": self.propellant_used,
            "propellant_by_robot": self.propellant_by_robot.tolist(),
            "final_positions": self.final_positions.tolist(),
            "events": [
                {
                    "t": e.t,
                    "kind": e.kind.value,
                    "cycle": e.cycle,
                    "robot": e.robot,
                    "attempt": e.attempt,
                    "detail": e.detail,
                }
                for e in self.events
            ],
            "dangles": [
                {
                    "t_start": d.t_start,
                    "robot": d.robot,
                    "safety_floor": d.safety_floor,
                    "min_z": d.min_z,
                    "settled_z": d.settled_z,
                }
                for d in self.dangles
            ],
        }
        if provenance:
            payload["_provenance"] = dict(provenance)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def safety_floor(
    anchor_positions: np.ndarray, spec: TetherSpec, mass: float, gravity: float
) -> float:
    """Lowest altitude a tether-arrested fall can reach (energy bound).

    The dangler hangs on a two-leg chain through the hub (series
    stiffness k/2).  Measured from the highest anchor it can descend at
    most the full slack path (two rest lengths plus the anchor span)
    converted to stretch by the energy balance in `settle_drop_depth`.
    """
    anchor_positions = np.asarray(anchor_positions, dtype=np.float64)
    top = float(anchor_positions[:, 2].max())
    span = 0.0
    for i in range(len(anchor_positions)):
        for j in range(i + 1, len(anchor_positions)):
            span = max(
                span, float(np.linalg.norm(anchor_positions[i] - anchor_positions[j]))
            )
    slack = 2.0 * spec.rest_length + span
    return top - 2.0 * spec.rest_length - settle_drop_depth(spec, mass, gravity, slack)


class _Run:
    """Mutable engine state for one climb; `run_climb` drives it."""

    def __init__(self, scenario: ClimbScenario):
        self.sc = scenario
        self.body: Body = BODIES[scenario.body]
        self.params = scenario.robot
        if self.params.thrust <= 0.0:
            self.params = calibrate_thrust(
                self.body,
                self.params,
                climb_height=scenario.hop_height or 1.27,
                hop_time=scenario.hop_time,
            )
        patch = generate_patch(
            scenario.terrain, scenario.patch_extent, scenario.patch_spacing
        )
        self.asperities = extract_asperities(patch)
        if not self.asperities:
            raise ConfigValidationError("climb terrain has no usable asperities")
        self.system = TetherSystem.x_configuration(scenario.n_robots, scenario.tether)
        self.positions = scenario.stance_positions()
        self.states = [
            RobotState(
                position=self.positions[k].copy(),
                velocity=np.zeros(3),
                propellant=scenario.propellant,
                mode=RobotMode.ANCHORED,
            )
            for k in range(scenario.n_robots)
        ]
        self.grips = [
            sample_grip(
                scenario.spines,
                self.asperities,
                rng.stream(scenario.seed, "climb", "init", k),
            )
            for k in range(scenario.n_robots)
        ]
        self.t = 0.0
        self.events: list = []
        self.dangles: list = []
        self.traces = {
            k: [(0.0, self.positions[k].copy())] for k in range(scenario.n_robots)
        }
        self.center_samples = [(0.0, self.positions.mean(axis=0))]
        self.faulted = False
        self.aborted: Optional[ClimbStatus] = None
        self.cycles_completed = 0

    # -- helpers ------------------------------------------------------------

    def event(self, kind, cycle, robot, attempt=0, detail=""):
        self.events.append(
            ClimbEvent(
                t=self.t,
                kind=kind,
                cycle=cycle,
                robot=robot,
                attempt=attempt,
                detail=detail,
            )
        )

    def trace(self, robot, t, position):
        self.traces[robot].append((t, np.asarray(position, dtype=np.float64).copy()))

    def mark_center(self):
        self.center_samples.append((self.t, self.positions.mean(axis=0)))

    def anchored_indices(self, excluding=None):
        return [
            k
            for k in range(self.sc.n_robots)
            if self.states[k].mode == RobotMode.ANCHORED and k != excluding
        ]

    def tether_closure(self, robot):
        positions = self.positions

        def ext(p, v, t):
            cur = positions.copy()
            cur[robot] = p
            vel = np.zeros_like(cur)
            vel[robot] = v
            return self.system.net_robot_force(cur, velocities=vel)[robot]

        return ext

    def grip_load(self, robot) -> float:
        """Static load the robot's grip must carry at its current position."""
        forces = self.system.net_robot_force(self.positions)
        weight = np.array([0.0, 0.0, -self.params.mass * self.body.gravity])
        return float(np.linalg.norm(weight + forces[robot]))

    def roll_grip(self, cycle, robot, attempt) -> GripState:
        if attempt == 0 and any(
            inj.kind == "grip" and inj.cycle == cycle and inj.robot == robot
            for inj in self.sc.injections
        ):
            return GripState(engaged_count=0, capacities=np.zeros(0))
        return sample_grip(
            self.sc.spines,
            self.asperities,
            rng.stream(self.sc.seed, "climb", cycle, robot, attempt),
        )

    # -- flight and recovery ------------------------------------------------

    def fly(self, robot, displacement, control, allow_extended, t_start) -> float:
        """Simulate one hop; trajectory times are offset from t_start.
        Returns the flight duration (pre-rotate included)."""
        state = self.states[robot]
        state.mode = RobotMode.HOPPING
        result = execute_hop(
            state,
            self.params,
            self.body,
            displacement,
            hop_time=self.sc.hop_time,
            dt=self.sc.dt,
            control=control,
            external_force=self.tether_closure(robot),
            allow_extended_time=allow_extended,
            record_every=50,
        )
        traj = result.trajectory
        for i in range(traj.t.size):
            self.trace(robot, t_start + traj.t[i], traj.position[i])
        new = state.copy()
        new.position = traj.position[-1].copy()
        new.velocity = traj.velocity[-1].copy()
        new.propellant = float(traj.propellant[-1])
        self.states[robot] = new
        self.positions[robot] = new.position.copy()
        return float(traj.t[-1])

    def try_grip(self, cycle, robot, attempt) -> bool:
        grip = self.roll_grip(cycle, robot, attempt)
        load = self.grip_load(robot)
        if grip.engaged_count > 0 and grip.total_capacity >= load:
            self.grips[robot] = grip
            state = self.states[robot]
            state.velocity = np.zeros(3)  # spines arrest the landing
            state.angular_velocity = np.zeros(3)
            # anchored robots re-aim the thruster up the wall between hops
            state.quaternion = np.array([1.0, 0.0, 0.0, 0.0])
            state.mode = RobotMode.ANCHORED
            self.event(
                EventKind.GRIP_OK,
                cycle,
                robot,
                attempt,
                f"engaged={grip.engaged_count} capacity={grip.total_capacity:.1f}N "
                f"load={load:.1f}N",
            )
            return True
        self.faulted = True
        self.states[robot].mode = RobotMode.SLIPPED
        self.event(
            EventKind.GRIP_FAIL,
            cycle,
            robot,
            attempt,
            f"engaged={grip.engaged_count} capacity={grip.total_capacity:.1f}N "
            f"load={load:.1f}N",
        )
        return False

    def arrest_and_settle(self, robot) -> DangleEpisode:
        """Tether-arrested fall: damped flight, then the static hang pose."""
        sc = self.sc
        anchors = self.positions[self.anchored_indices(excluding=robot)]
        floor = safety_floor(anchors, sc.tether, self.params.mass, self.body.gravity)
        episode = DangleEpisode(
            t_start=self.t,
            robot=robot,
            safety_floor=floor,
            min_z=float(self.positions[robot][2]),
        )
        state = self.states[robot]
        state.mode = RobotMode.SLIPPED
        ext = self.tether_closure(robot)
        steps = int(round(sc.settle_time / sc.dt))
        for i in range(steps):
            state = dynamics_step(state, self.params, self.body, sc.dt, external_force=ext)
            self.positions[robot] = state.position.copy()
            episode.min_z = min(episode.min_z, float(state.position[2]))
            if i % 100 == 0:
                self.trace(robot, self.t + (i + 1) * sc.dt, state.position)
        self.t += steps * sc.dt
        # wheel-assisted swing nulling: park at the static hang equilibrium
        hang = self.static_hang(robot, state.position)
        state.position = hang
        state.velocity = np.zeros(3)
        state.angular_velocity = np.zeros(3)
        self.states[robot] = state
        self.positions[robot] = hang.copy()
        episode.min_z = min(episode.min_z, float(hang[2]))
        episode.settled_z = float(hang[2])
        self.trace(robot, self.t, hang)
        self.dangles.append(episode)
        return episode

    def static_hang(self, robot, guess) -> np.ndarray:
        """Rest pose of a dangling robot: total potential minimum."""
        mass_g = self.params.mass * self.body.gravity
        base = self.positions

        def total(r):
            cur = base.copy()
            cur[robot] = r
            return self.system.energy(cur) + mass_g * r[2]

        def grad(r):
            cur = base.copy()
            cur[robot] = r
            force = self.system.net_robot_force(cur)[robot]
            return np.array([0.0, 0.0, mass_g]) - force

        res = minimize(
            total,
            np.asarray(guess, float),
            jac=grad,
            method="L-BFGS-B",
            options={"gtol": 1e-10, "ftol": 1e-15, "maxiter": 500},
        )
        return np.asarray(res.x, dtype=np.float64)

    def hang_overload(self, dangler):
        """Worst overloaded anchored grip while a teammate hangs, if any."""
        forces = self.system.net_robot_force(self.positions)
        weight = np.array([0.0, 0.0, -self.params.mass * self.body.gravity])
        worst = None
        worst_ratio = 1.0
        for k in self.anchored_indices(excluding=dangler):
            load = float(np.linalg.norm(weight + forces[k]))
            capacity = self.grips[k].total_capacity
            ratio = math.inf if capacity == 0.0 else load / capacity
            if ratio > worst_ratio:
                worst, worst_ratio = k, ratio
        if worst is None:
            return None
        self.faulted = True
        return worst, worst_ratio

    def recover(self, cycle, robot, target) -> bool:
        """Dangle -> settle -> re-hop loop; True once re-anchored."""
        attempt = 1
        while attempt <= self.sc.retry_limit:
            episode = self.arrest_and_settle(robot)
            self.mark_center()
            if episode.min_z < episode.safety_floor:
                self.event(
                    EventKind.ABORT,
                    cycle,
                    robot,
                    attempt,
                    f"below safety floor {episode.safety_floor:.2f} m "
                    f"(reached {episode.min_z:.2f} m)",
                )
                self.aborted = ClimbStatus.FAILED
                return False
            overloaded = self.hang_overload(robot)
            if overloaded is not None:
                k, ratio = overloaded
                self.event(EventKind.SLIP, cycle, k, 0, f"overload ratio {ratio:.2f}")
                self.event(
                    EventKind.ABORT,
                    cycle,
                    robot,
                    attempt,
                    f"anchored set cannot hold the hang (grip {k} over capacity)",
                )
                self.aborted = ClimbStatus.FAILED
                return False
            displacement = target - self.positions[robot]
            try:
                duration = self.fly(
                    robot, displacement, "attitude", True, t_start=self.t
                )
            except PlanningError as exc:
                self.event(EventKind.ABORT, cycle, robot, attempt, str(exc))
                self.aborted = ClimbStatus.PARTIAL
                return False
            self.t += duration
            if self.try_grip(cycle, robot, attempt):
                self.event(
                    EventKind.RECOVERED, cycle, robot, attempt, f"attempts={attempt}"
                )
                self.mark_center()
                return True
            attempt += 1
        self.event(
            EventKind.ABORT,
            cycle,
            robot,
            attempt - 1,
            "retry limit exhausted while dangling",
        )
        self.aborted = ClimbStatus.PARTIAL
        return False

    def check_anchored_grips(self, cycle) -> bool:
        """Static overload check; an overloaded grip slips and recovers."""
        while True:
            forces = self.system.net_robot_force(self.positions)
            weight = np.array([0.0, 0.0, -self.params.mass * self.body.gravity])
            worst, worst_ratio = None, 1.0
            for k in self.anchored_indices():
                load = float(np.linalg.norm(weight + forces[k]))
                capacity = self.grips[k].total_capacity
                ratio = math.inf if capacity == 0.0 else load / capacity
                if ratio > worst_ratio:
                    worst, worst_ratio = k, ratio
            if worst is None:
                return True
            self.faulted = True
            self.event(
                EventKind.SLIP, cycle, worst, 0, f"overload ratio {worst_ratio:.2f}"
            )
            target = self.positions[worst].copy()
            if not self.recover(cycle, worst, target):
                return False

    def forced_slip(self, cycle, robot) -> bool:
        self.faulted = True
        self.event(EventKind.SLIP, cycle, robot, 0, "injected release")
        target = self.positions[robot].copy()
        return self.recover(cycle, robot, target)


def run_climb(scenario: ClimbScenario) -> ClimbLog:
    """Run the full gait and return the log.  Deterministic per seed."""
    run = _Run(scenario)
    prop_start = scenario.propellant * scenario.n_robots

    def finish() -> ClimbLog:
        if run.aborted is not None:
            status = run.aborted
        elif run.cycles_completed == scenario.n_cycles:
            status = ClimbStatus.RECOVERED if run.faulted else ClimbStatus.COMPLETED
        else:
            status = ClimbStatus.PARTIAL
        traces = {
            k: (
                np.array([t for t, _ in samples]),
                np.array([p for _, p in samples]),
            )
            for k, samples in run.traces.items()
        }
        center = (
            np.array([t for t, _ in run.center_samples]),
            np.array([p for _, p in run.center_samples]),
        )
        by_robot = np.array(
            [scenario.propellant - s.propellant for s in run.states]
        )
        return ClimbLog(
            status=status,
            cycles_completed=run.cycles_completed,
            events=run.events,
            final_positions=run.positions.copy(),
            total_time=run.t,
            traces=traces,
            center_trace=center,
            dangles=run.dangles,
            propellant_used=prop_start - sum(s.propellant for s in run.states),
            propellant_by_robot=by_robot,
        )

    n, batch = scenario.n_robots, scenario.hop_batch
    up = np.array([0.0, 0.0, scenario.hop_height])
    for cycle in range(scenario.n_cycles):
        for wave_start in range(0, n, batch):
            wave = list(range(wave_start, min(wave_start + batch, n)))
            t_wave = run.t
            wave_duration = 0.0
            targets = {}
            for robot in wave:
                targets[robot] = run.positions[robot] + up
                run.event(
                    EventKind.HOP_START,
                    cycle,
                    robot,
                    0,
                    f"target_z={targets[robot][2]:.2f}",
                )
                try:
                    duration = run.fly(
                        robot,
                        targets[robot] - run.positions[robot],
                        "rate",
                        False,
                        t_start=t_wave,
                    )
                except PlanningError as exc:
                    run.states[robot].mode = RobotMode.ANCHORED
                    run.positions[robot] = run.states[robot].position
                    run.event(EventKind.ABORT, cycle, robot, 0, str(exc))
                    run.aborted = ClimbStatus.PARTIAL
                    return finish()
                wave_duration = max(wave_duration, duration)
            run.t = t_wave + wave_duration
            failed = [r for r in wave if not run.try_grip(cycle, r, 0)]
            for robot in failed:
                if not run.recover(cycle, robot, targets[robot]):
                    return finish()
            for robot in wave:
                if any(
                    inj.kind == "slip" and inj.cycle == cycle and inj.robot == robot
                    for inj in scenario.injections
                ):
                    if not run.forced_slip(cycle, robot):
                        return finish()
            if not run.check_anchored_grips(cycle):
                return finish()
            run.mark_center()
        run.cycles_completed += 1
        run.mark_center()
    return finish()
