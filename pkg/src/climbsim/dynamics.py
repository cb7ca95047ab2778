"""Rocket-hop rigid-body dynamics with reaction-wheel attitude control.

One robot is a uniform sphere with a body-frame +z thruster and three
reaction wheels.  Translation and attitude integrate together with a
fixed-step RK4; attitude is a unit quaternion internally and Z-Y-X
intrinsic Euler angles at the control and logging interfaces.

The wheel torque is the stabilizing PD law

    tau = Kp * wrap(euler_des - euler_act) + Kd * (rate_des - rate_act)

saturated per axis.  Hops are planned as a burn-coast profile: thrust at
fixed magnitude along a commanded direction for a solved burn time, then
ballistic coast, reaching a target displacement at a fixed arrival time.
Propellant flow is thrust / (Isp * g0) with the mass held constant over a
burn (budget per hop is a fraction of a percent of vehicle mass).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .errors import ParameterDomainError, PlanningError

G0 = 9.80665  # reference gravity for specific impulse, m/s^2

DEFAULT_HOP_TIME = 1.5  # s, burn + coast window of a standard hop
DEFAULT_DT = 1.0e-3  # s, integrator step

_PRE_ROTATE_TOL = math.radians(1.0)
_PRE_ROTATE_MAX_TIME = 10.0
_RATE_MODE_ALIGN_TOL = math.radians(2.0)


@dataclass(frozen=True)
class Body:
    """A gravitating body; surface gravity in m/s^2."""

    name: str
    gravity: float

    def __post_init__(self):
        if self.gravity <= 0:
            raise ParameterDomainError(f"gravity must be > 0, got {self.gravity}")


BODIES = {
    "mars": Body("mars", 3.71),
    "moon": Body("moon", 1.62),
    "ceres": Body("ceres", 0.27),
    "phobos": Body("phobos", 0.0057),
}


def _gain_triple(value) -> tuple:
    if np.isscalar(value):
        return (float(value),) * 3
    triple = tuple(float(v) for v in value)
    if len(triple) != 3:
        raise ParameterDomainError(f"gain must be scalar or length 3, got {value!r}")
    return triple


@dataclass(frozen=True)
class RobotParams:
    """Vehicle constants: mass properties, thruster, wheel control gains.

    ``thrust`` is the thruster magnitude in newtons; 0 means uncalibrated
    (run ``calibrate_thrust`` first).  Gains may be scalars or per-axis
    triples (roll, pitch, yaw).
    """

    mass: float = 3.0
    diameter: float = 0.3
    thrust: float = 0.0
    specific_impulse: float = 300.0
    kp: tuple = (0.675, 0.675, 0.675)
    kd: tuple = (0.27, 0.27, 0.27)
    wheel_torque_limit: float = 0.1
    propellant_budget: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kp", _gain_triple(self.kp))
        object.__setattr__(self, "kd", _gain_triple(self.kd))
        if self.mass <= 0 or self.diameter <= 0:
            raise ParameterDomainError("mass and diameter must be > 0")
        if self.thrust < 0:
            raise ParameterDomainError(f"thrust must be >= 0, got {self.thrust}")
        if self.specific_impulse <= 0:
            raise ParameterDomainError(
                f"specific_impulse must be > 0, got {self.specific_impulse}"
            )
        if self.wheel_torque_limit <= 0:
            raise ParameterDomainError("wheel_torque_limit must be > 0")
        if self.propellant_budget < 0:
            raise ParameterDomainError("propellant_budget must be >= 0")

    @property
    def inertia(self) -> float:
        """Solid-sphere moment of inertia about any axis, kg m^2."""
        return 0.4 * self.mass * (0.5 * self.diameter) ** 2

    @property
    def mass_flow(self) -> float:
        """Propellant flow at full thrust, kg/s."""
        return self.thrust / (self.specific_impulse * G0)


class RobotMode(enum.Enum):
    ANCHORED = "anchored"
    HOPPING = "hopping"
    GRIPPING = "gripping"
    SLIPPED = "slipped"


@dataclass
class RobotState:
    """Instantaneous state: pose, rates, propellant, gait mode."""

    position: np.ndarray
    velocity: np.ndarray
    quaternion: np.ndarray = field(default_factory=lambda: np.array([1.0, 0, 0, 0]))
    angular_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    propellant: float = 1.0
    mode: RobotMode = RobotMode.HOPPING
    thrust_truncated: bool = False

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=np.float64)
        self.velocity = np.asarray(self.velocity, dtype=np.float64)
        self.quaternion = quat_normalize(np.asarray(self.quaternion, dtype=np.float64))
        self.angular_velocity = np.asarray(self.angular_velocity, dtype=np.float64)
        if self.propellant < 0:
            raise ParameterDomainError(f"propellant must be >= 0, got {self.propellant}")

    @property
    def euler(self) -> np.ndarray:
        """(roll, pitch, yaw) of the Z-Y-X intrinsic decomposition, radians."""
        return euler_from_quat(self.quaternion)

    def copy(self) -> "RobotState":
        return RobotState(
            position=self.position.copy(),
            velocity=self.velocity.copy(),
            quaternion=self.quaternion.copy(),
            angular_velocity=self.angular_velocity.copy(),
            propellant=self.propellant,
            mode=self.mode,
            thrust_truncated=self.thrust_truncated,
        )


# ---------------------------------------------------------------------------
# quaternion helpers (scalar-first convention)

def quat_normalize(q: np.ndarray) -> np.ndarray:
    norm = math.sqrt(float(np.dot(q, q)))
    if norm == 0.0:
        raise ParameterDomainError("zero quaternion")
    return q / norm


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def rotate_vector(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate a body-frame vector into the world frame."""
    w, x, y, z = q
    # R(q) @ v, expanded
    return np.array(
        [
            (1 - 2 * (y * y + z * z)) * v[0]
            + 2 * (x * y - w * z) * v[1]
            + 2 * (x * z + w * y) * v[2],
            2 * (x * y + w * z) * v[0]
            + (1 - 2 * (x * x + z * z)) * v[1]
            + 2 * (y * z - w * x) * v[2],
            2 * (x * z - w * y) * v[0]
            + 2 * (y * z + w * x) * v[1]
            + (1 - 2 * (x * x + y * y)) * v[2],
        ]
    )


def quat_from_euler(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """Quaternion of the Z-Y-X intrinsic rotation yaw, then pitch, then roll."""
    cr, sr = math.cos(roll / 2), math.sin(roll / 2)
    cp, sp = math.cos(pitch / 2), math.sin(pitch / 2)
    cy, sy = math.cos(yaw / 2), math.sin(yaw / 2)
    return np.array(
        [
            cy * cp * cr + sy * sp * sr,
            cy * cp * sr - sy * sp * cr,
            cy * sp * cr + sy * cp * sr,
            sy * cp * cr - cy * sp * sr,
        ]
    )


def euler_from_quat(q: np.ndarray) -> np.ndarray:
    """(roll, pitch, yaw) of the Z-Y-X intrinsic decomposition."""
    w, x, y, z = q
    sinp = 2.0 * (w * y - z * x)
    sinp = min(1.0, max(-1.0, sinp))
    roll = math.atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y))
    pitch = math.asin(sinp)
    yaw = math.atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z))
    return np.array([roll, pitch, yaw])


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    w = np.mod(np.asarray(a, dtype=np.float64) + np.pi, 2.0 * np.pi) - np.pi
    w = np.where(w == -np.pi, np.pi, w)
    return w if w.ndim else float(w)


# ---------------------------------------------------------------------------
# control

@dataclass(frozen=True)
class AttitudeCommand:
    """What the wheel controller tracks during a phase of flight.

    mode 'attitude': full PD on Euler error plus rate damping.
    mode 'rate': proportional path zeroed, rate tracking only (used for
    hops along the current body axis, e.g. straight up a wall).
    """

    mode: str = "attitude"
    euler_des: tuple = (0.0, 0.0, 0.0)
    rate_des: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.mode not in ("attitude", "rate"):
            raise ParameterDomainError(f"unknown command mode {self.mode!r}")


def pd_torque(kp, kd, euler_des, euler_act, rate_des, rate_act, limit=None):
    """Per-axis PD wheel torque with angle wrapping and saturation."""
    kp = np.asarray(_gain_triple(kp))
    kd = np.asarray(_gain_triple(kd))
    err = wrap_angle(np.asarray(euler_des) - np.asarray(euler_act))
    tau = kp * err + kd * (np.asarray(rate_des) - np.asarray(rate_act))
    if limit is not None:
        tau = np.clip(tau, -limit, limit)
    return tau


def _torque(params: RobotParams, command, q, w) -> np.ndarray:
    if command is None:  # wheels idle: pure ballistic rotation
        return np.zeros(3)
    kp = params.kp if command.mode == "attitude" else (0.0, 0.0, 0.0)
    return pd_torque(
        kp,
        params.kd,
        command.euler_des,
        euler_from_quat(q),
        command.rate_des,
        w,
        limit=params.wheel_torque_limit,
    )


# ---------------------------------------------------------------------------
# integration

def _derivatives(t, y, params, body, thrust_on, external_force, command):
    p, v, q, w = y[0:3], y[3:6], y[6:10], y[10:13]
    force = np.array([0.0, 0.0, -body.gravity * params.mass])
    if thrust_on:
        force = force + rotate_vector(q, np.array([0.0, 0.0, params.thrust]))
    if external_force is not None:
        force = force + (
            external_force(p, v, t) if callable(external_force) else external_force
        )
    acc = force / params.mass
    qdot = 0.5 * quat_multiply(q, np.array([0.0, w[0], w[1], w[2]]))
    wdot = _torque(params, command, q, w) / params.inertia
    return np.concatenate([v, acc, qdot, wdot])


_IDLE_COMMAND = AttitudeCommand(mode="rate")


def step(
    state: RobotState,
    params: RobotParams,
    body: Body,
    dt: float,
    thrust_on: bool = False,
    external_force=None,
    command: AttitudeCommand = _IDLE_COMMAND,
) -> RobotState:
    """Advance one RK4 step of length dt; returns a new state.

    ``command=None`` idles the wheels entirely (no control torque);
    the default rate command damps body rates toward zero.

    A burn that would exhaust the remaining propellant is truncated at
    zero: thrust acts for the affordable fraction of the step and the
    returned state has ``thrust_truncated`` set.
    """
    if dt <= 0:
        raise ParameterDomainError(f"dt must be > 0, got {dt}")
    truncated = False
    t_burn = 0.0
    if thrust_on and params.thrust > 0.0:
        flow = params.mass_flow
        t_burn = dt if flow == 0.0 else min(dt, state.propellant / flow)
        truncated = t_burn < dt
    y = np.concatenate(
        [
            state.position,
            state.velocity,
            state.quaternion,
            state.angular_velocity,
        ]
    )
    t = 0.0
    if t_burn > 0.0:
        y = _rk4(_derivatives, t, y, t_burn, params, body, True, external_force, command)
        t = t_burn
    if dt - t > 1e-15:
        y = _rk4(_derivatives, t, y, dt - t, params, body, False, external_force, command)
    new = state.copy()
    new.position = y[0:3]
    new.velocity = y[3:6]
    new.quaternion = quat_normalize(y[6:10])
    new.angular_velocity = y[10:13]
    if t_burn > 0.0:
        new.propellant = max(0.0, state.propellant - params.mass_flow * t_burn)
    new.thrust_truncated = truncated
    return new


def _rk4(fun, t0, y0, h, *args):
    k1 = fun(t0, y0, *args)
    k2 = fun(t0 + h / 2, y0 + h / 2 * k1, *args)
    k3 = fun(t0 + h / 2, y0 + h / 2 * k2, *args)
    k4 = fun(t0 + h, y0 + h * k3, *args)
    return y0 + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _attitude_derivatives(t, y, params, command):
    q, w = y[0:4], y[4:7]
    qdot = 0.5 * quat_multiply(q, np.array([0.0, w[0], w[1], w[2]]))
    wdot = _torque(params, command, q, w) / params.inertia
    return np.concatenate([qdot, wdot])


def attitude_step(
    state: RobotState, params: RobotParams, dt: float, command: AttitudeCommand
) -> RobotState:
    """One RK4 step of the wheel attitude loop with the pose held.

    Models aiming while the stance (spines or a taut tether) carries the
    vehicle: position and velocity stay fixed, only orientation moves.
    """
    y = np.concatenate([state.quaternion, state.angular_velocity])
    y = _rk4(_attitude_derivatives, 0.0, y, dt, params, command)
    new = state.copy()
    new.quaternion = quat_normalize(y[0:4])
    new.angular_velocity = y[4:7]
    return new


# ---------------------------------------------------------------------------
# trajectories and hops

@dataclass
class Trajectory:
    """Sampled time history of one robot's flight."""

    t: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    euler: np.ndarray
    propellant: np.ndarray

    @classmethod
    def _from_records(cls, records) -> "Trajectory":
        t, pos, vel, eul, prop = zip(*records)
        return cls(
            t=np.asarray(t),
            position=np.asarray(pos),
            velocity=np.asarray(vel),
            euler=np.asarray(eul),
            propellant=np.asarray(prop),
        )

    def to_csv(self, path, provenance=None) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for key in sorted(provenance or {}):
                fh.write(f"# {key}: {provenance[key]}\n")
            fh.write("t,x,y,z,vx,vy,vz,roll,pitch,yaw,propellant\n")
            for i in range(self.t.size):
                row = [
                    self.t[i],
                    *self.position[i],
                    *self.velocity[i],
                    *self.euler[i],
                    self.propellant[i],
                ]
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


@dataclass
class HopResult:
    trajectory: Trajectory
    propellant_used: float
    burn_time: float
    hop_time: float
    thrust_direction: np.ndarray
    pre_rotate_time: float = 0.0

    @property
    def displacement(self) -> np.ndarray:
        return self.trajectory.position[-1] - self.trajectory.position[0]


def _record(records, t, state):
    records.append(
        (
            t,
            state.position.copy(),
            state.velocity.copy(),
            state.euler.copy(),
            state.propellant,
        )
    )


def _direction_to_euler(direction: np.ndarray) -> np.ndarray:
    """Euler target whose body +z axis points along ``direction`` (yaw 0)."""
    dx, dy, dz = direction
    pitch = math.atan2(dx, dz)
    roll = math.atan2(-dy, math.hypot(dx, dz))
    return np.array([roll, pitch, 0.0])


def execute_hop(
    state: RobotState,
    params: RobotParams,
    body: Body,
    target_displacement,
    hop_time: float = DEFAULT_HOP_TIME,
    dt: float = DEFAULT_DT,
    control: str = "auto",
    external_force=None,
    allow_extended_time: bool = False,
    record_every: int = 10,
) -> HopResult:
    """Plan and fly one hop to a displacement target.

    The planner solves the burn-coast profile in closed form under gravity
    alone: thrust direction u and burn time t_b such that the displacement
    at ``hop_time`` equals the target.  ``control`` picks the wheel law
    during the burn: 'rate' holds angular rate (wall hops along the body
    axis), 'attitude' tracks the thrust direction with a pre-rotate phase
    first, 'auto' selects by alignment.  With ``allow_extended_time`` an
    unreachable target stretches the window to the smallest feasible time
    instead of raising a planning error.

    Returns the sampled trajectory, exact propellant spent, and the plan.
    External forces (e.g. a tether) act on the flight but are not part of
    the plan.
    """
    delta = np.asarray(target_displacement, dtype=np.float64)
    work = state.copy()
    work.mode = RobotMode.HOPPING
    if float(np.linalg.norm(delta)) == 0.0:
        records = []
        _record(records, 0.0, work)
        return HopResult(
            trajectory=Trajectory._from_records(records),
            propellant_used=0.0,
            burn_time=0.0,
            hop_time=0.0,
            thrust_direction=np.array([0.0, 0.0, 1.0]),
        )
    if params.thrust <= 0.0:
        raise ParameterDomainError("thrust is uncalibrated (zero); run calibration")

    m, g, thrust = params.mass, body.gravity, params.thrust

    def delta_eff(T):
        return delta + np.array([0.0, 0.0, 0.5 * g * T * T])

    def margin(T):
        return thrust * T * T / (2.0 * m) - float(np.linalg.norm(delta_eff(T)))

    T = hop_time
    if margin(T) < 0.0:
        if not allow_extended_time:
            raise PlanningError(
                f"target needs {np.linalg.norm(delta_eff(T)):.3f} m of powered "
                f"displacement, reach is {thrust * T * T / (2 * m):.3f} m in {T} s",
                max_reach=thrust * T * T / (2.0 * m),
            )
        if thrust <= m * g:
            raise PlanningError(
                "thrust below weight, no hop time is feasible", max_reach=0.0
            )
        t_hi = math.sqrt(2.0 * m * float(np.linalg.norm(delta)) / (thrust - m * g)) + T
        T = brentq(margin, T, t_hi) * 1.15

    d_eff = delta_eff(T)
    d_mag = float(np.linalg.norm(d_eff))
    burn = T - math.sqrt(T * T - 2.0 * m * d_mag / thrust)
    direction = d_eff / d_mag
    needed = thrust * burn / (params.specific_impulse * G0)
    if needed > state.propellant + 1e-12:
        raise PlanningError(
            f"burn needs {needed * 1e3:.2f} g propellant, "
            f"{state.propellant * 1e3:.2f} g remain",
            max_reach=state.propellant / max(needed, 1e-300) * d_mag,
        )

    body_z = rotate_vector(work.quaternion, np.array([0.0, 0.0, 1.0]))
    misalign = math.acos(min(1.0, max(-1.0, float(np.dot(body_z, direction)))))
    if control == "auto":
        control = "rate" if misalign < _RATE_MODE_ALIGN_TOL else "attitude"
    if control == "rate" and misalign > _RATE_MODE_ALIGN_TOL:
        raise ParameterDomainError(
            "rate-command mode needs the thrust axis already aligned "
            f"(off by {math.degrees(misalign):.1f} deg)"
        )

    records = []
    clock = 0.0
    _record(records, clock, work)
    pre_rotate = 0.0

    if control == "attitude":
        command = AttitudeCommand(mode="attitude", euler_des=tuple(_direction_to_euler(direction)))
        steps = 0
        while misalign > _PRE_ROTATE_TOL and pre_rotate < _PRE_ROTATE_MAX_TIME:
            work = attitude_step(work, params, dt, command)
            clock += dt
            pre_rotate += dt
            steps += 1
            if steps % record_every == 0:
                _record(records, clock, work)
            body_z = rotate_vector(work.quaternion, np.array([0.0, 0.0, 1.0]))
            misalign = math.acos(min(1.0, max(-1.0, float(np.dot(body_z, direction)))))
    else:
        command = AttitudeCommand(mode="rate")

    start_prop = work.propellant

    def fly(duration, thrust_on):
        nonlocal work, clock
        remaining = duration
        steps = 0
        while remaining > 1e-12:
            h = min(dt, remaining)
            work = step(work, params, body, h, thrust_on, external_force, command)
            clock += h
            remaining -= h
            steps += 1
            if steps % record_every == 0:
                _record(records, clock, work)

    fly(burn, True)
    fly(T - burn, False)
    _record(records, clock, work)
    return HopResult(
        trajectory=Trajectory._from_records(records),
        propellant_used=start_prop - work.propellant,
        burn_time=burn,
        hop_time=T,
        thrust_direction=direction,
        pre_rotate_time=pre_rotate,
    )


# ---------------------------------------------------------------------------
# calibration

def calibrate_thrust(
    body: Body,
    params: RobotParams,
    climb_height: float = 1.27,
    hop_time: float = DEFAULT_HOP_TIME,
    propellant_mass: float = 0.005,
) -> RobotParams:
    """Solve the thrust magnitude that turns a fixed propellant mass into a
    fixed vertical climb in a fixed time, and return updated params.

    The budget pins the total impulse (propellant * Isp * g0), so burn
    time and thrust trade off; the vertical-hop closed form then has a
    single thrust root, found by bisection.
    """
    if climb_height <= 0 or hop_time <= 0 or propellant_mass <= 0:
        raise ParameterDomainError("calibration targets must be > 0")
    impulse = propellant_mass * params.specific_impulse * G0
    dv = impulse / params.mass
    g = body.gravity

    def climb(thrust):
        t_b = impulse / thrust
        return dv * (hop_time - 0.5 * t_b) - 0.5 * g * hop_time * hop_time

    best = dv * hop_time - 0.5 * g * hop_time * hop_time  # thrust -> infinity
    f_lo = impulse / hop_time  # burn fills the whole window
    if best <= climb_height:
        raise ParameterDomainError(
            f"datum unreachable: best climb {best:.3f} m < {climb_height} m; "
            "raise propellant mass or specific impulse"
        )
    if climb(f_lo) >= climb_height:
        raise ParameterDomainError(
            "datum overshoots even with the slowest burn; lower propellant mass"
        )
    thrust = brentq(lambda F: climb(F) - climb_height, f_lo * (1 + 1e-12), 1e9)
    return replace(params, thrust=float(thrust))


def hop_apex_height(params: RobotParams, body: Body, propellant_mass: float = 0.005) -> float:
    """Apex of a vertical hop burning a fixed propellant mass (closed form).

    The measure behind per-body hop range comparisons: how far up a single
    burn carries the vehicle before gravity turns it around.
    """
    if params.thrust <= 0:
        raise ParameterDomainError("thrust is uncalibrated (zero); run calibration")
    impulse = propellant_mass * params.specific_impulse * G0
    t_b = impulse / params.thrust
    g = body.gravity
    a_net = params.thrust / params.mass - g
    if a_net <= 0:
        return 0.0
    v_b = a_net * t_b
    z_b = 0.5 * a_net * t_b * t_b
    return z_b + v_b * v_b / (2.0 * g)
