"""Elastic tether network coupling the robots of a climbing team.

Tethers are tension-only linear springs with optional line-rate damping.
The standard rigging is an X: every robot runs one leg to a passive
central hub (a light ring, treated as massless), so the hub position is
found quasi-statically as the minimum of the network's elastic energy.
Direct robot-to-robot legs are also supported.

Forces from this module plug into the flight integrator as the external
force term, and into the static grip check that decides whether anchored
robots hold a dangling teammate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigValidationError, ConvergenceError, ParameterDomainError

HUB = -1  # node index of the passive central hub in an edge list

_HUB_TOL = 1.0e-6  # N, residual force defining hub convergence
_HUB_MAX_ITER = 100


@dataclass(frozen=True)
class TetherSpec:
    """One leg's material constants.

    stiffness N/m, rest_length m; damping (N s/m) resists line-rate
    change only while the leg is taut and never pushes.
    """

    stiffness: float = 200.0
    rest_length: float = 2.2
    damping: float = 0.0

    def __post_init__(self):
        if self.stiffness <= 0:
            raise ParameterDomainError(f"stiffness must be > 0, got {self.stiffness}")
        if self.rest_length <= 0:
            raise ParameterDomainError(
                f"rest_length must be > 0, got {self.rest_length}"
            )
        if self.damping < 0:
            raise ParameterDomainError(f"damping must be >= 0, got {self.damping}")


def tether_force(
    spec: TetherSpec,
    end_a: np.ndarray,
    end_b: np.ndarray,
    vel_a: Optional[np.ndarray] = None,
    vel_b: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Force the leg applies to end A (pulling it toward end B).

    Zero while slack.  Taut tension is k * (L - L0) plus damping times
    the separation rate, clamped at zero so the leg never pushes.
    """
    d = np.asarray(end_b, dtype=np.float64) - np.asarray(end_a, dtype=np.float64)
    length = float(np.linalg.norm(d))
    if length <= spec.rest_length or length == 0.0:
        return np.zeros(3)
    unit = d / length
    tension = spec.stiffness * (length - spec.rest_length)
    if spec.damping > 0.0 and vel_a is not None and vel_b is not None:
        rate = float(np.dot(np.asarray(vel_b, float) - np.asarray(vel_a, float), unit))
        tension += spec.damping * rate
    return max(tension, 0.0) * unit


class TetherSystem:
    """A set of legs over robot nodes 0..n-1 plus the optional hub node.

    Edges are (i, j) pairs of node indices; ``HUB`` (-1) denotes the
    passive hub.  The network must connect all robots (through the hub
    or directly), otherwise the team could drift apart.
    """

    def __init__(self, n_robots: int, edges: Sequence[tuple], spec: TetherSpec):
        if n_robots < 1:
            raise ParameterDomainError(f"n_robots must be >= 1, got {n_robots}")
        self.n_robots = int(n_robots)
        self.spec = spec
        self.edges = []
        seen = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ConfigValidationError(f"self edge on node {i}")
            for node in (i, j):
                if node != HUB and not 0 <= node < n_robots:
                    raise ConfigValidationError(
                        f"edge node {node} outside 0..{n_robots - 1}"
                    )
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ConfigValidationError(f"duplicate edge {key}")
            seen.add(key)
            self.edges.append(key)
        self.has_hub = any(i == HUB or j == HUB for i, j in self.edges)
        self._check_connected()

    @classmethod
    def x_configuration(cls, n_robots: int, spec: TetherSpec = TetherSpec()) -> "TetherSystem":
        """One leg from every robot to a shared central hub."""
        return cls(n_robots, [(i, HUB) for i in range(n_robots)], spec)

    def _check_connected(self):
        if self.n_robots == 1 and not self.edges:
            return
        adjacency = {i: set() for i in range(self.n_robots)}
        if self.has_hub:
            adjacency[HUB] = set()
        for i, j in self.edges:
            adjacency[i].add(j)
            adjacency[j].add(i)
        frontier = [0]
        reached = {0}
        while frontier:
            node = frontier.pop()
            for nxt in adjacency[node]:
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        missing = set(range(self.n_robots)) - reached
        if missing:
            raise ConfigValidationError(
                f"tether network leaves robots {sorted(missing)} disconnected"
            )

    # -- hub statics --------------------------------------------------------

    def _hub_energy_grad(self, hub: np.ndarray, positions: np.ndarray):
        spec = self.spec
        energy = 0.0
        grad = np.zeros(3)
        hessian = np.zeros((3, 3))
        for i, j in self.edges:
            if i != HUB and j != HUB:
                d = positions[j] - positions[i]
                stretch = float(np.linalg.norm(d)) - spec.rest_length
                if stretch > 0:
                    energy += 0.5 * spec.stiffness * stretch * stretch
                continue
            other = positions[j] if i == HUB else positions[i]
            d = hub - other
            length = float(np.linalg.norm(d))
            stretch = length - spec.rest_length
            if stretch <= 0 or length == 0.0:
                continue
            unit = d / length
            energy += 0.5 * spec.stiffness * stretch * stretch
            grad += spec.stiffness * stretch * unit
            outer = np.outer(unit, unit)
            hessian += spec.stiffness * (
                outer + (stretch / length) * (np.eye(3) - outer)
            )
        return energy, grad, hessian

    def solve_hub(
        self, positions: np.ndarray, guess: Optional[np.ndarray] = None
    ) -> np.ndarray:
        """Quasi-static hub position: elastic energy minimum.

        Damped Newton on the energy gradient; converged when the residual
        net force on the hub drops below 1e-6 N.  With every leg slack the
        energy is flat, and the hub parks at the robot centroid.
        """
        if not self.has_hub:
            raise ConfigValidationError("network has no hub node")
        positions = np.asarray(positions, dtype=np.float64)
        hub = (
            np.asarray(guess, dtype=np.float64).copy()
            if guess is not None
            else positions.mean(axis=0)
        )
        energy, grad, hessian = self._hub_energy_grad(hub, positions)
        for _ in range(_HUB_MAX_ITER):
            residual = float(np.linalg.norm(grad))
            if residual < _HUB_TOL:
                return hub
            try:
                direction = np.linalg.solve(
                    hessian + 1e-12 * np.eye(3), -grad
                )
            except np.linalg.LinAlgError:
                direction = -grad / self.spec.stiffness
            if not np.all(np.isfinite(direction)):
                direction = -grad / self.spec.stiffness
            alpha = 1.0
            for _ in range(40):
                trial = hub + alpha * direction
                e_t, g_t, h_t = self._hub_energy_grad(trial, positions)
                if e_t < energy or float(np.linalg.norm(g_t)) < residual:
                    hub, energy, grad, hessian = trial, e_t, g_t, h_t
                    break
                alpha *= 0.5
            else:
                raise ConvergenceError(
                    f"hub line search stalled at residual {residual:.3e} N",
                    residual=residual,
                )
        residual = float(np.linalg.norm(grad))
        raise ConvergenceError(
            f"hub solve hit {_HUB_MAX_ITER} iterations at residual {residual:.3e} N",
            residual=residual,
        )

    # -- robot-side forces --------------------------------------------------

    def net_robot_force(
        self,
        positions: np.ndarray,
        velocities: Optional[np.ndarray] = None,
        hub: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        """(n_robots, 3) tether force on each robot.

        Solves the hub first unless one is supplied.  Damping uses each
        robot's own line rate; the quasi-static hub is treated as
        stationary over a step.
        """
        positions = np.asarray(positions, dtype=np.float64)
        if positions.shape != (self.n_robots, 3):
            raise ParameterDomainError(
                f"positions must be ({self.n_robots}, 3), got {positions.shape}"
            )
        if self.has_hub and hub is None:
            hub = self.solve_hub(positions)
        forces = np.zeros((self.n_robots, 3))
        zero = np.zeros(3)
        for i, j in self.edges:
            if i == HUB or j == HUB:
                robot = j if i == HUB else i
                v_r = velocities[robot] if velocities is not None else None
                forces[robot] += tether_force(
                    self.spec, positions[robot], hub, v_r, zero if v_r is not None else None
                )
            else:
                v_i = velocities[i] if velocities is not None else None
                v_j = velocities[j] if velocities is not None else None
                f = tether_force(self.spec, positions[i], positions[j], v_i, v_j)
                forces[i] += f
                forces[j] -= f
        return forces

    def energy(self, positions: np.ndarray, hub: Optional[np.ndarray] = None) -> float:
        """Total elastic energy of the network, J."""
        positions = np.asarray(positions, dtype=np.float64)
        if self.has_hub and hub is None:
            hub = self.solve_hub(positions)
        total = 0.0
        for i, j in self.edges:
            if i == HUB or j == HUB:
                other = positions[j if i == HUB else i]
                stretch = float(np.linalg.norm(hub - other)) - self.spec.rest_length
            else:
                stretch = (
                    float(np.linalg.norm(positions[j] - positions[i]))
                    - self.spec.rest_length
                )
            if stretch > 0:
                total += 0.5 * self.spec.stiffness * stretch * stretch
        return total


# ---------------------------------------------------------------------------
# static hold check

@dataclass(frozen=True)
class HoldReport:
    """Outcome of the static grip check for one anchored robot."""

    robot: int
    load: float
    capacity: float

    @property
    def holds(self) -> bool:
        return self.load <= self.capacity


def check_equilibrium(
    system: TetherSystem,
    positions: np.ndarray,
    anchored: Sequence[bool],
    capacities: Sequence[float],
    mass: float,
    gravity: float,
) -> list:
    """Static hold check: does every anchored grip carry its load?

    The load on an anchored robot's grip is the magnitude of its weight
    plus the net tether force (both must be reacted through the spines).
    A report with load == capacity still holds; slipping starts strictly
    beyond capacity.
    """
    positions = np.asarray(positions, dtype=np.float64)
    tether = system.net_robot_force(positions)
    weight = np.array([0.0, 0.0, -mass * gravity])
    reports = []
    for i in range(system.n_robots):
        if not anchored[i]:
            continue
        load = float(np.linalg.norm(weight + tether[i]))
        reports.append(HoldReport(robot=i, load=load, capacity=float(capacities[i])))
    return reports


def settle_drop_depth(
    spec: TetherSpec, mass: float, gravity: float, slack_drop: float
) -> float:
    """Peak elastic stretch of a robot falling onto the hub rigging.

    Energy bound for a robot that free-falls ``slack_drop`` before the
    leg chain to its anchored teammates goes taut.  The chain is two legs
    in series through the hub, so the effective stiffness is k/2; solving
    (k/4) * delta^2 = m g * (slack_drop + delta) for the extra stretch:

        delta = (m g + sqrt(m^2 g^2 + k m g slack_drop)) / (k / 2)
    """
    if slack_drop < 0:
        raise ParameterDomainError(f"slack_drop must be >= 0, got {slack_drop}")
    mg = mass * gravity
    k = spec.stiffness
    return (mg + math.sqrt(mg * mg + k * mg * slack_drop)) / (k / 2.0)
