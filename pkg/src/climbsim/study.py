"""Reliability Monte Carlo and the system-size trade study.

Two analyses over team size N and hop batch n:

* Failure probability: when n_f robots hang unanchored, the remaining
  N - n_f each hold with k spines whose per-contact capacity is uniform
  on 1..2 N.  The system fails when the anchored capacity total drops
  below the whole team's weight.  Curves over k use common random
  numbers, so every sampled curve is monotone trial-by-trial.

* Fitness: spine demand, travel time, instrument coverage, and tether
  link count per N, min-max normalized over the feasible sizes and
  multiplied into a single figure of merit.  Sizes with N <= n cannot
  keep an anchored set and score zero, outside the normalization.

Monte Carlo work is split into fixed-size chunks, each with its own
seed-derived stream, and reduced in chunk order; thread count changes
scheduling only, never results.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import rng
from .errors import ConfigValidationError, ParameterDomainError

DEFAULT_CAPACITY_BAND = (1.0, 2.0)
_CHUNK = 4096  # trials per RNG chunk; fixed so thread count cannot matter


@dataclass(frozen=True)
class TradeStudyConfig:
    """Inputs of the trade study; defaults reproduce the standard setup.

    ``instrument_range`` (r) and ``robot_separation`` (sep) shape the
    coverage metric: each robot images a disk of radius r and every
    robot pair closer than 2r double-counts a lens-shaped overlap.  The
    orderings the defaults produce are sensitive to sep/r; both are
    plain config fields for sensitivity sweeps.
    """

    robot_mass: float = 3.0
    gravity: float = 3.71
    per_contact_load: float = 1.5
    hop_distance: float = 1.27
    hop_time: float = 1.5
    propellant_budget: float = 1000.0  # g
    propellant_per_hop: float = 5.0  # g
    instrument_range: float = 0.75
    robot_separation: float = 1.2
    system_sizes: tuple = (2, 3, 4, 5, 6, 7, 8)
    hop_batch: int = 1

    def __post_init__(self):
        object.__setattr__(
            self, "system_sizes", tuple(int(n) for n in self.system_sizes)
        )
        positives = (
            self.robot_mass,
            self.gravity,
            self.per_contact_load,
            self.hop_distance,
            self.hop_time,
            self.propellant_budget,
            self.propellant_per_hop,
            self.instrument_range,
            self.robot_separation,
        )
        if any(v <= 0 for v in positives):
            raise ConfigValidationError("all trade-study scalars must be > 0")
        if self.hop_batch < 1:
            raise ConfigValidationError("hop_batch must be >= 1")
        if len(self.system_sizes) < 2:
            raise ConfigValidationError("need at least two system sizes")
        if any(n < 2 for n in self.system_sizes):
            raise ConfigValidationError("system sizes must be >= 2")
        if len(set(self.system_sizes)) != len(self.system_sizes):
            raise ConfigValidationError("duplicate system sizes")


# ---------------------------------------------------------------------------
# spine demand

def spines_required(
    n_robots: int,
    hop_batch: int,
    mass: float = 3.0,
    gravity: float = 3.71,
    per_contact_load: float = 1.5,
) -> float:
    """Real-valued spine demand per robot: N m g / (load (N - n))."""
    if n_robots <= hop_batch:
        raise ParameterDomainError(
            f"need n_robots > hop_batch, got {n_robots} <= {hop_batch}"
        )
    if hop_batch < 1:
        raise ParameterDomainError(f"hop_batch must be >= 1, got {hop_batch}")
    return (n_robots * mass * gravity) / (per_contact_load * (n_robots - hop_batch))


def critical_spines(
    n_robots: int,
    hop_batch: int,
    mass: float = 3.0,
    gravity: float = 3.71,
    per_contact_load: float = 1.5,
) -> int:
    """Integer spine count at the grip-demand threshold (floor of the
    real-valued demand)."""
    return int(
        math.floor(spines_required(n_robots, hop_batch, mass, gravity, per_contact_load))
    )


# ---------------------------------------------------------------------------
# failure Monte Carlo

def _chunk_sizes(trials: int):
    full, rem = divmod(trials, _CHUNK)
    sizes = [_CHUNK] * full
    if rem:
        sizes.append(rem)
    return sizes


def failure_probability(
    n_robots: int,
    n_failed: int,
    spines: int,
    trials: int = 100_000,
    seed: int = 0,
    mass: float = 3.0,
    gravity: float = 3.71,
    capacity_band=DEFAULT_CAPACITY_BAND,
    threads: int = 1,
) -> float:
    """P(anchored capacity < team weight) with n_failed robots hanging.

    Anchored contacts: spines * (n_robots - n_failed), each uniform on
    the capacity band.  The deterministic edges short-circuit exactly:
    probability 1 when even maximum capacities cannot carry the weight,
    0 when minimum capacities already do.
    """
    counts, total = _failure_counts(
        n_robots,
        n_failed,
        [spines],
        trials,
        seed,
        mass,
        gravity,
        capacity_band,
        threads,
        stream_tag="reliability",
    )
    return counts[0] / total


def failure_curve(
    n_robots: int,
    n_failed: int,
    spine_counts: Sequence[int],
    trials: int = 100_000,
    seed: int = 0,
    mass: float = 3.0,
    gravity: float = 3.71,
    capacity_band=DEFAULT_CAPACITY_BAND,
    threads: int = 1,
) -> np.ndarray:
    """Failure probability at each spine count, common random numbers.

    Every trial draws one row of capacities reused across all k via
    prefix sums, so each sampled curve is non-increasing in k exactly,
    not just in expectation.
    """
    counts, total = _failure_counts(
        n_robots,
        n_failed,
        spine_counts,
        trials,
        seed,
        mass,
        gravity,
        capacity_band,
        threads,
        stream_tag="curve",
    )
    return counts / total


def _failure_counts(
    n_robots,
    n_failed,
    spine_counts,
    trials,
    seed,
    mass,
    gravity,
    capacity_band,
    threads,
    stream_tag,
):
    if trials < 1:
        raise ParameterDomainError(f"trials must be >= 1, got {trials}")
    if not 0 <= n_failed < n_robots:
        raise ParameterDomainError(
            f"need 0 <= n_failed < n_robots, got {n_failed}, {n_robots}"
        )
    spine_counts = [int(k) for k in spine_counts]
    if any(k < 1 for k in spine_counts):
        raise ParameterDomainError("spine counts must be >= 1")
    if any(b - a != b - a or a >= b for a, b in [capacity_band]):
        raise ParameterDomainError(f"bad capacity band {capacity_band}")
    lo, hi = float(capacity_band[0]), float(capacity_band[1])
    supporters = n_robots - n_failed
    threshold = n_robots * mass * gravity
    k_max = max(spine_counts)
    cols = np.array([k * supporters - 1 for k in spine_counts])

    # deterministic edges, exact by construction
    edge = np.full(len(spine_counts), -1.0)
    for idx, k in enumerate(spine_counts):
        contacts = k * supporters
        if contacts * hi <= threshold:
            edge[idx] = 1.0
        elif contacts * lo >= threshold:
            edge[idx] = 0.0
    if np.all(edge >= 0.0):
        return edge * trials, trials

    sizes = _chunk_sizes(trials)

    def run_chunk(index_size):
        index, size = index_size
        gen = rng.stream(seed, stream_tag, n_robots, n_failed, index)
        draws = gen.uniform(lo, hi, (size, k_max * supporters))
        totals = draws.cumsum(axis=1)[:, cols]
        return (totals < threshold).sum(axis=0)

    jobs = list(enumerate(sizes))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(run_chunk, jobs))
    else:
        partials = [run_chunk(job) for job in jobs]
    counts = np.zeros(len(spine_counts), dtype=np.float64)
    for part in partials:  # ordered reduction, chunk index order
        counts += part
    for idx in range(len(spine_counts)):
        if edge[idx] >= 0.0:
            counts[idx] = edge[idx] * trials
    return counts, trials


def curve_to_csv(path, spine_counts, probabilities, provenance=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key in sorted(provenance or {}):
            fh.write(f"# {key}: {provenance[key]}\n")
        fh.write("spines_per_robot,failure_probability\n")
        for k, p in zip(spine_counts, probabilities):
            fh.write(f"{int(k)},{p:.17g}\n")


# ---------------------------------------------------------------------------
# trade metrics

@dataclass(frozen=True)
class TradeMetrics:
    """Raw per-size metrics; lower is better except coverage."""

    spines: float
    distance: float
    time: float
    coverage: float
    links: int


def _lens_area(radius: float, separation: float) -> float:
    """Overlap area of two equal disks at the given center separation."""
    if separation >= 2.0 * radius:
        return 0.0
    return 2.0 * radius * radius * math.acos(
        separation / (2.0 * radius)
    ) - (separation / 2.0) * math.sqrt(4.0 * radius * radius - separation * separation)


def trade_metrics(config: TradeStudyConfig, n_robots: int) -> TradeMetrics:
    """The metric vector of one system size.

    Distance is the propellant budget turned into hop lengths, the same
    for every N.  Time serializes the hop waves: ceil(N / n) waves per
    advance.  Coverage sums the N instrument disks minus the pairwise
    lens overlaps; links counts the robot pairs.
    """
    n = int(n_robots)
    hops = config.propellant_budget / config.propellant_per_hop
    pairs = math.comb(n, 2)
    disk = math.pi * config.instrument_range**2
    lens = _lens_area(config.instrument_range, config.robot_separation)
    return TradeMetrics(
        spines=spines_required(
            n,
            config.hop_batch,
            config.robot_mass,
            config.gravity,
            config.per_contact_load,
        ),
        distance=hops * config.hop_distance,
        time=hops * config.hop_time * math.ceil(n / config.hop_batch),
        coverage=n * disk - pairs * lens,
        links=pairs,
    )


# ---------------------------------------------------------------------------
# fitness

_LOWER_BETTER = ("spines", "time", "links")
_HIGHER_BETTER = ("coverage",)


@dataclass
class FitnessReport:
    """Raw metrics, normalized metrics, and product fitness per size."""

    config: TradeStudyConfig
    sizes: tuple
    feasible: tuple
    infeasible: tuple
    raw: dict  # N -> TradeMetrics
    normalized: dict  # N -> {metric: value in [0, 1]}
    fitness: dict  # N -> float
    argmax_n: int
    argmin_n: int

    def to_json(self, path, provenance=None) -> None:
        payload = {
            "config": {
                "robot_mass": self.config.robot_mass,
                "gravity": self.config.gravity,
                "per_contact_load": self.config.per_contact_load,
                "hop_distance": self.config.hop_distance,
                "hop_time": self.config.hop_time,
                "propellant_budget": self.config.propellant_budget,
                "propellant_per_hop": self.config.propellant_per_hop,
                "instrument_range": self.config.instrument_range,
                "robot_separation": self.config.robot_separation,
                "system_sizes": list(self.config.system_sizes),
                "hop_batch": self.config.hop_batch,
            },
            "sizes": list(self.sizes),
            "feasible": list(self.feasible),
            "infeasible": list(self.infeasible),
            "raw": {
                str(n): {
                    "spines": m.spines,
                    "distance": m.distance,
                    "time": m.time,
                    "coverage": m.coverage,
                    "links": m.links,
                }
                for n, m in self.raw.items()
            },
            "normalized": {str(n): v for n, v in self.normalized.items()},
            "fitness": {str(n): v for n, v in self.fitness.items()},
            "argmax_n": self.argmax_n,
            "argmin_n": self.argmin_n,
            "notes": (
                "coverage overlap counts all robot pairs; instrument_range and "
                "robot_separation defaults are documented choices, orderings are "
                "sensitive to their ratio; distance is constant across N and "
                "excluded from normalization; sizes with N <= hop_batch are "
                "infeasible and score 0 outside the normalization"
            ),
        }
        if provenance:
            payload["_provenance"] = dict(provenance)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def fitness_study(config: TradeStudyConfig) -> FitnessReport:
    """Normalize the metric vectors over feasible sizes and rank them.

    Per metric, min-max normalization oriented so 1 is best; a metric
    with zero range contributes 1 for every size.  Distance never varies
    with N, so it stays out of the product.  Fitness is the product of
    the normalized spine, time, coverage, and link metrics; infeasible
    sizes (N <= hop_batch, no anchored set possible) score 0.
    """
    sizes = config.system_sizes
    feasible = tuple(n for n in sizes if n > config.hop_batch)
    infeasible = tuple(n for n in sizes if n <= config.hop_batch)
    if len(feasible) < 2:
        raise ConfigValidationError(
            "need at least two feasible system sizes (N > hop_batch)"
        )
    raw = {n: trade_metrics(config, n) for n in feasible}

    def column(name):
        return {n: float(getattr(raw[n], name)) for n in feasible}

    normalized = {n: {} for n in feasible}
    for name in _LOWER_BETTER + _HIGHER_BETTER:
        values = column(name)
        lo, hi = min(values.values()), max(values.values())
        span = hi - lo
        for n in feasible:
            if span == 0.0:
                normalized[n][name] = 1.0
            elif name in _LOWER_BETTER:
                normalized[n][name] = (hi - values[n]) / span
            else:
                normalized[n][name] = (values[n] - lo) / span

    fitness = {}
    for n in sizes:
        if n in normalized:
            product = 1.0
            for name in _LOWER_BETTER + _HIGHER_BETTER:
                product *= normalized[n][name]
            fitness[n] = product
        else:
            fitness[n] = 0.0

    argmax_n = max(feasible, key=lambda n: (fitness[n], -n))
    argmin_n = min(sizes, key=lambda n: (fitness[n], n))
    return FitnessReport(
        config=config,
        sizes=sizes,
        feasible=feasible,
        infeasible=infeasible,
        raw=raw,
        normalized=normalized,
        fitness=fitness,
        argmax_n=argmax_n,
        argmin_n=argmin_n,
    )
