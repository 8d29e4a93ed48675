"""PA position search: uniform grid over [0, L] and the device projections, then local refinement.

The objective is piecewise smooth in x_p (the ceiling in K and the
coverage indicator make it jump), so the search is exhaustive rather
than derivative based.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .analytic import DEFAULT_VARIANT, INF, ModelVariant, config_average_aoi
from .errors import ConfigError, InfeasibleLinkError


class Objective(str, enum.Enum):
    SINGLE = "single"
    SUM = "sum"
    MAX = "max"
    WEIGHTED_SUM = "wsum"


@dataclass(frozen=True)
class PlacementSpec:
    grid_step_m: float | None = None  # None means 1% of the waveguide length
    refine_rounds: int = 2
    objective: Objective = Objective.SINGLE
    variant: ModelVariant = DEFAULT_VARIANT

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective(self.objective))
        object.__setattr__(self, "variant", ModelVariant(self.variant))
        if self.refine_rounds < 0:
            raise ValueError(f"refine_rounds must be >= 0 (got {self.refine_rounds})")

    def step_for(self, length):
        step = 0.01 * length if self.grid_step_m is None else self.grid_step_m
        if not 0 < step <= length:
            raise ValueError(f"grid_step_m must lie in (0, {length}] (got {step})")
        return step


@dataclass(frozen=True)
class PlacementResult:
    x_p_star_m: float
    aoi_star_s: float
    per_device_aoi_s: tuple
    evaluations: int
    log: tuple = field(default=(), repr=False, compare=False)


def fdma_decompose(config):
    """Split an N-device scenario into N single-device links with bandwidth B/N each.

    Every link keeps the full transmit power.
    """
    n = len(config.devices)
    comm = replace(config.comm, bandwidth_hz=config.comm.bandwidth_hz / n) if n > 1 else config.comm
    return [replace(config, devices=(dev,), comm=comm) for dev in config.devices]


def per_device_aoi(config, x_p, variant=DEFAULT_VARIANT):
    return tuple(config_average_aoi(sub, sub.devices[0], x_p, variant)
                 for sub in fdma_decompose(config))


def aggregate(values, weights, objective):
    objective = Objective(objective)
    if objective is Objective.SINGLE:
        return values[0]
    if objective is Objective.SUM:
        return math.fsum(values) if INF not in values else INF
    if objective is Objective.MAX:
        return max(values)
    active = [(w, v) for w, v in zip(weights, values) if w > 0]
    if any(v == INF for _, v in active):
        return INF
    return math.fsum(w * v for w, v in active)


def objective_value(config, x_p, objective=Objective.SINGLE, variant=DEFAULT_VARIANT):
    """Aggregate objective and the per-device AoIs it was built from."""
    objective = Objective(objective)
    if objective is Objective.SINGLE and len(config.devices) != 1:
        raise ConfigError(
            f"single-device objective needs exactly one device (config has {len(config.devices)})"
        )
    values = per_device_aoi(config, x_p, variant)
    weights = [d.weight for d in config.devices]
    return aggregate(values, weights, objective), values


def _centroid(config):
    total = sum(d.weight for d in config.devices)
    if total > 0:
        return sum(d.weight * d.x_m for d in config.devices) / total
    return sum(d.x_m for d in config.devices) / len(config.devices)


def _grid(length, step):
    n = int(math.floor(length / step + 1e-9))
    points = [k * step for k in range(n + 1)]
    if length - points[-1] > 1e-12 * length:
        points.append(float(length))
    return points


def _evaluate(config, points, spec, jobs):
    def one(x):
        return objective_value(config, x, spec.objective, spec.variant)

    if jobs > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, points))
    return [one(x) for x in points]


def _best(log, centroid):
    # lowest objective, then nearest the weighted device centroid, then smallest x_p
    return min(log, key=lambda e: (e[1], abs(e[0] - centroid), e[0]))


def optimize_position(config, spec=None, jobs=1):
    spec = spec or PlacementSpec()
    length = config.geometry.waveguide_length_m
    step = spec.step_for(length)
    centroid = _centroid(config)

    log = {}

    def visit(points):
        fresh = [x for x in dict.fromkeys(points) if x not in log]
        for x, res in zip(fresh, _evaluate(config, fresh, spec, jobs)):
            log[x] = res

    # device projections join the grid: for one device that is the exact optimum,
    # which a grid whose step does not divide x_u would otherwise miss
    anchors = [min(length, max(0.0, float(d.x_m))) for d in config.devices]
    visit(_grid(length, step) + anchors)
    incumbent = _best([(x, v[0]) for x, v in log.items()], centroid)
    for _ in range(spec.refine_rounds):
        fine = step / 10
        base = round(incumbent[0] / fine)
        visit([min(length, max(0.0, (base + j) * fine)) for j in range(-10, 11)])
        incumbent = _best([(x, v[0]) for x, v in log.items()], centroid)
        step = fine

    x_star, value = incumbent
    if value == INF:
        raise InfeasibleLinkError("objective is infinite at every evaluated PA position")
    entries = tuple(sorted((x, v[0]) for x, v in log.items()))
    return PlacementResult(x_star, value, log[x_star][1], len(log), entries)


def fixed_antenna_baseline(config, x_fixed_m=0.0, objective=Objective.SINGLE,
                           variant=DEFAULT_VARIANT):
    value, per_device = objective_value(config, x_fixed_m, objective, variant)
    return PlacementResult(float(x_fixed_m), value, per_device, 1, ((float(x_fixed_m), value),))
