"""Parameter sweeps, figure presets and analytic-vs-simulation comparison.

Sweep CSVs share one header (``COLUMNS``). Floats are written with 12
significant digits, an unbounded AoI as ``inf``, and columns that were
not computed are left empty. An AoI that is finite but too large for a
double is written from its Decimal value, so ``inf`` always means p_s = 0.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from decimal import Decimal
from pathlib import Path

import numpy as np

from .analytic import (
    INF,
    ModelVariant,
    average_aoi,
    average_aoi_decimal,
    expected_cycle,
    expected_cycle_sq,
)
from .config import config_digest
from .errors import InfeasibleLinkError
from .model import link_budget
from .placement import PlacementSpec, optimize_position
from .sim import SimSpec, simulate

COLUMNS = (
    "x_p_m", "beta", "B_max_j", "distance_m", "los_prob", "charge_slots", "success_prob",
    "aoi_paper_s", "aoi_corrected_s", "aoi_mc_s", "mc_ci_s",
)


class Axis(str, enum.Enum):
    PA_POSITION = "pa_position"
    BETA = "beta"
    CAPACITOR = "capacitor"


def axis_range(start, stop, count):
    if count < 1:
        raise ValueError(f"count must be >= 1 (got {count})")
    if count == 1:
        return (float(start),)
    return tuple(float(v) for v in np.linspace(start, stop, count))


@dataclass(frozen=True)
class SweepSpec:
    axis: Axis
    values: tuple
    secondary_axis: Axis | None = None
    secondary_values: tuple = ()
    sim: SimSpec | None = None
    x_p_m: float | None = None  # PA position when neither axis is pa_position

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis(self.axis))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.secondary_axis is not None:
            object.__setattr__(self, "secondary_axis", Axis(self.secondary_axis))
            object.__setattr__(self, "secondary_values",
                               tuple(float(v) for v in self.secondary_values))
            if self.secondary_axis is self.axis:
                raise ValueError("secondary axis must differ from the primary axis")
            _check_values(self.secondary_values, "secondary values")
        _check_values(self.values, "values")

    def points(self):
        """(parameter dict) per grid point, primary axis outermost."""
        if self.secondary_axis is None:
            return [{self.axis: v} for v in self.values]
        return [{self.axis: a, self.secondary_axis: b}
                for a in self.values for b in self.secondary_values]


def _check_values(values, what):
    if not values:
        raise ValueError(f"{what} must be non-empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{what} must be strictly increasing")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if value == INF:
        return "inf"
    if isinstance(value, Decimal):
        return format(value, ".12g")
    return format(float(value), ".12g")


def _default_position(config):
    return min(max(config.devices[0].x_m, 0.0), config.geometry.waveguide_length_m)


def point_config(config, params):
    if Axis.BETA in params:
        config = replace(config, rf=replace(config.rf, blockage_beta=params[Axis.BETA]))
    if Axis.CAPACITOR in params:
        config = replace(config, energy=replace(config.energy, capacitor_j=params[Axis.CAPACITOR]))
    return config


def sweep_row(config, x_p, variants=tuple(ModelVariant), sim=None, device=None):
    device = device or config.devices[0]
    link = link_budget(config, device, x_p)
    slot = config.energy.slot_s
    aoi = {v: average_aoi(link, slot, v) if v in variants else None for v in ModelVariant}
    for v, value in aoi.items():
        if value == INF and link.success_prob > 0:
            aoi[v] = average_aoi_decimal(link, slot, v)  # finite, just past float range
    mc, mc_ci = None, None
    if sim is not None:
        if link.success_prob > 0 and link.los_prob > 0:
            res = simulate(config, device, x_p, sim)
            mc, mc_ci = res.avg_aoi_s, res.ci_halfwidth_s
        else:
            mc = INF
    return {
        "x_p_m": x_p,
        "beta": config.rf.blockage_beta,
        "B_max_j": config.energy.capacitor_j,
        "distance_m": link.distance_m,
        "los_prob": link.los_prob,
        "charge_slots": link.charge_slots,
        "success_prob": link.success_prob,
        "aoi_paper_s": aoi[ModelVariant.PAPER],
        "aoi_corrected_s": aoi[ModelVariant.CORRECTED],
        "aoi_mc_s": mc,
        "mc_ci_s": mc_ci,
    }


def sweep_rows(config, sweep, variants=tuple(ModelVariant), jobs=1):
    default_x = sweep.x_p_m if sweep.x_p_m is not None else _default_position(config)

    def one(params):
        x_p = params.get(Axis.PA_POSITION, default_x)
        return sweep_row(point_config(config, params), x_p, variants, sweep.sim)

    points = sweep.points()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, points))
    return [one(p) for p in points]


def write_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in COLUMNS])
    return len(rows)


def write_rows(rows, out_path):
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        return write_csv(rows, fh)


def read_rows(path):
    """Parse a sweep CSV back into floats (empty cells become None)."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [{k: (float(v) if v != "" else None) for k, v in row.items()} for row in reader]


def run_sweep(config, sweep, out_path, variants=tuple(ModelVariant), jobs=1):
    return write_rows(sweep_rows(config, sweep, variants, jobs), out_path)


FIG3_BETAS = (1e-5, 1e-4, 1e-3)
FIG4_BETAS = tuple(float(v) for v in np.logspace(-5, -3, 9))
FIG4_POSITIONS = (0.0, 5.0, 10.0, 20.0, 35.0)
FIG5_CAPACITORS = tuple(2.0 ** e for e in range(-7, -2))
WIDE_LENGTH_M = 5000.0


def preset_sweeps(name, config, sim=None):
    """Expand a named figure recipe into (file suffix, config, SweepSpec) triples."""
    length = config.geometry.waveguide_length_m
    if name == "fig3":
        wide = replace(config, geometry=replace(config.geometry, waveguide_length_m=WIDE_LENGTH_M))
        return [
            ("", config, SweepSpec(Axis.BETA, FIG3_BETAS, Axis.PA_POSITION,
                                   axis_range(0, length, 141), sim)),
            ("_wide", wide, SweepSpec(Axis.BETA, FIG3_BETAS, Axis.PA_POSITION,
                                      axis_range(0, WIDE_LENGTH_M, 201), sim)),
        ]
    if name == "fig4":
        positions = tuple(x for x in FIG4_POSITIONS if x <= length)
        return [("", config, SweepSpec(Axis.BETA, FIG4_BETAS, Axis.PA_POSITION, positions, sim))]
    if name == "fig5":
        return [("", config, SweepSpec(Axis.PA_POSITION, axis_range(0, length, 36),
                                       Axis.CAPACITOR, FIG5_CAPACITORS, sim))]
    raise ValueError(f"unknown preset {name!r} (expected fig3, fig4 or fig5)")


def optimal_rows(config, betas, placement=None, variants=tuple(ModelVariant), jobs=1):
    """One row per beta at the AoI-minimizing PA position."""
    placement = placement or PlacementSpec()
    rows = []
    for beta in betas:
        cfg = point_config(config, {Axis.BETA: beta})
        try:
            x_star = optimize_position(cfg, placement, jobs).x_p_star_m
        except InfeasibleLinkError:
            x_star = _default_position(cfg)
        rows.append(sweep_row(cfg, x_star, variants))
    return rows


def _suffixed(out_path, suffix):
    out = Path(out_path)
    return out.with_name(out.stem + suffix + out.suffix)


def run_preset(name, config, out_path, sim=None, variants=tuple(ModelVariant), jobs=1):
    """Write every CSV of a figure recipe; returns {path: rows written}."""
    written = {}
    for suffix, cfg, sweep in preset_sweeps(name, config, sim):
        path = _suffixed(out_path, suffix)
        written[str(path)] = run_sweep(cfg, sweep, path, variants, jobs)
    if name == "fig4":
        path = _suffixed(out_path, "_optimal")
        written[str(path)] = write_rows(optimal_rows(config, FIG4_BETAS, variants=variants,
                                                     jobs=jobs), path)
    return written


def _covers(estimate, halfwidth, value):
    return abs(estimate - value) <= halfwidth + 1e-9 * abs(value)


def compare(config, x_p, sim, out_path=None, device=None, jobs=1):
    """Analytic moments of both variants against a simulation run.

    The verdict names the variant whose E(S^2) is inside the simulated
    95% interval, or ``inconclusive`` when both or neither are.
    """
    device = device or config.devices[0]
    link = link_budget(config, device, x_p)
    if link.success_prob <= 0 or link.los_prob <= 0:
        raise InfeasibleLinkError(f"success probability is zero at x_p={x_p!r}")
    e_s = expected_cycle(link)
    values = {}
    for v in ModelVariant:
        values[v.label] = {
            "e_s": e_s,
            "e_s2": expected_cycle_sq(link, v),
            "aoi_s": average_aoi(link, config.energy.slot_s, v),
        }
    res = simulate(config, device, x_p, sim, jobs)
    half = res.ci("e_s2")
    supported = [label for label, vals in values.items()
                 if _covers(res.e_s2_hat, half, vals["e_s2"])]
    record = {
        "config_digest": config_digest(config),
        "x_p_m": x_p,
        "link": {
            "distance_m": link.distance_m,
            "los_prob": link.los_prob,
            "charge_slots": link.charge_slots,
            "success_prob": link.success_prob,
        },
        "variant_values": values,
        "sim": {"mode": sim.mode.value, **res.to_dict()},
        "verdict": supported[0] if len(supported) == 1 else "inconclusive",
        "seed": sim.seed,
    }
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(dumps_record(record))
    return record


def dumps_record(record):
    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, float) and not math.isfinite(obj):
            return "inf" if obj > 0 else str(obj)
        return obj

    return json.dumps(clean(record), indent=2) + "\n"
