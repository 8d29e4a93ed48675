"""Scenario builders shared by the test modules."""

import math
from dataclasses import replace

from pinch_aoi.config import default_config
from pinch_aoi.model import (
    CommParams,
    Device,
    EnergyParams,
    Geometry,
    LinkBudget,
    RfParams,
    SystemConfig,
    antenna_constant,
)

SYNTH_X = 10.0


def synthetic_config(k, p, slot_s=1.0):
    """Single device directly below the PA at x_p = 10 with the given K and LoS probability.

    Distance is exactly h_w = 10 m; noise is low enough that the link is
    always inside coverage, so p_s equals p.
    """
    rf = RfParams(28e9, 0.0 if p == 1 else -math.log(p) / 100.0)
    slot_energy = 0.7 * 10.0 * antenna_constant(rf) / 100.0 * slot_s
    return SystemConfig(
        geometry=Geometry(35.0, 10.0, 35.0, 10.0),
        devices=[Device(SYNTH_X, 0.0)],
        rf=rf,
        energy=EnergyParams(10.0, 0.7, (k - 0.5) * slot_energy, slot_s),
        comm=CommParams(1000.0, 1000.0, 1e-18),
    )


def make_link(k, p, p_s):
    return LinkBudget(distance_m=10.0, los_prob=p, channel_gain=1.0, slot_energy_j=1.0,
                      charge_slots=k, coverage_radius_m=100.0, success_prob=p_s)


def reference_config(beta=1e-3, **energy):
    cfg = default_config()
    cfg = replace(cfg, rf=replace(cfg.rf, blockage_beta=beta))
    if energy:
        cfg = replace(cfg, energy=replace(cfg.energy, **energy))
    return cfg
