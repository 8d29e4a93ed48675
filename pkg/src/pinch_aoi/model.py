"""Scenario types and the physical-layer link model.

Geometry of the pinching antenna (PA) and the device, probabilistic LoS
blockage, free-space channel gain, linear energy harvesting, and the
success probability of one full-capacitor transmission. All quantities
are SI: meters, seconds, watts, joules, hertz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, DomainError

SPEED_OF_LIGHT = 299792458.0

# K feeds float moment arithmetic, so it must stay exactly representable
MAX_CHARGE_SLOTS = 2**53


@dataclass(frozen=True)
class Geometry:
    waveguide_length_m: float
    waveguide_height_m: float
    area_x_m: float
    area_y_m: float

    def problems(self):
        out = []
        for name in ("waveguide_length_m", "waveguide_height_m", "area_x_m", "area_y_m"):
            if not getattr(self, name) > 0:
                out.append(f"geometry.{name} must be > 0 (got {getattr(self, name)!r})")
        return out


@dataclass(frozen=True)
class Device:
    x_m: float
    y_m: float
    weight: float = 1.0

    def problems(self, geometry=None, index=0):
        out = []
        tag = f"devices[{index}]"
        if not self.weight >= 0:
            out.append(f"{tag}.weight must be >= 0 (got {self.weight!r})")
        if geometry is not None:
            if not 0 <= self.x_m <= geometry.area_x_m:
                out.append(f"{tag}.x_m must lie in [0, area_x_m] (got {self.x_m!r})")
            half = geometry.area_y_m / 2
            if not -half <= self.y_m <= half:
                out.append(f"{tag}.y_m must lie in [-area_y_m/2, area_y_m/2] (got {self.y_m!r})")
        return out


@dataclass(frozen=True)
class RfParams:
    carrier_hz: float
    blockage_beta: float
    lightspeed_m_s: float = SPEED_OF_LIGHT

    def problems(self):
        out = []
        if not self.carrier_hz > 0:
            out.append(f"rf.carrier_hz must be > 0 (got {self.carrier_hz!r})")
        if not self.lightspeed_m_s > 0:
            out.append(f"rf.lightspeed_m_s must be > 0 (got {self.lightspeed_m_s!r})")
        if not 0 <= self.blockage_beta <= 1:
            out.append(f"rf.blockage_beta must lie in [0, 1] (got {self.blockage_beta!r})")
        return out


@dataclass(frozen=True)
class EnergyParams:
    tx_power_w: float
    conversion_eff: float
    capacitor_j: float
    slot_s: float

    def problems(self):
        out = []
        if not self.tx_power_w > 0:
            out.append(f"energy.tx_power_w must be > 0 (got {self.tx_power_w!r})")
        if not 0 < self.conversion_eff < 1:
            out.append(f"energy.conversion_eff must lie in (0, 1) (got {self.conversion_eff!r})")
        if not self.capacitor_j > 0:
            out.append(f"energy.capacitor_j must be > 0 (got {self.capacitor_j!r})")
        if not self.slot_s > 0:
            out.append(f"energy.slot_s must be > 0 (got {self.slot_s!r})")
        return out


@dataclass(frozen=True)
class CommParams:
    bandwidth_hz: float
    packet_bits: float
    noise_w: float

    def problems(self):
        out = []
        for name in ("bandwidth_hz", "packet_bits", "noise_w"):
            if not getattr(self, name) > 0:
                out.append(f"comm.{name} must be > 0 (got {getattr(self, name)!r})")
        return out

    @property
    def noise_dbm(self):
        return 10 * math.log10(self.noise_w / 1e-3)


@dataclass(frozen=True)
class SystemConfig:
    """Complete scenario. Construction validates every invariant at once."""

    geometry: Geometry
    devices: tuple
    rf: RfParams
    energy: EnergyParams
    comm: CommParams

    def __post_init__(self):
        object.__setattr__(self, "devices", tuple(self.devices))
        problems = (
            self.geometry.problems()
            + self.rf.problems()
            + self.energy.problems()
            + self.comm.problems()
        )
        if not self.devices:
            problems.append("devices must contain at least one device")
        for i, dev in enumerate(self.devices):
            problems.extend(dev.problems(self.geometry, i))
        if problems:
            raise ConfigError(problems)


@dataclass(frozen=True)
class LinkBudget:
    """Derived per-(device, x_p) link quantities."""

    distance_m: float
    los_prob: float
    channel_gain: float
    slot_energy_j: float
    charge_slots: int
    coverage_radius_m: float
    success_prob: float


def dbm_to_watts(value_dbm):
    return 10 ** (value_dbm / 10) * 1e-3


def pa_device_distance(geometry, device, x_p):
    """Distance from the PA at (x_p, 0, h_w) to the device at (x_u, y_u, 0)."""
    if not 0 <= x_p <= geometry.waveguide_length_m:
        raise DomainError(
            f"PA position {x_p!r} outside waveguide [0, {geometry.waveguide_length_m}]"
        )
    dx = x_p - device.x_m
    return math.sqrt(dx * dx + device.y_m * device.y_m
                     + geometry.waveguide_height_m * geometry.waveguide_height_m)


def los_probability(rf, d):
    return math.exp(-rf.blockage_beta * d * d)


def antenna_constant(rf):
    r = rf.lightspeed_m_s / (4 * math.pi * rf.carrier_hz)
    return r * r


def los_channel_gain(rf, d):
    if not d > 0:
        raise DomainError(f"distance must be > 0 (got {d!r})")
    return antenna_constant(rf) / (d * d)


def per_slot_los_energy(energy, rf, d):
    """Energy harvested in one slot with a LoS link present."""
    return energy.conversion_eff * energy.tx_power_w * los_channel_gain(rf, d) * energy.slot_s


def slots_to_fill(capacitor_j, slot_energy_j):
    """Smallest k with k * slot_energy_j >= capacitor_j, evaluated in floats.

    The float products are what a slot-by-slot accumulator compares
    against the capacitor, so the ceiling is nudged until the bracketing
    (k-1)*e < B_max <= k*e holds exactly.
    """
    if not slot_energy_j > 0:
        raise DomainError(f"slot energy must be > 0 (got {slot_energy_j!r})")
    ratio = capacitor_j / slot_energy_j
    if not math.isfinite(ratio) or ratio > MAX_CHARGE_SLOTS:
        raise OverflowError(f"charge slot count {ratio!r} exceeds {MAX_CHARGE_SLOTS}")
    k = max(1, math.ceil(ratio))
    while k > 1 and (k - 1) * slot_energy_j >= capacitor_j:
        k -= 1
    while k * slot_energy_j < capacitor_j:
        k += 1
    return k


def charge_slots_required(energy, rf, d):
    return slots_to_fill(energy.capacitor_j, per_slot_los_energy(energy, rf, d))


def rate_threshold(comm, energy):
    """Spectral efficiency theta = D / (B * slot) a transmission must reach."""
    return comm.packet_bits / (comm.bandwidth_hz * energy.slot_s)


def coverage_radius(comm, energy, rf):
    """Largest distance at which a full-capacitor LoS transmission meets the rate."""
    theta = rate_threshold(comm, energy)
    if not theta > 0:
        raise DomainError(f"rate threshold must be > 0 (got {theta!r})")
    snr_needed = math.expm1(theta * math.log(2))
    return math.sqrt(energy.capacitor_j * antenna_constant(rf)
                     / (snr_needed * energy.slot_s * comm.noise_w))


def success_probability(config, device, x_p):
    d = pa_device_distance(config.geometry, device, x_p)
    if d > coverage_radius(config.comm, config.energy, config.rf):
        return 0.0
    return los_probability(config.rf, d)


def link_budget(config, device, x_p):
    """Evaluate every link quantity for one device and PA position."""
    d = pa_device_distance(config.geometry, device, x_p)
    p = los_probability(config.rf, d)
    radius = coverage_radius(config.comm, config.energy, config.rf)
    e = per_slot_los_energy(config.energy, config.rf, d)
    return LinkBudget(
        distance_m=d,
        los_prob=p,
        channel_gain=los_channel_gain(config.rf, d),
        slot_energy_j=e,
        charge_slots=slots_to_fill(config.energy.capacitor_j, e),
        coverage_radius_m=radius,
        success_prob=p if d <= radius else 0.0,
    )
