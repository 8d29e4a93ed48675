"""Renewal moments of the harvest-then-transmit cycle and the average AoI.

A renewal cycle S is the slot count between two deliveries:
S = sum_{i=1..M} (T_i + 1), with T_i ~ NegBin(K, p) charging slots and
M ~ Geometric(p_s) attempts. Two second moments are offered:

* ``PAPER`` uses E(T^2) E(M) + (1 + E(T))^2 E(M^2), the closed form with E(T^2) where Var(T) belongs;
* ``CORRECTED`` uses Var(T) E(M) + (1 + E(T))^2 E(M^2), the standard
  compound-sum identity.

They differ by exactly K^2 / (p^2 p_s). An unbounded quantity (p = 0 or
p_s = 0) is returned as ``math.inf``, never raised.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

INF = math.inf


class ModelVariant(str, enum.Enum):
    PAPER = "paper"
    CORRECTED = "corrected"

    @property
    def label(self):
        return {"paper": "PaperClosedForm", "corrected": "CorrectedCompound"}[self.value]


DEFAULT_VARIANT = ModelVariant.CORRECTED


def is_infinite(value):
    return value == INF


@dataclass(frozen=True)
class RenewalMoments:
    e_t: float
    e_t2: float
    e_m: float
    e_m2: float
    e_s: float
    e_s2: float
    variant: ModelVariant


def expected_charge_slots(link):
    p = link.los_prob
    if p <= 0:
        return INF
    return link.charge_slots / p


def charge_slots_variance(link):
    p = link.los_prob
    if p <= 0:
        return INF
    return link.charge_slots * (1 - p) / p / p


def expected_charge_slots_sq(link):
    p = link.los_prob
    if p <= 0:
        return INF
    k = link.charge_slots
    mean = k / p
    return k * (1 - p) / p / p + mean * mean


def attempt_moments(p_s):
    """First and second moments of the geometric attempt count."""
    if p_s <= 0:
        return INF, INF
    return 1 / p_s, (2 - p_s) / p_s / p_s


def expected_cycle(link):
    p, ps = link.los_prob, link.success_prob
    if p <= 0 or ps <= 0:
        return INF
    return (p + link.charge_slots) / p / ps


def expected_cycle_sq(link, variant=DEFAULT_VARIANT):
    p, ps = link.los_prob, link.success_prob
    if p <= 0 or ps <= 0:
        return INF
    k = link.charge_slots
    variant = ModelVariant(variant)
    # divide step by step so tiny p overflows to inf instead of dividing by 0
    cycle = (p + k) / p / ps
    tail = cycle * cycle * (2 - ps)
    if variant is ModelVariant.PAPER:
        return k * (1 - p + k) / p / p / ps + tail
    return k * (1 - p) / p / p / ps + tail


def renewal_moments(link, variant=DEFAULT_VARIANT):
    variant = ModelVariant(variant)
    e_m, e_m2 = attempt_moments(link.success_prob)
    return RenewalMoments(
        e_t=expected_charge_slots(link),
        e_t2=expected_charge_slots_sq(link),
        e_m=e_m,
        e_m2=e_m2,
        e_s=expected_cycle(link),
        e_s2=expected_cycle_sq(link, variant),
        variant=variant,
    )


def average_aoi(link, slot_s, variant=DEFAULT_VARIANT):
    """Time-average AoI in seconds, (slot/2) * (E(S^2)/E(S) + 1)."""
    e_s = expected_cycle(link)
    if is_infinite(e_s):
        return INF
    # E(S^2)/E(S) with E(S) cancelled analytically; E(S^2) alone can overflow
    p, k = link.los_prob, link.charge_slots
    spread = k * (1 - p) if ModelVariant(variant) is ModelVariant.CORRECTED else k * (1 - p + k)
    ratio = e_s * (2 - link.success_prob) + spread / p / (p + k)
    return slot_s / 2 * (ratio + 1)


def average_aoi_decimal(link, slot_s, variant=DEFAULT_VARIANT):
    """Same as ``average_aoi`` but in Decimal, for values beyond the float range.

    Returns INF only when the AoI really is unbounded (p = 0 or p_s = 0).
    """
    if link.los_prob <= 0 or link.success_prob <= 0:
        return INF
    with localcontext() as ctx:
        ctx.prec = 40
        p, ps = Decimal(link.los_prob), Decimal(link.success_prob)
        k = Decimal(link.charge_slots)
        e_s = (p + k) / (p * ps)
        spread = k * (1 - p) if ModelVariant(variant) is ModelVariant.CORRECTED else k * (1 - p + k)
        ratio = e_s * (2 - ps) + spread / (p * (p + k))
        return Decimal(slot_s) / 2 * (ratio + 1)


def config_average_aoi(config, device, x_p, variant=DEFAULT_VARIANT):
    from .model import link_budget

    return average_aoi(link_budget(config, device, x_p), config.energy.slot_s, variant)
