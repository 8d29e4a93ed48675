"""Seeded Monte-Carlo simulation of the harvest-then-transmit cycle.

Two modes share one result type:

* ``EXACT`` draws the LoS indicator of every slot, charges the capacitor
  on LoS slots until it is full, spends the next slot on a transmission
  attempt, and accumulates the AoI slot by slot.
* ``FAST`` samples whole renewals: M ~ Geometric(p_s) attempts, each
  preceded by T ~ NegBin(K, p) charging slots.

Randomness comes from numpy's Philox counter-based generator. Replication
``i`` of master seed ``s`` uses ``SeedSequence(s, spawn_key=(i,))``, so
streams are independent of execution order and thread count.

Every estimate is taken over complete renewals: the trace stops at the
slot of the last successful delivery.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import BudgetExceededError, InfeasibleLinkError, ScenarioMismatchError
from .model import link_budget, slots_to_fill

Z95 = 1.9599639845400536

# sum-of-geometric draws below this, numpy's gamma-Poisson mixture above
NEGBIN_DIRECT_MAX_K = 64


class SimMode(str, enum.Enum):
    EXACT = "exact"
    FAST = "fast"


@dataclass(frozen=True)
class SimSpec:
    mode: SimMode = SimMode.FAST
    target_cycles: int = 10_000
    max_slots: int | None = None
    seed: int = 0
    replications: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mode", SimMode(self.mode))
        if self.target_cycles < 1:
            raise ValueError(f"target_cycles must be >= 1 (got {self.target_cycles})")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1 (got {self.replications})")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer (got {self.seed})")
        if self.max_slots is not None and self.max_slots < 1:
            raise ValueError(f"max_slots must be >= 1 (got {self.max_slots})")


@dataclass(frozen=True)
class SimResult:
    avg_aoi_s: float
    e_s_hat: float
    e_s2_hat: float
    e_t_hat: float
    p_s_hat: float
    cycles: int
    ci_halfwidth_s: float
    seed: int
    attempts: int
    total_slots: int
    area_slots: int
    aoi_se_s: float
    e_s_se: float
    e_s2_se: float
    e_t_se: float
    p_s_se: float
    replications: int = 1
    scenario: str = ""

    def ci(self, name):
        """95% half-width of one of ``e_s``, ``e_s2``, ``e_t``, ``p_s``, ``aoi``."""
        if name == "aoi":
            return self.ci_halfwidth_s
        return Z95 * getattr(self, f"{name}_se")

    def to_dict(self):
        return {
            "avg_aoi_s": self.avg_aoi_s,
            "ci_halfwidth_s": self.ci_halfwidth_s,
            "e_s_hat": self.e_s_hat,
            "e_s_ci": self.ci("e_s"),
            "e_s2_hat": self.e_s2_hat,
            "e_s2_ci": self.ci("e_s2"),
            "e_t_hat": self.e_t_hat,
            "e_t_ci": self.ci("e_t"),
            "p_s_hat": self.p_s_hat,
            "p_s_ci": self.ci("p_s"),
            "cycles": self.cycles,
            "attempts": self.attempts,
            "total_slots": self.total_slots,
            "replications": self.replications,
            "seed": self.seed,
        }


def replication_stream(seed, index):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def negative_binomial_sample(stream, k, p):
    """Number of Bernoulli(p) trials needed to collect ``k`` successes."""
    return int(_negative_binomial(stream, k, p, 1)[0])


def _negative_binomial(stream, k, p, size):
    if k < 1 or not 0 < p <= 1:
        raise ValueError(f"need k >= 1 and 0 < p <= 1 (got k={k}, p={p})")
    if p == 1:
        return np.full(size, k, dtype=np.int64)
    if k <= NEGBIN_DIRECT_MAX_K:
        out = np.zeros(size, dtype=np.int64)
        for _ in range(k):
            out += stream.geometric(p, size=size)
        return out
    return stream.negative_binomial(k, p, size=size).astype(np.int64) + k


def _std_error(x):
    n = len(x)
    if n < 2:
        return 0.0
    return float(np.std(x, ddof=1)) / math.sqrt(n)


def _summarize(cycles, charge_slots, area_slots, slot_s, seed, scenario):
    s = np.asarray(cycles, dtype=np.int64)
    t = np.asarray(charge_slots, dtype=np.int64)
    n = len(s)
    total = int(s.sum())
    sf = s.astype(np.float64)
    ratio = area_slots / total
    reward = sf * (sf + 1) / 2
    aoi_se = slot_s * _std_error(reward - ratio * sf) / float(sf.mean())
    p_s = n / len(t)
    return SimResult(
        avg_aoi_s=slot_s * ratio,
        e_s_hat=float(sf.mean()),
        e_s2_hat=float(np.mean(sf * sf)),
        e_t_hat=float(t.mean()),
        p_s_hat=p_s,
        cycles=n,
        ci_halfwidth_s=Z95 * aoi_se,
        seed=seed,
        attempts=len(t),
        total_slots=total,
        area_slots=area_slots,
        aoi_se_s=aoi_se,
        e_s_se=_std_error(sf),
        e_s2_se=_std_error(sf * sf),
        e_t_se=_std_error(t.astype(np.float64)),
        p_s_se=math.sqrt(p_s * (1 - p_s) / len(t)),
        scenario=scenario,
    )


def _feasible_link(config, device, x_p):
    link = link_budget(config, device, x_p)
    if link.success_prob <= 0 or link.los_prob <= 0:
        raise InfeasibleLinkError(
            f"success probability is zero at x_p={x_p!r} (distance {link.distance_m:.6g} m, "
            f"coverage radius {link.coverage_radius_m:.6g} m)"
        )
    scenario = (f"x_p={x_p!r};device=({device.x_m!r},{device.y_m!r});K={link.charge_slots};"
                f"p={link.los_prob!r};p_s={link.success_prob!r};slot={config.energy.slot_s!r}")
    return link, scenario


def _segment_area(length, offset, successes, last_success):
    """Sum of per-slot ages over global slots offset .. offset+length-1.

    A delivery slot has age 1; every other slot is one older than its
    predecessor. ``last_success`` is the global index of the latest
    delivery before the segment.
    """
    if length == 0:
        return 0
    idx = np.arange(offset, offset + length, dtype=np.int64)
    mark = np.full(length, last_success, dtype=np.int64)
    if successes:
        pos = np.asarray(successes, dtype=np.int64)
        mark[pos] = pos + offset
    latest = np.maximum.accumulate(mark)
    return int(np.sum(idx - latest + 1))


def _run_exact(stream, link, energy, target, max_slots):
    p = link.los_prob
    # LoS slots until the clamped accumulator reaches the capacitor size
    fill = slots_to_fill(energy.capacitor_j, link.slot_energy_j)
    chunk = max(1 << 16, min(1 << 24, 4 * int((fill + 1) / p)))

    buf = np.empty(0, dtype=bool)
    offset = 0
    last_success = -1
    cycles, charge, area = [], [], 0
    while len(cycles) < target:
        buf = np.concatenate([buf, stream.random(chunk) < p])
        ones = np.flatnonzero(buf)
        n = len(buf)
        start = 0
        i = 0
        hits = []
        seg_last = last_success
        while len(cycles) < target:
            if i + fill - 1 >= len(ones):
                break
            full_at = int(ones[i + fill - 1])
            tx = full_at + 1
            if tx >= n:
                break
            charge.append(full_at - start + 1)
            if buf[tx]:
                cycles.append(offset + tx - last_success)
                last_success = offset + tx
                hits.append(tx)
                i += fill + 1
            else:
                i += fill
            start = tx + 1
        area += _segment_area(start, offset, hits, seg_last)
        buf = buf[start:]
        offset += start
        if max_slots is not None and len(cycles) < target and offset + len(buf) >= max_slots:
            raise BudgetExceededError(
                f"reached {max_slots} slots with {len(cycles)} of {target} renewals"
            )
    if max_slots is not None and offset > max_slots:
        raise BudgetExceededError(f"renewals span {offset} slots, above the cap of {max_slots}")
    return cycles, charge, area


def _run_fast(stream, link, target):
    p, p_s, k = link.los_prob, link.success_prob, link.charge_slots
    block = 1 << 15
    cycles, charge = [], []
    area = 0
    done = 0
    while done < target:
        m = min(block, target - done)
        attempts = stream.geometric(p_s, size=m).astype(np.int64)
        t = _negative_binomial(stream, k, p, int(attempts.sum()))
        starts = np.concatenate([[0], np.cumsum(attempts)[:-1]])
        s = np.add.reduceat(t + 1, starts)
        cycles.append(s)
        charge.append(t)
        area += _triangular_sum(s)
        done += m
    return np.concatenate(cycles), np.concatenate(charge), area


def _triangular_sum(s):
    """Exact integer sum of s*(s+1)/2."""
    approx = float(np.sum(s.astype(np.float64) * (s + 1) / 2))
    if approx < 2**62:
        return int(np.sum(s * (s + 1) // 2))
    return sum(int(v) * (int(v) + 1) // 2 for v in s)


def _one_replication(config, device, x_p, spec, index):
    link, scenario = _feasible_link(config, device, x_p)
    stream = replication_stream(spec.seed, index)
    if spec.mode is SimMode.EXACT:
        cycles, charge, area = _run_exact(stream, link, config.energy, spec.target_cycles,
                                          spec.max_slots)
    else:
        cycles, charge, area = _run_fast(stream, link, spec.target_cycles)
        if spec.max_slots is not None and int(np.sum(cycles)) > spec.max_slots:
            raise BudgetExceededError(
                f"renewals span {int(np.sum(cycles))} slots, above the cap of {spec.max_slots}"
            )
    return _summarize(cycles, charge, area, config.energy.slot_s, spec.seed, scenario)


def simulate(config, device, x_p, spec, jobs=1):
    """Run ``spec.replications`` independent replications and pool them."""
    _feasible_link(config, device, x_p)
    indices = range(spec.replications)
    if jobs > 1 and spec.replications > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda i: _one_replication(config, device, x_p, spec, i),
                                    indices))
    else:
        results = [_one_replication(config, device, x_p, spec, i) for i in indices]
    return merge_replications(results)


def simulate_exact(config, device, x_p, spec, jobs=1):
    return simulate(config, device, x_p, replace(spec, mode=SimMode.EXACT), jobs)


def simulate_fast(config, device, x_p, spec, jobs=1):
    return simulate(config, device, x_p, replace(spec, mode=SimMode.FAST), jobs)


def merge_replications(results):
    """Pool replications, weighting every estimator by its cycle count."""
    results = list(results)
    if not results:
        raise ValueError("nothing to merge")
    if len(results) == 1:
        return results[0]
    first = results[0]
    for r in results[1:]:
        if r.scenario != first.scenario or r.seed != first.seed:
            raise ScenarioMismatchError(f"cannot pool {r.scenario!r} with {first.scenario!r}")
    n = sum(r.cycles for r in results)
    w = [r.cycles / n for r in results]

    def pooled(attr):
        return sum(wi * getattr(r, attr) for wi, r in zip(w, results))

    def pooled_se(attr):
        return math.sqrt(sum((wi * getattr(r, attr)) ** 2 for wi, r in zip(w, results)))

    aoi_se = pooled_se("aoi_se_s")
    return SimResult(
        avg_aoi_s=pooled("avg_aoi_s"),
        e_s_hat=pooled("e_s_hat"),
        e_s2_hat=pooled("e_s2_hat"),
        e_t_hat=pooled("e_t_hat"),
        p_s_hat=pooled("p_s_hat"),
        cycles=n,
        ci_halfwidth_s=Z95 * aoi_se,
        seed=first.seed,
        attempts=sum(r.attempts for r in results),
        total_slots=sum(r.total_slots for r in results),
        area_slots=sum(r.area_slots for r in results),
        aoi_se_s=aoi_se,
        e_s_se=pooled_se("e_s_se"),
        e_s2_se=pooled_se("e_s2_se"),
        e_t_se=pooled_se("e_t_se"),
        p_s_se=pooled_se("p_s_se"),
        replications=sum(r.replications for r in results),
        scenario=first.scenario,
    )
