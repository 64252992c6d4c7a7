"""Band allocation by link SNR and network density, with hysteresis.

=================  ===============  ===================
SNR \\ density      high             low
=================  ===============  ===================
low                E                E
medium-high        V                V and E
=================  ===============  ===================

Density is measured as the V-band interference-to-noise ratio of the link.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .regulatory import BOTH, Band
from .transceiver import Architecture

DEFAULT_SNR_THRESHOLD_DB = 10.0
DEFAULT_DENSITY_INR_DB = 0.0
DEFAULT_HYSTERESIS_DB = 2.0


class SnrClass(str, enum.Enum):
    LOW = "Low"
    MEDIUM_HIGH = "MediumHigh"


class DensityClass(str, enum.Enum):
    LOW = "Low"
    HIGH = "High"


class Reason(str, enum.Enum):
    LOW_SNR_FALLBACK_TO_E = "LowSnrFallbackToE"
    HIGH_DENSITY_USE_V = "HighDensityUseV"
    LOW_DENSITY_USE_BOTH = "LowDensityUseBoth"


@dataclass(frozen=True)
class Thresholds:
    snr_low_high_db: float = DEFAULT_SNR_THRESHOLD_DB
    density_inr_db: float = DEFAULT_DENSITY_INR_DB
    hysteresis_db: float = DEFAULT_HYSTERESIS_DB
    demand_bps: float | None = None

    def __post_init__(self):
        if self.hysteresis_db < 0:
            raise ValueError("hysteresis must be nonnegative")
        if not (math.isfinite(self.snr_low_high_db) and math.isfinite(self.density_inr_db)):
            raise ValueError("thresholds must be finite")


@dataclass(frozen=True)
class LinkClass:
    snr_class: SnrClass
    density_class: DensityClass


@dataclass(frozen=True)
class AllocationDecision:
    bands: frozenset
    reason: Reason


@dataclass(frozen=True)
class HandoverEvent:
    source: frozenset
    target: frozenset
    reason: Reason


def _above(value: float, threshold: float, hysteresis: float, was_above: bool | None) -> bool:
    if was_above is True:
        threshold -= hysteresis
    elif was_above is False:
        threshold += hysteresis
    return value >= threshold


def classify_link(
    snr_db: Mapping[Band, float] | float,
    inr_db: float,
    thresholds: Thresholds = Thresholds(),
    previous: LinkClass | None = None,
) -> LinkClass:
    """Class from the best-band SNR and the V-band INR.

    With a previous class the boundary moves by ``hysteresis_db`` away from
    the current side, so small oscillations do not flip the class.
    """
    best = max(snr_db.values()) if isinstance(snr_db, Mapping) else float(snr_db)
    h = thresholds.hysteresis_db
    high_snr = _above(
        best, thresholds.snr_low_high_db, h,
        None if previous is None else previous.snr_class is SnrClass.MEDIUM_HIGH,
    )
    dense = _above(
        inr_db, thresholds.density_inr_db, h,
        None if previous is None else previous.density_class is DensityClass.HIGH,
    )
    return LinkClass(
        SnrClass.MEDIUM_HIGH if high_snr else SnrClass.LOW,
        DensityClass.HIGH if dense else DensityClass.LOW,
    )


def allocate_band(cls: LinkClass) -> AllocationDecision:
    if cls.snr_class is SnrClass.LOW:
        return AllocationDecision(frozenset({Band.E}), Reason.LOW_SNR_FALLBACK_TO_E)
    if cls.density_class is DensityClass.HIGH:
        return AllocationDecision(frozenset({Band.V}), Reason.HIGH_DENSITY_USE_V)
    return AllocationDecision(BOTH, Reason.LOW_DENSITY_USE_BOTH)


def best_single_band(predicted_bps: Mapping[Band, float] | None) -> Band:
    """Higher predicted rate wins; ties, or no prediction, go to E."""
    if not predicted_bps:
        return Band.E
    v = predicted_bps.get(Band.V, -math.inf)
    e = predicted_bps.get(Band.E, -math.inf)
    return Band.V if v > e else Band.E


def evaluate_triggers(
    current: Iterable[Band],
    cls: LinkClass,
    arch: Architecture,
    thresholds: Thresholds = Thresholds(),
    predicted_bps: Mapping[Band, float] | None = None,
    available: Iterable[Band] = BOTH,
) -> HandoverEvent | None:
    """Handover needed to move ``current`` onto the allocation for ``cls``.

    ``available`` restricts targets to the bands the serving node has radios
    for. Returns ``None`` when the link is already where it should be.
    """
    current = frozenset(current)
    available = frozenset(available)
    decision = allocate_band(cls)
    target = decision.bands & available or available
    if target == BOTH:
        pick = best_single_band(predicted_bps)
        if arch is Architecture.SINGLE_CHAIN:
            target = frozenset({pick})
        elif thresholds.demand_bps is not None and predicted_bps:
            if predicted_bps.get(pick, 0.0) >= thresholds.demand_bps:
                target = frozenset({pick})
    if target == current:
        return None
    return HandoverEvent(current, target, decision.reason)


def track_link(
    snr_trace: Sequence[Mapping[Band, float] | float],
    inr_trace: Sequence[float] | float,
    arch: Architecture,
    initial_bands: Iterable[Band],
    thresholds: Thresholds = Thresholds(),
) -> list[tuple[int, HandoverEvent]]:
    """Run the policy along a measurement trace; return ``(step, event)`` pairs."""
    if not isinstance(inr_trace, Sequence):
        inr_trace = [inr_trace] * len(snr_trace)
    current = frozenset(initial_bands)
    previous: LinkClass | None = None
    events = []
    for step, (snr, inr) in enumerate(zip(snr_trace, inr_trace)):
        previous = classify_link(snr, inr, thresholds, previous)
        event = evaluate_triggers(current, previous, arch, thresholds)
        if event is not None:
            events.append((step, event))
            current = event.target
    return events
