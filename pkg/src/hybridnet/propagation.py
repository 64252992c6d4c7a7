"""Radio physics for V-band (60 GHz) and E-band (70/80 GHz) links.

Everything here is a pure function of its arguments. Powers are in dBm,
gains and losses in dB, distances in meters, frequencies in hertz.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0
THERMAL_NOISE_DBM_HZ = -174.0

# Union of the regulated V- and E-band ranges.
MIN_FREQ_HZ = 57e9
MAX_FREQ_HZ = 95e9

DEFAULT_NOISE_FIGURE_DB = 7.0
DEFAULT_SHADOW_LOSS_DB = 10.0
DEFAULT_SHADOW_PROBABILITY = 0.2

# (GHz, dB/km), coarse read of the sea-level absorption curve. The 60 GHz
# oxygen peak and the V-to-E gap are the only features that matter.
DEFAULT_ANCHORS: tuple[tuple[float, float], ...] = (
    (57.0, 8.0),
    (60.0, 15.0),
    (64.0, 8.0),
    (66.0, 1.5),
    (71.0, 0.45),
    (76.0, 0.4),
    (81.0, 0.4),
    (86.0, 0.45),
    (92.0, 0.5),
    (95.0, 0.6),
)


def check_frequency(freq_hz: float) -> float:
    if not (MIN_FREQ_HZ <= freq_hz <= MAX_FREQ_HZ):
        raise DomainError(f"frequency {freq_hz / 1e9:g} GHz outside 57-95 GHz")
    return float(freq_hz)


@dataclass(frozen=True)
class AttenuationTable:
    """Piecewise-linear specific attenuation (dB/km) versus frequency (GHz)."""

    anchors: tuple[tuple[float, float], ...] = DEFAULT_ANCHORS

    def __post_init__(self):
        anchors = tuple((float(f), float(a)) for f, a in self.anchors)
        if len(anchors) < 2:
            raise DomainError("attenuation table needs at least two anchors")
        for (f0, _), (f1, _) in zip(anchors, anchors[1:]):
            if not f1 > f0:
                raise DomainError("attenuation anchors must be strictly increasing in frequency")
        if any(a < 0 or not math.isfinite(a) for _, a in anchors):
            raise DomainError("attenuation values must be finite and nonnegative")
        object.__setattr__(self, "anchors", anchors)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "AttenuationTable":
        return cls(tuple((f, a) for f, a in pairs))

    @property
    def freqs_ghz(self) -> list[float]:
        return [f for f, _ in self.anchors]

    def at_ghz(self, freq_ghz: float) -> float:
        freqs = self.freqs_ghz
        if not (freqs[0] <= freq_ghz <= freqs[-1]):
            raise DomainError(
                f"{freq_ghz:g} GHz outside attenuation table range "
                f"[{freqs[0]:g}, {freqs[-1]:g}] GHz"
            )
        i = bisect.bisect_left(freqs, freq_ghz)
        f1, a1 = self.anchors[i]
        if f1 == freq_ghz:
            return a1
        f0, a0 = self.anchors[i - 1]
        return a0 + (a1 - a0) * (freq_ghz - f0) / (f1 - f0)


DEFAULT_TABLE = AttenuationTable()


@dataclass(frozen=True)
class LinkGeometry:
    distance_m: float
    shadowed: bool = False
    shadow_loss_db: float = DEFAULT_SHADOW_LOSS_DB

    def __post_init__(self):
        if not self.distance_m > 0:
            raise DomainError(f"distance must be positive, got {self.distance_m}")
        if self.shadow_loss_db < 0:
            raise DomainError("shadow loss must be nonnegative")

    @property
    def shadow_db(self) -> float:
        return self.shadow_loss_db if self.shadowed else 0.0


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float
    tx_gain_dbi: float
    rx_gain_dbi: float
    freq_hz: float
    geometry: LinkGeometry


def free_space_path_loss(freq_hz: float, distance_m: float) -> float:
    """Friis spreading loss in dB."""
    check_frequency(freq_hz)
    if not distance_m > 0:
        raise DomainError(f"distance must be positive, got {distance_m}")
    return 20.0 * math.log10(4.0 * math.pi * distance_m * freq_hz / SPEED_OF_LIGHT)


def atmospheric_attenuation(table: AttenuationTable, freq_hz: float) -> float:
    """Specific attenuation in dB/km at ``freq_hz``."""
    check_frequency(freq_hz)
    return table.at_ghz(freq_hz / 1e9)


def received_power(budget: LinkBudget, table: AttenuationTable = DEFAULT_TABLE) -> float:
    geo = budget.geometry
    fspl = free_space_path_loss(budget.freq_hz, geo.distance_m)
    absorption = atmospheric_attenuation(table, budget.freq_hz) * geo.distance_m / 1000.0
    return (
        budget.tx_power_dbm
        + budget.tx_gain_dbi
        + budget.rx_gain_dbi
        - fspl
        - absorption
        - geo.shadow_db
    )


def noise_power(bandwidth_hz: float, noise_figure_db: float = DEFAULT_NOISE_FIGURE_DB) -> float:
    """Thermal noise floor in dBm."""
    if not bandwidth_hz > 0:
        raise DomainError(f"bandwidth must be positive, got {bandwidth_hz}")
    if noise_figure_db < 0:
        raise DomainError("noise figure must be nonnegative")
    return THERMAL_NOISE_DBM_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def shannon_throughput(sinr_db: float, bandwidth_hz: float) -> float:
    """Shannon rate in bit/s. ``-inf`` dB gives zero."""
    if not bandwidth_hz > 0:
        raise DomainError(f"bandwidth must be positive, got {bandwidth_hz}")
    if sinr_db == -math.inf:
        return 0.0
    return bandwidth_hz * math.log2(1.0 + 10.0 ** (sinr_db / 10.0))
