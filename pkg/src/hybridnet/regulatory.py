"""FCC rules for the V- and E-bands and a validator for radio configurations."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .units import dbm_to_watts


class Band(str, enum.Enum):
    V = "V"
    E = "E"

    def __repr__(self):
        return f"Band.{self.value}"


BOTH = frozenset({Band.V, Band.E})


@dataclass(frozen=True)
class RegulatoryRule:
    band: Band
    freq_ranges_ghz: tuple[tuple[float, float], ...]
    licensed: bool
    max_tx_power_dbm: float
    min_antenna_gain_dbi: float | None = None
    # widest channel the band may carry in one contiguous block
    max_bandwidth_hz: float | None = None

    def contains(self, freq_hz: float) -> bool:
        f = freq_hz / 1e9
        return any(lo <= f <= hi for lo, hi in self.freq_ranges_ghz)


V_RULE = RegulatoryRule(
    band=Band.V,
    freq_ranges_ghz=((57.0, 64.0),),
    licensed=False,
    max_tx_power_dbm=27.0,
    min_antenna_gain_dbi=None,
    max_bandwidth_hz=7e9,
)
E_RULE = RegulatoryRule(
    band=Band.E,
    freq_ranges_ghz=((71.0, 76.0), (81.0, 86.0), (92.0, 95.0)),
    licensed=True,
    max_tx_power_dbm=35.0,
    min_antenna_gain_dbi=43.0,
    max_bandwidth_hz=5e9,
)
FCC_RULES: Mapping[Band, RegulatoryRule] = {Band.V: V_RULE, Band.E: E_RULE}


@dataclass(frozen=True)
class RadioConfig:
    band: Band
    carrier_hz: float
    bandwidth_hz: float
    tx_power_dbm: float
    antenna_gain_dbi: float


@dataclass(frozen=True)
class Violation:
    rule: str
    value: float
    limit: float | str
    message: str


@dataclass
class ValidationReport:
    config: RadioConfig
    violations: list[Violation] = field(default_factory=list)
    waivers: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        tag = f"{self.config.band.value}-band"
        out = [f"violation {tag}: {v.message}" for v in self.violations]
        out += [f"waived {tag}: {w}" for w in self.waivers]
        if not out:
            out.append(f"ok {tag}: {self.config.carrier_hz / 1e9:g} GHz, "
                       f"{self.config.tx_power_dbm:g} dBm, {self.config.antenna_gain_dbi:g} dBi")
        return out


def band_for_frequency(freq_hz: float, rules: Mapping[Band, RegulatoryRule] = FCC_RULES) -> Band | None:
    """Band whose regulated ranges contain ``freq_hz``; ``None`` in a gap."""
    for band, rule in rules.items():
        if rule.contains(freq_hz):
            return band
    return None


def _fitting_range(rule: RegulatoryRule, lo_hz: float, hi_hz: float):
    for lo, hi in rule.freq_ranges_ghz:
        if lo * 1e9 <= lo_hz and hi_hz <= hi * 1e9:
            return lo, hi
    return None


def validate_radio_config(
    config: RadioConfig,
    rules: Mapping[Band, RegulatoryRule] = FCC_RULES,
    enforce_min_gain: bool = True,
) -> ValidationReport:
    """Check one radio against the rule table.

    Violations are returned in the report, never raised. A skipped minimum
    gain check is recorded as a waiver so the relaxation stays visible.
    """
    for band in Band:
        if band not in rules:
            raise KeyError(f"rule table has no entry for {band.value}-band")
    report = ValidationReport(config)
    rule = rules[config.band]
    bad = report.violations

    if not (rule.contains(config.carrier_hz)):
        bad.append(Violation(
            "frequency range", config.carrier_hz, _ranges_text(rule),
            f"carrier {config.carrier_hz / 1e9:g} GHz outside {config.band.value}-band "
            f"ranges {_ranges_text(rule)}",
        ))
    elif config.bandwidth_hz <= 0:
        bad.append(Violation("bandwidth", config.bandwidth_hz, "> 0",
                             f"bandwidth {config.bandwidth_hz:g} Hz must be positive"))
    else:
        half = config.bandwidth_hz / 2.0
        if _fitting_range(rule, config.carrier_hz - half, config.carrier_hz + half) is None:
            bad.append(Violation(
                "frequency range", config.bandwidth_hz, _ranges_text(rule),
                f"channel {(config.carrier_hz - half) / 1e9:g}-{(config.carrier_hz + half) / 1e9:g} GHz "
                f"does not fit one contiguous range of {_ranges_text(rule)}",
            ))
    if rule.max_bandwidth_hz is not None and config.bandwidth_hz > rule.max_bandwidth_hz:
        bad.append(Violation(
            "bandwidth", config.bandwidth_hz, rule.max_bandwidth_hz,
            f"bandwidth {config.bandwidth_hz / 1e9:g} GHz exceeds {rule.max_bandwidth_hz / 1e9:g} GHz",
        ))

    if config.tx_power_dbm > rule.max_tx_power_dbm:
        bad.append(Violation(
            "max transmit power", config.tx_power_dbm, rule.max_tx_power_dbm,
            f"max transmit power exceeded: {config.tx_power_dbm:g} dBm > {rule.max_tx_power_dbm:g} dBm",
        ))

    if rule.min_antenna_gain_dbi is not None and config.antenna_gain_dbi < rule.min_antenna_gain_dbi:
        if enforce_min_gain:
            bad.append(Violation(
                "minimum antenna gain", config.antenna_gain_dbi, rule.min_antenna_gain_dbi,
                f"minimum antenna gain not met: {config.antenna_gain_dbi:g} dBi < "
                f"{rule.min_antenna_gain_dbi:g} dBi",
            ))
        else:
            report.waivers.append(
                f"minimum antenna gain {rule.min_antenna_gain_dbi:g} dBi not enforced "
                f"(configured {config.antenna_gain_dbi:g} dBi)"
            )
    return report


def _ranges_text(rule: RegulatoryRule) -> str:
    return ", ".join(f"{lo:g}-{hi:g} GHz" for lo, hi in rule.freq_ranges_ghz)


def eirp_dbm(config: RadioConfig) -> float:
    return config.tx_power_dbm + config.antenna_gain_dbi


def max_power_watts(rule: RegulatoryRule) -> float:
    return dbm_to_watts(rule.max_tx_power_dbm)

