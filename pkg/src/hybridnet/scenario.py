"""Scenario description and the ``key = value`` scenario file format.

A scenario file is line oriented::

    # comments run to end of line
    trials = 500
    radio.v.tx_power_dbm = 27
    bs.femto.x = 200
    attenuation.table = 57:8, 60:15, 64:8, 66:1.5, 71:0.45, 76:0.4, 81:0.4, 86:0.45, 92:0.5, 95:0.6

Every key is optional; omitted keys keep the defaults below. Unknown keys
are errors. Numeric values may carry the key's unit as a suffix
(``27 dBm``). See ``KEYS`` for the full list.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np

from .errors import DomainError, ScenarioError, ValidationFailed
from .network import AntennaConfig, Node, Role
from .policy import Thresholds
from .propagation import (
    DEFAULT_NOISE_FIGURE_DB,
    DEFAULT_SHADOW_LOSS_DB,
    DEFAULT_SHADOW_PROBABILITY,
    DEFAULT_TABLE,
    AttenuationTable,
    check_frequency,
)
from .regulatory import (
    BOTH,
    FCC_RULES,
    Band,
    RadioConfig,
    RegulatoryRule,
    ValidationReport,
    validate_radio_config,
)
from .transceiver import Architecture, HandoverCostModel

DEFAULT_TRIALS = 500
DEFAULT_SEED = 1
DEFAULT_DISTANCES_M = tuple(float(x) for x in np.geomspace(10.0, 500.0, 15))
DEFAULT_INTERFERER_COUNTS = (0.0, 2.0, 4.0, 8.0, 12.0, 16.0, 24.0, 32.0)
DEFAULT_DENSITY_DISTANCE_M = 25.0


@dataclass(frozen=True)
class BandRadio:
    carrier_hz: float
    bandwidth_hz: float
    tx_power_dbm: float


DEFAULT_RADIOS = {
    Band.V: BandRadio(60e9, 5e9, 27.0),
    Band.E: BandRadio(73.5e9, 5e9, 35.0),
}


@dataclass(frozen=True)
class BaseStation:
    name: str
    role: Role
    x: float
    y: float
    users: int = 0
    architecture: Architecture = Architecture.DUAL_CHAIN
    bands: frozenset = BOTH
    # band set a user is on when first attached, before the policy runs
    initial_bands: frozenset = frozenset({Band.E})


DEFAULT_STATIONS = (
    BaseStation("macro", Role.MACRO, 0.0, 0.0, users=5, initial_bands=frozenset({Band.E})),
    BaseStation("femto", Role.FEMTO, 200.0, 0.0, users=5, initial_bands=frozenset({Band.V})),
)


@dataclass(frozen=True)
class Shadowing:
    loss_db: float = DEFAULT_SHADOW_LOSS_DB
    probability: float = DEFAULT_SHADOW_PROBABILITY


@dataclass(frozen=True)
class Neighbors:
    """Extra co-channel links dropped uniformly in a disk around the first station."""

    count: int = 0
    radius_m: float = 50.0


@dataclass(frozen=True)
class Scenario:
    base_stations: tuple[BaseStation, ...] = DEFAULT_STATIONS
    band_radios: Mapping[Band, BandRadio] = field(default_factory=lambda: dict(DEFAULT_RADIOS))
    noise_figure_db: float = DEFAULT_NOISE_FIGURE_DB
    gains: AntennaConfig = AntennaConfig()
    shadowing: Shadowing = Shadowing()
    attenuation: AttenuationTable = DEFAULT_TABLE
    thresholds: Thresholds = Thresholds()
    handover: HandoverCostModel = HandoverCostModel()
    rules: Mapping[Band, RegulatoryRule] = field(default_factory=lambda: dict(FCC_RULES))
    enforce_min_gain: bool = False
    interference: bool = True
    neighbors: Neighbors = Neighbors()
    association: str = "strongest_e"
    trials: int = DEFAULT_TRIALS
    master_seed: int = DEFAULT_SEED
    distances_m: tuple[float, ...] = DEFAULT_DISTANCES_M
    interferer_counts: tuple[float, ...] = DEFAULT_INTERFERER_COUNTS
    density_distance_m: float = DEFAULT_DENSITY_DISTANCE_M

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if not self.base_stations:
            raise DomainError("scenario needs at least one base station")
        names = [bs.name for bs in self.base_stations]
        if len(set(names)) != len(names):
            raise DomainError("base station names must be unique")
        if sum(bs.users for bs in self.base_stations) < 1:
            raise DomainError("scenario needs at least one user")
        for bs in self.base_stations:
            if not bs.bands or not bs.bands <= BOTH:
                raise DomainError(f"{bs.name}: bands must be a nonempty subset of V,E")
            if not bs.initial_bands <= bs.bands or not bs.architecture.allows(bs.initial_bands):
                raise DomainError(f"{bs.name}: initial bands incompatible with its radios or architecture")
        for band in Band:
            if band not in self.band_radios:
                raise DomainError(f"no radio configured for {band.value}-band")
            check_frequency(self.band_radios[band].carrier_hz)
        if not 0.0 <= self.shadowing.probability <= 1.0:
            raise DomainError("shadowing probability must be in [0, 1]")
        if self.shadowing.loss_db < 0:
            raise DomainError("shadow loss must be nonnegative")
        if self.association not in ("strongest_e", "home"):
            raise DomainError("association must be 'strongest_e' or 'home'")
        if self.neighbors.count < 0 or not self.neighbors.radius_m > 0:
            raise DomainError("neighbors.count >= 0 and neighbors.radius_m > 0 required")
        for name, values in (("distances", self.distances_m), ("interferer counts", self.interferer_counts)):
            if not values or any(b <= a for a, b in zip(values, values[1:])):
                raise DomainError(f"sweep {name} must be nonempty and strictly increasing")
        if any(v <= 0 for v in self.distances_m) or not self.density_distance_m > 0:
            raise DomainError("sweep distances must be positive")
        if any(v < 0 or v != int(v) for v in self.interferer_counts):
            raise DomainError("interferer counts must be nonnegative integers")

    @property
    def radios(self) -> dict[Band, RadioConfig]:
        """Per-band radio as seen by the regulator: BS transmit power and BS antenna gain."""
        return {
            band: RadioConfig(band, r.carrier_hz, r.bandwidth_hz, r.tx_power_dbm, self.gains.tx_main_dbi)
            for band, r in self.band_radios.items()
        }

    @property
    def user_count(self) -> int:
        return sum(bs.users for bs in self.base_stations)

    def station_nodes(self) -> list[Node]:
        radios = self.radios
        return [
            Node(
                bs.name, bs.role, (bs.x, bs.y),
                radio_v=radios[Band.V] if Band.V in bs.bands else None,
                radio_e=radios[Band.E] if Band.E in bs.bands else None,
                architecture=bs.architecture,
            )
            for bs in self.base_stations
        ]

    def station(self, name: str) -> BaseStation:
        for bs in self.base_stations:
            if bs.name == name:
                return bs
        raise KeyError(name)

    def validation_reports(self) -> list[ValidationReport]:
        radios = self.radios
        return [validate_radio_config(radios[b], self.rules, self.enforce_min_gain) for b in Band]

    def validate(self) -> list[ValidationReport]:
        reports = self.validation_reports()
        if not all(r.ok for r in reports):
            raise ValidationFailed(reports)
        return reports


# --------------------------------------------------------------------------- value parsers


_UNIT_RE = re.compile(r"^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*([A-Za-z/%]+)?\s*$")


def _number(unit: str | None = None, scale: float = 1.0) -> Callable[[str], float]:
    def parse(text: str) -> float:
        m = _UNIT_RE.match(text)
        if not m:
            raise ValueError(f"expected a number, got {text!r}")
        value, suffix = m.groups()
        if suffix is not None and (unit is None or suffix.lower() != unit.lower()):
            raise ValueError(f"unexpected unit {suffix!r}" + (f" (expected {unit})" if unit else ""))
        x = float(value)
        if not math.isfinite(x):
            raise ValueError("value must be finite")
        return x * scale
    return parse


def _optional_number(unit: str | None = None) -> Callable[[str], float | None]:
    inner = _number(unit)

    def parse(text: str):
        if text.strip().lower() in ("none", "n/a", "na", ""):
            return None
        return inner(text)
    return parse


def _integer(text: str) -> int:
    x = _number()(text)
    if x != int(x):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(x)


def _boolean(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _bands(text: str) -> frozenset:
    items = [t.strip().upper() for t in text.replace("+", ",").split(",") if t.strip()]
    try:
        return frozenset(Band(t) for t in items)
    except ValueError:
        raise ValueError(f"expected bands from V,E, got {text!r}") from None


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        t = text.strip().lower()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return t
    return parse


def _number_list(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _pairs(text: str) -> tuple[tuple[float, float], ...]:
    out = []
    for item in text.split(","):
        if not item.strip():
            continue
        f, _, a = item.partition(":")
        if not _:
            raise ValueError(f"expected 'GHz:dB/km' pairs, got {item.strip()!r}")
        out.append((float(f), float(a)))
    return tuple(out)


def _ranges(text: str) -> tuple[tuple[float, float], ...]:
    out = []
    for item in text.split(","):
        lo, sep, hi = item.strip().partition("-")
        if not sep:
            raise ValueError(f"expected 'low-high' GHz ranges, got {item.strip()!r}")
        out.append((float(lo), float(hi)))
    return tuple(out)


def _names(text: str) -> tuple[str, ...]:
    names = tuple(t.strip() for t in text.split(",") if t.strip())
    if not names:
        raise ValueError("expected at least one name")
    return names


_ROLE = _choice("macro", "pico", "femto")
_ARCH = _choice("single", "dual")

KEYS: dict[str, Callable[[str], object]] = {
    "trials": _integer,
    "master_seed": _integer,
    "network.base_stations": _names,
    "network.association": _choice("strongest_e", "home"),
    "radio.noise_figure_db": _number("dB"),
    "antenna.combined_gain_dbi": _number("dBi"),
    "antenna.tx_share": _number(),
    "antenna.sidelobe_dbi": _number("dBi"),
    "antenna.beamwidth_deg": _number("deg"),
    "shadowing.loss_db": _number("dB"),
    "shadowing.probability": _number(),
    "attenuation.table": _pairs,
    "policy.snr_threshold_db": _number("dB"),
    "policy.density_inr_db": _number("dB"),
    "policy.hysteresis_db": _number("dB"),
    "policy.demand_bps": _optional_number("bps"),
    "handover.sync_delay_s": _number("s"),
    "handover.feedback_factor": _number(),
    "interference.enabled": _boolean,
    "neighbors.count": _integer,
    "neighbors.radius_m": _number("m"),
    "regulatory.enforce_min_gain": _boolean,
    "sweep.distances_m": _number_list,
    "sweep.interferer_counts": _number_list,
    "sweep.density_distance_m": _number("m"),
}
for _b in ("v", "e"):
    KEYS.update({
        f"radio.{_b}.carrier_ghz": _number("GHz"),
        f"radio.{_b}.bandwidth_ghz": _number("GHz"),
        f"radio.{_b}.tx_power_dbm": _number("dBm"),
        f"regulatory.{_b}.ranges_ghz": _ranges,
        f"regulatory.{_b}.licensed": _boolean,
        f"regulatory.{_b}.max_tx_power_dbm": _number("dBm"),
        f"regulatory.{_b}.min_antenna_gain_dbi": _optional_number("dBi"),
        f"regulatory.{_b}.max_bandwidth_ghz": _optional_number("GHz"),
    })

BS_FIELDS: dict[str, Callable[[str], object]] = {
    "role": _ROLE,
    "x": _number("m"),
    "y": _number("m"),
    "users": _integer,
    "architecture": _ARCH,
    "bands": _bands,
    "initial_bands": _bands,
}

_BS_KEY = re.compile(r"^bs\.([A-Za-z_][A-Za-z0-9_]*)\.([a-z_]+)$")


# --------------------------------------------------------------------------- parsing


def _read_pairs(text: str) -> dict[str, tuple[int, object]]:
    values: dict[str, tuple[int, object]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ScenarioError("expected 'key = value'", line=lineno)
        if key in values:
            raise ScenarioError(f"duplicate key (first set on line {values[key][0]})", line=lineno, key=key)
        m = _BS_KEY.match(key)
        if m:
            parser = BS_FIELDS.get(m.group(2))
        else:
            parser = KEYS.get(key)
        if parser is None:
            raise ScenarioError("unknown key", line=lineno, key=key)
        try:
            values[key] = (lineno, parser(value.strip()))
        except ValueError as exc:
            raise ScenarioError(str(exc), line=lineno, key=key) from None
    return values


def parse_scenario(text: str, validate: bool = True) -> Scenario:
    """Build a ``Scenario`` from scenario-file text.

    Raises ``ScenarioError`` for syntax, unknown keys and bad values, and
    ``ValidationFailed`` when ``validate`` is set and a radio breaks the
    regulatory rules.
    """
    values = _read_pairs(text)
    used: set[str] = set()

    def get(key, default):
        if key in values:
            used.add(key)
            return values[key][1]
        return default

    def where(key):
        return values[key][0] if key in values else None

    base = Scenario()

    # base stations
    defaults = {bs.name: bs for bs in DEFAULT_STATIONS}
    names = get("network.base_stations", tuple(defaults))
    stations = []
    for name in names:
        proto = defaults.get(name)
        fields = {}
        for f in BS_FIELDS:
            key = f"bs.{name}.{f}"
            if key in values:
                used.add(key)
                fields[f] = values[key][1]
        if proto is None:
            missing = [f for f in ("role", "x", "y") if f not in fields]
            if missing:
                raise ScenarioError(
                    f"base station '{name}' is not a default station and needs "
                    + ", ".join(f"bs.{name}.{f}" for f in missing),
                    line=where("network.base_stations"), key="network.base_stations",
                )
            role = Role(fields["role"])
            proto = BaseStation(
                name, role, 0.0, 0.0,
                initial_bands=frozenset({Band.V}) if role is Role.FEMTO else frozenset({Band.E}),
            )
        if "role" in fields:
            fields["role"] = Role(fields["role"])
        if "architecture" in fields:
            fields["architecture"] = Architecture(fields["architecture"])
        stations.append(replace(proto, **fields))
    for key in values:
        m = _BS_KEY.match(key)
        if m and key not in used:
            raise ScenarioError(f"station '{m.group(1)}' is not listed in network.base_stations",
                                line=values[key][0], key=key)

    radios = {}
    for band in Band:
        b = band.value.lower()
        d = DEFAULT_RADIOS[band]
        radios[band] = BandRadio(
            get(f"radio.{b}.carrier_ghz", d.carrier_hz / 1e9) * 1e9,
            get(f"radio.{b}.bandwidth_ghz", d.bandwidth_hz / 1e9) * 1e9,
            get(f"radio.{b}.tx_power_dbm", d.tx_power_dbm),
        )

    rules = {}
    for band in Band:
        b = band.value.lower()
        d = FCC_RULES[band]
        max_bw = get(f"regulatory.{b}.max_bandwidth_ghz", None if d.max_bandwidth_hz is None else d.max_bandwidth_hz / 1e9)
        rules[band] = RegulatoryRule(
            band,
            get(f"regulatory.{b}.ranges_ghz", d.freq_ranges_ghz),
            get(f"regulatory.{b}.licensed", d.licensed),
            get(f"regulatory.{b}.max_tx_power_dbm", d.max_tx_power_dbm),
            get(f"regulatory.{b}.min_antenna_gain_dbi", d.min_antenna_gain_dbi),
            None if max_bw is None else max_bw * 1e9,
        )

    def build(key_group, fn):
        try:
            return fn()
        except (DomainError, ValueError) as exc:
            keys = [k for k in values if k.startswith(key_group)]
            raise ScenarioError(str(exc), line=where(keys[0]) if keys else None,
                                key=keys[0] if keys else None) from None

    bt, bh, bn = base.thresholds, base.handover, base.neighbors
    kwargs = dict(
        base_stations=tuple(stations),
        band_radios=radios,
        noise_figure_db=get("radio.noise_figure_db", base.noise_figure_db),
        gains=build("antenna.", lambda: AntennaConfig(
            get("antenna.combined_gain_dbi", base.gains.combined_gain_dbi),
            get("antenna.tx_share", base.gains.tx_share),
            get("antenna.sidelobe_dbi", base.gains.sidelobe_dbi),
            get("antenna.beamwidth_deg", base.gains.beamwidth_deg),
        )),
        shadowing=Shadowing(
            get("shadowing.loss_db", base.shadowing.loss_db),
            get("shadowing.probability", base.shadowing.probability),
        ),
        attenuation=build("attenuation.", lambda: AttenuationTable.from_pairs(get("attenuation.table", base.attenuation.anchors))),
        thresholds=build("policy.", lambda: Thresholds(
            get("policy.snr_threshold_db", bt.snr_low_high_db),
            get("policy.density_inr_db", bt.density_inr_db),
            get("policy.hysteresis_db", bt.hysteresis_db),
            get("policy.demand_bps", bt.demand_bps),
        )),
        handover=build("handover.", lambda: HandoverCostModel(
            get("handover.sync_delay_s", bh.sync_delay_s),
            get("handover.feedback_factor", bh.feedback_assisted_factor),
        )),
        rules=rules,
        enforce_min_gain=get("regulatory.enforce_min_gain", base.enforce_min_gain),
        interference=get("interference.enabled", base.interference),
        neighbors=Neighbors(get("neighbors.count", bn.count), get("neighbors.radius_m", bn.radius_m)),
        association=get("network.association", base.association),
        trials=get("trials", base.trials),
        master_seed=get("master_seed", base.master_seed),
        distances_m=get("sweep.distances_m", base.distances_m),
        interferer_counts=get("sweep.interferer_counts", base.interferer_counts),
        density_distance_m=get("sweep.density_distance_m", base.density_distance_m),
    )
    try:
        scenario = Scenario(**kwargs)
    except (DomainError, ValueError) as exc:
        raise ScenarioError(str(exc)) from None
    if validate:
        try:
            scenario.validate()
        except ValidationFailed as exc:
            exc.locations = _violation_locations(exc.reports, values)
            raise
    return scenario


_RULE_KEYS = {
    "max transmit power": ("radio.{b}.tx_power_dbm",),
    "frequency range": ("radio.{b}.carrier_ghz", "radio.{b}.bandwidth_ghz"),
    "bandwidth": ("radio.{b}.bandwidth_ghz",),
    "minimum antenna gain": ("antenna.combined_gain_dbi", "antenna.tx_share"),
}


def _violation_locations(reports, values) -> list[str]:
    out = []
    for report in reports:
        b = report.config.band.value.lower()
        for v in report.violations:
            keys = [k.format(b=b) for k in _RULE_KEYS.get(v.rule, ())]
            hit = next((k for k in keys if k in values), None)
            if hit is not None:
                out.append(f"line {values[hit][0]}, key '{hit}': {v.message}")
            else:
                out.append(v.message)
    return out


def load_scenario(path, validate: bool = True) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read(), validate=validate)
