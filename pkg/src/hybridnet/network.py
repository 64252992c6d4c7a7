"""Two-tier topology, sector antennas, interference and per-link SINR."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import CapabilityError, DomainError
from .propagation import (
    AttenuationTable,
    LinkBudget,
    LinkGeometry,
    atmospheric_attenuation,
    noise_power,
    received_power,
    shannon_throughput,
)
from .regulatory import Band, RadioConfig
from .transceiver import Architecture
from .units import dbm_to_mw, mw_to_dbm

DEFAULT_SIDELOBE_DBI = -10.0
DEFAULT_BEAMWIDTH_DEG = 20.0
DEFAULT_COMBINED_GAIN_DBI = 30.0


class Role(str, enum.Enum):
    MACRO = "macro"
    PICO = "pico"
    FEMTO = "femto"
    USER = "user"
    # transmitter of a neighbouring link outside the simulated cells
    NEIGHBOR = "neighbor"

    @property
    def is_bs(self) -> bool:
        return self in (Role.MACRO, Role.PICO, Role.FEMTO)


@dataclass(frozen=True)
class SectorAntenna:
    """Flat-top pattern: ``mainlobe_gain_dbi`` inside the beam, sidelobe elsewhere."""

    mainlobe_gain_dbi: float
    sidelobe_gain_dbi: float = DEFAULT_SIDELOBE_DBI
    beamwidth_deg: float = DEFAULT_BEAMWIDTH_DEG
    boresight_deg: float = 0.0

    def __post_init__(self):
        if not self.mainlobe_gain_dbi > self.sidelobe_gain_dbi:
            raise DomainError("mainlobe gain must exceed sidelobe gain")
        if not 0 < self.beamwidth_deg <= 360:
            raise DomainError("beamwidth must be in (0, 360]")

    def pointed(self, boresight_deg: float) -> "SectorAntenna":
        return SectorAntenna(self.mainlobe_gain_dbi, self.sidelobe_gain_dbi,
                             self.beamwidth_deg, boresight_deg)


def angular_offset(angle_deg: float, boresight_deg: float) -> float:
    """Absolute angle between two directions, in [0, 180]."""
    diff = (angle_deg - boresight_deg) % 360.0
    return 360.0 - diff if diff > 180.0 else diff


def directional_gain(antenna: SectorAntenna, angle_deg: float) -> float:
    if angular_offset(angle_deg, antenna.boresight_deg) <= antenna.beamwidth_deg / 2.0:
        return antenna.mainlobe_gain_dbi
    return antenna.sidelobe_gain_dbi


def bearing_deg(src: tuple[float, float], dst: tuple[float, float]) -> float:
    return math.degrees(math.atan2(dst[1] - src[1], dst[0] - src[0]))


def distance_m(a: tuple[float, float], b: tuple[float, float]) -> float:
    return max(math.hypot(b[0] - a[0], b[1] - a[1]), _kernels.MIN_DISTANCE_M)


@dataclass(frozen=True)
class AntennaConfig:
    """Combined mainlobe gain of a link, split between the two ends."""

    combined_gain_dbi: float = DEFAULT_COMBINED_GAIN_DBI
    tx_share: float = 0.5
    sidelobe_dbi: float = DEFAULT_SIDELOBE_DBI
    beamwidth_deg: float = DEFAULT_BEAMWIDTH_DEG

    def __post_init__(self):
        if not 0.0 <= self.tx_share <= 1.0:
            raise DomainError("tx_share must be in [0, 1]")
        # constructing both patterns checks mainlobe > sidelobe and the beamwidth
        self.bs_antenna(0.0)
        self.user_antenna(0.0)

    @property
    def tx_main_dbi(self) -> float:
        return self.combined_gain_dbi * self.tx_share

    @property
    def rx_main_dbi(self) -> float:
        return self.combined_gain_dbi - self.tx_main_dbi

    def bs_antenna(self, boresight_deg: float) -> SectorAntenna:
        return SectorAntenna(self.tx_main_dbi, self.sidelobe_dbi, self.beamwidth_deg, boresight_deg)

    def user_antenna(self, boresight_deg: float) -> SectorAntenna:
        return SectorAntenna(self.rx_main_dbi, self.sidelobe_dbi, self.beamwidth_deg, boresight_deg)


@dataclass(frozen=True)
class Node:
    id: str
    role: Role
    position: tuple[float, float]
    radio_v: RadioConfig | None = None
    radio_e: RadioConfig | None = None
    architecture: Architecture = Architecture.DUAL_CHAIN
    # users only: the base station the user was dropped around
    home: str | None = None

    def __post_init__(self):
        if self.role.is_bs and self.radio_v is None and self.radio_e is None:
            raise DomainError(f"base station {self.id} has no radio")

    def radio(self, band: Band) -> RadioConfig | None:
        return self.radio_v if band is Band.V else self.radio_e

    @property
    def bands(self) -> frozenset:
        return frozenset(b for b in Band if self.radio(b) is not None)


@dataclass(frozen=True)
class Transmitter:
    """A co-channel emitter as seen from a victim receiver."""

    position: tuple[float, float]
    tx_power_dbm: float
    antenna: SectorAntenna
    shadowed: bool = False


@dataclass
class LinkState:
    serving: str
    user: str
    band_assignment: frozenset
    snr_db: dict = field(default_factory=dict)
    interference_dbm: dict = field(default_factory=dict)
    sinr_db: dict = field(default_factory=dict)
    # fraction of airtime the user gets on each band
    share: dict = field(default_factory=dict)
    throughput_bps: float = 0.0


# --------------------------------------------------------------------------- placement


def place_users(scenario, mean_distance_m: float, rng_seed) -> list[Node]:
    """Drop each base station's users around it.

    Distance is uniform on [0.5, 1.5] x ``mean_distance_m``, bearing uniform.
    ``rng_seed`` may be an int or a ``numpy.random.Generator``.
    """
    if not mean_distance_m > 0:
        raise DomainError(f"mean distance must be positive, got {mean_distance_m}")
    counts = [bs.users for bs in scenario.base_stations]
    total = sum(counts)
    if total < 1:
        raise DomainError("scenario has no users")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    dist = rng.uniform(0.5, 1.5, total) * mean_distance_m
    theta = rng.uniform(0.0, 2.0 * math.pi, total)
    users = []
    k = 0
    for bs, n in zip(scenario.base_stations, counts):
        for _ in range(n):
            pos = (bs.x + dist[k] * math.cos(theta[k]), bs.y + dist[k] * math.sin(theta[k]))
            users.append(Node(f"u{k}", Role.USER, pos, home=bs.name))
            k += 1
    return users


def associate(users: Sequence[Node], stations: Sequence[Node], scenario) -> list[int]:
    """Serving index per user: strongest unshadowed E-band signal, or the home cell."""
    if scenario.association == "home":
        index = {bs.id: i for i, bs in enumerate(stations)}
        return [index[u.home] for u in users]
    gains = scenario.gains
    serving = []
    for u in users:
        best, best_p = 0, -math.inf
        for i, bs in enumerate(stations):
            band = Band.E if bs.radio_e is not None else Band.V
            radio = bs.radio(band)
            budget = LinkBudget(
                radio.tx_power_dbm, gains.tx_main_dbi, gains.rx_main_dbi, radio.carrier_hz,
                LinkGeometry(distance_m(bs.position, u.position)),
            )
            p = received_power(budget, scenario.attenuation)
            if p > best_p:
                best, best_p = i, p
        serving.append(best)
    return serving


# --------------------------------------------------------------------------- interference


def interference_power(
    victim_position: tuple[float, float],
    victim_antenna: SectorAntenna,
    co_channel: Iterable[Transmitter],
    freq_hz: float,
    table: AttenuationTable,
    shadow_loss_db: float = 10.0,
) -> float:
    """Aggregate interference in dBm; ``-inf`` when nothing interferes.

    Each transmitter is weighed by its gain toward the victim and the
    victim's gain toward it. Powers are summed in milliwatts.
    """
    total_mw = 0.0
    for tx in co_channel:
        d = distance_m(tx.position, victim_position)
        g_tx = directional_gain(tx.antenna, bearing_deg(tx.position, victim_position))
        g_rx = directional_gain(victim_antenna, bearing_deg(victim_position, tx.position))
        budget = LinkBudget(tx.tx_power_dbm, g_tx, g_rx, freq_hz,
                            LinkGeometry(d, tx.shadowed, shadow_loss_db))
        total_mw += dbm_to_mw(received_power(budget, table))
    return mw_to_dbm(total_mw)


def sinr_db(signal_dbm: float, interference_dbm: float, noise_dbm: float) -> float:
    return signal_dbm - mw_to_dbm(dbm_to_mw(interference_dbm) + dbm_to_mw(noise_dbm))


# --------------------------------------------------------------------------- link state


def compute_link_state(
    scenario,
    user: Node,
    serving: Node,
    band_assignment: Iterable[Band],
    interferers: Mapping[Band, Sequence[Transmitter]] | None = None,
    rng_seed=None,
    shadowed: bool | None = None,
    share: Mapping[Band, float] | None = None,
) -> LinkState:
    """SNR, SINR and throughput of one downlink on its assigned bands.

    Both ends point mainlobe to mainlobe. Shadowing is drawn from
    ``rng_seed`` unless ``shadowed`` pins it.
    """
    bands = frozenset(band_assignment)
    if not serving.architecture.allows(bands):
        raise CapabilityError(f"{serving.id} is single-chain and cannot serve {sorted(b.value for b in bands)}")
    missing = bands - serving.bands
    if missing:
        raise CapabilityError(f"{serving.id} has no radio for {sorted(b.value for b in missing)}")
    if shadowed is None:
        rng = np.random.default_rng(rng_seed)
        shadowed = bool(rng.random() < scenario.shadowing.probability)
    interferers = interferers or {}
    share = share or {}
    gains = scenario.gains
    rx_antenna = gains.user_antenna(bearing_deg(user.position, serving.position))
    state = LinkState(serving.id, user.id, bands)
    d = distance_m(serving.position, user.position)
    for band in sorted(bands):
        radio = serving.radio(band)
        budget = LinkBudget(
            radio.tx_power_dbm, gains.tx_main_dbi, gains.rx_main_dbi, radio.carrier_hz,
            LinkGeometry(d, shadowed, scenario.shadowing.loss_db),
        )
        signal = received_power(budget, scenario.attenuation)
        noise = noise_power(radio.bandwidth_hz, scenario.noise_figure_db)
        interference = interference_power(
            user.position, rx_antenna, interferers.get(band, ()), radio.carrier_hz,
            scenario.attenuation, scenario.shadowing.loss_db,
        )
        state.snr_db[band] = signal - noise
        state.interference_dbm[band] = interference
        state.sinr_db[band] = sinr_db(signal, interference, noise)
        state.share[band] = share.get(band, 1.0)
        state.throughput_bps += state.share[band] * shannon_throughput(state.sinr_db[band], radio.bandwidth_hz)
    return state


# --------------------------------------------------------------------------- vectorised trial geometry


@dataclass
class Deployment:
    """Everything random about one trial, drawn once and shared by all modes."""

    stations: list[Node]
    users: list[Node]
    serving: np.ndarray  # user -> station index
    neighbors: np.ndarray  # (n, 2) positions of neighbouring-link transmitters
    neighbor_boresight: np.ndarray
    shadow_serving: np.ndarray  # (n_users,) bool
    shadow_interf: np.ndarray  # (n_users, n_stations + n_neighbors) bool
    schedule_u: np.ndarray  # (n_stations, 3) uniforms picking the scheduled user

    @property
    def user_xy(self) -> np.ndarray:
        return np.array([u.position for u in self.users], dtype=float).reshape(-1, 2)

    @property
    def station_xy(self) -> np.ndarray:
        return np.array([s.position for s in self.stations], dtype=float).reshape(-1, 2)


def build_deployment(scenario, mean_distance_m: float, n_neighbors: int, rng: np.random.Generator) -> Deployment:
    stations = scenario.station_nodes()
    users = place_users(scenario, mean_distance_m, rng)
    serving = np.asarray(associate(users, stations, scenario), dtype=np.int64)
    if n_neighbors:
        # uniform over a disk around the first (anchor) station
        r = scenario.neighbors.radius_m * np.sqrt(rng.random(n_neighbors))
        phi = rng.uniform(0.0, 2.0 * math.pi, n_neighbors)
        cx, cy = stations[0].position
        neighbors = np.column_stack([cx + r * np.cos(phi), cy + r * np.sin(phi)])
        neighbor_boresight = rng.uniform(0.0, 360.0, n_neighbors)
    else:
        neighbors = np.zeros((0, 2))
        neighbor_boresight = np.zeros(0)
    p = scenario.shadowing.probability
    shadow_serving = rng.random(len(users)) < p
    shadow_interf = rng.random((len(users), len(stations) + n_neighbors)) < p
    schedule_u = rng.random((len(stations), 3))
    return Deployment(stations, users, serving, neighbors, neighbor_boresight,
                      shadow_serving, shadow_interf, schedule_u)


_SCHEDULE_SLOT = {None: 0, Band.V: 1, Band.E: 2}


def scheduled_user(dep: Deployment, station: int, candidates: Sequence[int], band: Band | None) -> int:
    """User a station's beam points at on ``band``; stable across modes."""
    u = dep.schedule_u[station, _SCHEDULE_SLOT[band]]
    return candidates[min(int(u * len(candidates)), len(candidates) - 1)]


def serving_signal_dbm(scenario, dep: Deployment, band: Band) -> np.ndarray:
    """Received serving-link power per user; ``-inf`` where the cell lacks the band."""
    gains = scenario.gains
    out = np.full(len(dep.users), -math.inf)
    for k, (user, s) in enumerate(zip(dep.users, dep.serving)):
        radio = dep.stations[s].radio(band)
        if radio is None:
            continue
        budget = LinkBudget(
            radio.tx_power_dbm, gains.tx_main_dbi, gains.rx_main_dbi, radio.carrier_hz,
            LinkGeometry(distance_m(dep.stations[s].position, user.position),
                         bool(dep.shadow_serving[k]), scenario.shadowing.loss_db),
        )
        out[k] = received_power(budget, scenario.attenuation)
    return out


def band_interference_mw(
    scenario,
    dep: Deployment,
    band: Band,
    on_band: np.ndarray | None,
    neighbors_active: bool,
) -> np.ndarray:
    """Interference per user on ``band``.

    ``on_band[k]`` says whether user k is assigned ``band``; a station
    transmits on the band iff one of its users is, beaming at one of them.
    ``None`` means every user is on the band (the pre-allocation sounding).
    """
    n_users = len(dep.users)
    if not scenario.interference or n_users == 0:
        return np.zeros(n_users)
    gains = scenario.gains
    radio = scenario.radios[band]
    xs, ys, bore, power = [], [], [], []
    n_st = len(dep.stations)
    tx_on = np.zeros(n_st + len(dep.neighbors), dtype=bool)
    user_xy = dep.user_xy
    for j, st in enumerate(dep.stations):
        r = st.radio(band)
        members = [k for k in range(n_users) if dep.serving[k] == j and (on_band is None or on_band[k])]
        xs.append(st.position[0])
        ys.append(st.position[1])
        power.append(r.tx_power_dbm if r is not None else 0.0)
        if r is None or not members:
            bore.append(0.0)
            continue
        tx_on[j] = True
        target = scheduled_user(dep, j, members, None if on_band is None else band)
        bore.append(bearing_deg(st.position, tuple(user_xy[target])))
    xs.extend(dep.neighbors[:, 0])
    ys.extend(dep.neighbors[:, 1])
    bore.extend(dep.neighbor_boresight)
    power.extend([radio.tx_power_dbm] * len(dep.neighbors))
    tx_on[n_st:] = neighbors_active

    # a station never interferes with its own users
    active = np.repeat(tx_on[None, :], n_users, axis=0)
    active[np.arange(n_users), dep.serving] = False
    if not active.any():
        return np.zeros(n_users)

    st_xy = dep.station_xy
    vbore = np.degrees(np.arctan2(st_xy[dep.serving, 1] - user_xy[:, 1], st_xy[dep.serving, 0] - user_xy[:, 0]))
    shadow_db = np.where(dep.shadow_interf, scenario.shadowing.loss_db, 0.0)
    att = atmospheric_attenuation(scenario.attenuation, radio.carrier_hz)
    return _kernels.interference_mw(
        np.ascontiguousarray(user_xy[:, 0]), np.ascontiguousarray(user_xy[:, 1]), vbore,
        np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), np.asarray(bore, dtype=float),
        np.asarray(power, dtype=float), active, shadow_db,
        float(radio.carrier_hz), float(att), float(gains.tx_main_dbi), float(gains.rx_main_dbi),
        float(gains.sidelobe_dbi), float(gains.beamwidth_deg / 2.0),
    )
