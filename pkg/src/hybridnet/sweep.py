"""Monte-Carlo trials, sweeps over distance or density, and CSV output."""

from __future__ import annotations

import enum
import hashlib
import io
import math
import struct
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .network import (
    Deployment,
    LinkState,
    band_interference_mw,
    build_deployment,
    serving_signal_dbm,
)
from .policy import HandoverEvent, LinkClass, classify_link, evaluate_triggers
from .propagation import noise_power, shannon_throughput
from .regulatory import BOTH, Band
from .transceiver import (
    HandoverState,
    active,
    request_bands,
    settle,
    transmittable_bands,
)
from .units import mw_to_dbm, to_db

Z_95 = 1.959963984540054


class Mode(str, enum.Enum):
    V_ONLY = "VOnly"
    E_ONLY = "EOnly"
    HYBRID = "Hybrid"

    @property
    def bands(self) -> frozenset:
        return {Mode.V_ONLY: frozenset({Band.V}), Mode.E_ONLY: frozenset({Band.E})}.get(self, BOTH)

    @classmethod
    def parse(cls, text: str) -> list["Mode"]:
        table = {"v": [cls.V_ONLY], "e": [cls.E_ONLY], "hybrid": [cls.HYBRID],
                 "all": [cls.V_ONLY, cls.E_ONLY, cls.HYBRID]}
        return table[text.lower()]


class SweepVariable(str, enum.Enum):
    DISTANCE = "mean_distance_m"
    DENSITY = "interferer_count"


@dataclass(frozen=True)
class SweepConfig:
    variable: SweepVariable
    values: tuple[float, ...]
    modes: tuple[Mode, ...] = (Mode.V_ONLY, Mode.E_ONLY, Mode.HYBRID)

    def __post_init__(self):
        if not self.values or any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("sweep values must be nonempty and strictly increasing")
        if not self.modes:
            raise ValueError("sweep needs at least one mode")

    @classmethod
    def distance(cls, scenario, modes=None) -> "SweepConfig":
        return cls(SweepVariable.DISTANCE, tuple(scenario.distances_m), tuple(modes or Mode))

    @classmethod
    def density(cls, scenario, modes=None) -> "SweepConfig":
        return cls(SweepVariable.DENSITY, tuple(scenario.interferer_counts), tuple(modes or Mode))


@dataclass(frozen=True)
class SweepPoint:
    index: int
    mean_distance_m: float
    n_neighbors: int
    value: float


def sweep_points(scenario, sweep: SweepConfig) -> list[SweepPoint]:
    if sweep.variable is SweepVariable.DISTANCE:
        return [SweepPoint(i, v, scenario.neighbors.count, v) for i, v in enumerate(sweep.values)]
    return [SweepPoint(i, scenario.density_distance_m, int(v), v) for i, v in enumerate(sweep.values)]


def derive_seed(master_seed: int, sweep_index: int, trial_index: int) -> int:
    """64-bit trial seed: first 8 bytes (little endian) of BLAKE2b over the packed indices.

    The mode is deliberately not an input, so every mode sees the same
    users, shadowing and interferers at a given (point, trial).
    """
    payload = b"hybridnet/trial" + struct.pack("<qqq", master_seed, sweep_index, trial_index)
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


@dataclass
class TrialResult:
    mode: Mode
    point: SweepPoint
    trial_index: int
    throughput_bps: np.ndarray  # per user
    handovers: np.ndarray  # per user
    link_states: list[LinkState]
    classes: list[LinkClass | None]
    events: list[HandoverEvent | None]
    # per user: (time_s, state, throughput_bps) from attach to steady state
    traces: list[list[tuple[float, HandoverState, float]]] = field(default_factory=list)

    @property
    def mean_throughput_bps(self) -> float:
        return math.fsum(self.throughput_bps) / len(self.throughput_bps)

    @property
    def mean_handovers(self) -> float:
        return math.fsum(self.handovers) / len(self.handovers)


def _sinr_db(signal_dbm: np.ndarray, interference_mw: np.ndarray, noise_dbm: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return signal_dbm - 10.0 * np.log10(interference_mw + 10.0 ** (noise_dbm / 10.0))


def run_trial(scenario, point: SweepPoint, mode: Mode, trial_index: int) -> TrialResult:
    """One Monte-Carlo draw of the network under ``mode``.

    Single-band modes pin every user to that band. Hybrid mode measures the
    channel with every transmitter on, classifies each link, allocates
    bands, and runs the serving transceiver through any handover to steady
    state before throughput is computed.
    """
    rng = np.random.default_rng(derive_seed(scenario.master_seed, point.index, trial_index))
    dep = build_deployment(scenario, point.mean_distance_m, point.n_neighbors, rng)
    n = len(dep.users)
    radios = scenario.radios
    signal = {b: serving_signal_dbm(scenario, dep, b) for b in Band}
    noise = {b: noise_power(radios[b].bandwidth_hz, scenario.noise_figure_db) for b in Band}
    station_bands = [st.bands for st in dep.stations]

    classes: list[LinkClass | None] = [None] * n
    events: list[HandoverEvent | None] = [None] * n
    traces: list[list[tuple[float, HandoverState]]] = []
    handovers = np.zeros(n)
    assignment: list[frozenset] = []

    if mode is Mode.HYBRID:
        sounding = {b: band_interference_mw(scenario, dep, b, None, True) for b in Band}
        snr = {b: signal[b] - noise[b] for b in Band}
        inr_v = to_db(sounding[Band.V]) - noise[Band.V]
        sinr_probe = {b: _sinr_db(signal[b], sounding[b], noise[b]) for b in Band}
        for k in range(n):
            s = dep.serving[k]
            st = dep.stations[s]
            avail = station_bands[s]
            initial = scenario.base_stations[s].initial_bands & avail or frozenset({min(avail)})
            cls = classify_link({b: snr[b][k] for b in avail}, float(inr_v[k]), scenario.thresholds)
            predicted = {b: shannon_throughput(sinr_probe[b][k], radios[b].bandwidth_hz) for b in avail}
            event = evaluate_triggers(initial, cls, st.architecture, scenario.thresholds, predicted, avail)
            state = active(*initial)
            trace = [(0.0, state)]
            if event is not None:
                state = request_bands(state, st.architecture, event.target, scenario.handover)
                trace.append((0.0, state))
                t = state.remaining_s
                state = settle(state)
                trace.append((t, state))
                handovers[k] = 1
            classes[k], events[k] = cls, event
            traces.append(trace)
            assignment.append(transmittable_bands(state))
    else:
        for k in range(n):
            bands = mode.bands & station_bands[dep.serving[k]]
            state = active(*bands) if bands else HandoverState()
            traces.append([(0.0, state)])
            assignment.append(bands)

    on_band = {b: np.array([b in a for a in assignment], dtype=bool) for b in Band}
    interference = {
        b: band_interference_mw(scenario, dep, b, on_band[b], b in mode.bands) for b in Band
    }
    sinr = {b: _sinr_db(signal[b], interference[b], noise[b]) for b in Band}
    rate = {b: np.array([shannon_throughput(x, radios[b].bandwidth_hz) if np.isfinite(x) else 0.0
                         for x in sinr[b]]) for b in Band}

    # equal airtime among a station's users on each band
    load = {b: np.bincount(dep.serving[on_band[b]], minlength=len(dep.stations)) for b in Band}
    throughput = np.zeros(n)
    states: list[LinkState] = []
    full_traces = []
    for k in range(n):
        s = int(dep.serving[k])
        share = {b: 1.0 / load[b][s] for b in assignment[k]}
        ls = LinkState(dep.stations[s].id, dep.users[k].id, assignment[k])
        for b in sorted(assignment[k]):
            ls.snr_db[b] = float(signal[b][k] - noise[b])
            ls.interference_dbm[b] = float(mw_to_dbm(float(interference[b][k])))
            ls.sinr_db[b] = float(sinr[b][k])
            ls.share[b] = share[b]
            ls.throughput_bps += share[b] * float(rate[b][k])
        throughput[k] = ls.throughput_bps
        states.append(ls)
        full_traces.append([
            (t, st, math.fsum(share.get(b, 0.0) * rate[b][k] for b in transmittable_bands(st)))
            for t, st in traces[k]
        ])
    return TrialResult(mode, point, trial_index, throughput, handovers, states, classes, events, full_traces)


# --------------------------------------------------------------------------- aggregation


@dataclass(frozen=True)
class CurveRow:
    sweep_value: float
    mean_throughput_bps: float
    ci95_bps: float
    mean_handovers: float
    trials: int


@dataclass
class AggregateCurve:
    mode: Mode
    variable: SweepVariable
    rows: list[CurveRow]

    @property
    def values(self) -> list[float]:
        return [r.sweep_value for r in self.rows]

    @property
    def means(self) -> np.ndarray:
        return np.array([r.mean_throughput_bps for r in self.rows])

    @property
    def ci95(self) -> np.ndarray:
        return np.array([r.ci95_bps for r in self.rows])

    def row(self, value: float) -> CurveRow:
        for r in self.rows:
            if r.sweep_value == value:
                return r
        raise KeyError(value)


def summarize(samples: Sequence[float]) -> tuple[float, float]:
    """Mean and normal-approximation 95% half-width.

    ``math.fsum`` makes both exactly order independent.
    """
    n = len(samples)
    mean = math.fsum(samples) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in samples) / (n - 1)
    return mean, Z_95 * math.sqrt(var / n)


def _run_cell(args) -> tuple[list[float], list[float]]:
    scenario, point, mode, trials = args
    tput, hand = [], []
    for t in trials:
        r = run_trial(scenario, point, mode, t)
        tput.append(r.mean_throughput_bps)
        hand.append(r.mean_handovers)
    return tput, hand


def run_sweep(scenario, sweep: SweepConfig, trials: int | None = None, jobs: int = 1) -> dict[Mode, AggregateCurve]:
    """Aggregate ``run_trial`` over every (point, mode, trial).

    ``jobs > 1`` spreads cells over worker processes; output is identical
    to a serial run.
    """
    trials = scenario.trials if trials is None else trials
    if trials < 1:
        raise ValueError("trials must be >= 1")
    points = sweep_points(scenario, sweep)
    cells = [(scenario, p, m, range(trials)) for p in points for m in sweep.modes]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]

    rows: dict[Mode, list[CurveRow]] = {m: [] for m in sweep.modes}
    for (_, p, m, _), (tput, hand) in zip(cells, results):
        mean, ci = summarize(tput)
        rows[m].append(CurveRow(p.value, mean, ci, math.fsum(hand) / len(hand), len(tput)))
    return {m: AggregateCurve(m, sweep.variable, rows[m]) for m in sweep.modes}


# --------------------------------------------------------------------------- CSV

CSV_HEADER = "sweep_value,mode,mean_throughput_bps,ci95_bps,mean_handovers"


def format_number(x: float) -> str:
    """Six significant digits, exponent without sign padding: ``1.36600e10``."""
    mantissa, exp = f"{x:.5e}".split("e")
    return f"{mantissa}e{int(exp)}"


def csv_text(curves: Iterable[AggregateCurve]) -> str:
    curves = list(curves.values()) if isinstance(curves, dict) else list(curves)
    if not curves:
        raise ValueError("no curves to write")
    rows = sorted(
        ((r.sweep_value, c.mode.value, r) for c in curves for r in c.rows),
        key=lambda t: (t[0], t[1]),
    )
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for value, mode, r in rows:
        out.write(",".join([
            format_number(value), mode, format_number(r.mean_throughput_bps),
            format_number(r.ci95_bps), format_number(r.mean_handovers),
        ]) + "\n")
    return out.getvalue()


def emit_csv(curves, destination=None) -> None:
    """Write curves as CSV to a path, a text stream, or stdout when ``None``."""
    text = csv_text(curves)
    if destination is None:
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        try:
            with open(destination, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {destination}: {exc.strerror or exc}") from exc
