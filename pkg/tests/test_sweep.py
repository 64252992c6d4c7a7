import dataclasses
import io
import random
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridnet import sweep
from hybridnet.network import Node, Role
from hybridnet.policy import DensityClass, LinkClass, SnrClass
from hybridnet.regulatory import Band
from hybridnet.scenario import Scenario, load_scenario
from hybridnet.sweep import (
    CSV_HEADER,
    Mode,
    SweepConfig,
    SweepPoint,
    csv_text,
    derive_seed,
    emit_csv,
    format_number,
    run_sweep,
    run_trial,
    summarize,
)

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
ISOLATED = load_scenario(SCENARIOS / "isolated.scn")
V, E = Band.V, Band.E


def small(**kw):
    return dataclasses.replace(Scenario(), distances_m=(20.0, 100.0, 400.0), trials=4, **kw)


@pytest.fixture
def pinned_user(monkeypatch):
    """One user fixed 100 m from the macro, serving link shadowed, whatever the seed."""
    real = sweep.build_deployment

    def build(scenario, mean_distance_m, n_neighbors, rng):
        dep = real(scenario, mean_distance_m, n_neighbors, rng)
        dep.users = [Node("u0", Role.USER, (100.0, 0.0), home="macro")]
        dep.shadow_serving = np.array([True])
        return dep

    monkeypatch.setattr(sweep, "build_deployment", build)


def test_v_only_isolated_link(pinned_user):
    r = run_trial(ISOLATED, SweepPoint(0, 100.0, 0, 100.0), Mode.V_ONLY, 0)
    assert r.throughput_bps[0] == pytest.approx(13.637157616306e9, rel=1e-9)
    assert r.handovers[0] == 0


def test_hybrid_low_density_link_adds_both_bands(pinned_user):
    pt = SweepPoint(0, 100.0, 0, 100.0)
    h = run_trial(ISOLATED, pt, Mode.HYBRID, 0)
    v = run_trial(ISOLATED, pt, Mode.V_ONLY, 0)
    e = run_trial(ISOLATED, pt, Mode.E_ONLY, 0)
    assert h.classes[0] == LinkClass(SnrClass.MEDIUM_HIGH, DensityClass.LOW)
    assert h.link_states[0].band_assignment == {V, E}
    assert h.throughput_bps[0] == pytest.approx(v.throughput_bps[0] + e.throughput_bps[0], rel=1e-12)
    assert h.handovers[0] == 1


def test_trial_is_deterministic():
    pt = SweepPoint(2, 60.0, 0, 60.0)
    a = run_trial(Scenario(), pt, Mode.HYBRID, 17)
    b = run_trial(Scenario(), pt, Mode.HYBRID, 17)
    assert a.throughput_bps.tobytes() == b.throughput_bps.tobytes()
    assert a.handovers.tobytes() == b.handovers.tobytes()
    assert [str(x) for x in a.events] == [str(x) for x in b.events]


def test_seed_derivation_is_stable():
    assert derive_seed(1, 0, 0) == derive_seed(1, 0, 0)
    seeds = {derive_seed(1, i, t) for i in range(5) for t in range(50)}
    assert len(seeds) == 250
    assert all(0 <= s < 2**64 for s in seeds)


def test_modes_share_channel_draws():
    pt = SweepPoint(0, 80.0, 0, 80.0)
    v = run_trial(Scenario(), pt, Mode.V_ONLY, 3)
    e = run_trial(Scenario(), pt, Mode.E_ONLY, 3)
    assert [ls.user for ls in v.link_states] == [ls.user for ls in e.link_states]


def test_switching_yields_zero_throughput_in_traces():
    for t in range(20):
        r = run_trial(Scenario(), SweepPoint(0, 50.0, 0, 50.0), Mode.HYBRID, t)
        for trace in r.traces:
            for _, state, tput in trace:
                if state.switching:
                    assert tput == 0.0


def test_single_trial_has_zero_ci():
    curves = run_sweep(small(), SweepConfig.distance(small()), trials=1)
    for c in curves.values():
        assert all(r.ci95_bps == 0.0 for r in c.rows)
    one = run_trial(small(), SweepPoint(0, 20.0, 0, 20.0), Mode.HYBRID, 0)
    assert curves[Mode.HYBRID].rows[0].mean_throughput_bps == one.mean_throughput_bps


def test_curve_invariants():
    curves = run_sweep(small(), SweepConfig.distance(small()))
    for c in curves.values():
        assert c.values == sorted(c.values)
        assert (c.ci95 >= 0).all()


def test_csv_shape_and_order():
    text = csv_text(run_sweep(small(), SweepConfig.distance(small())))
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 10
    keys = [(float(l.split(",")[0]), l.split(",")[1]) for l in lines[1:]]
    assert keys == sorted(keys)


def test_number_formatting():
    assert format_number(13.66e9) == "1.36600e10"
    assert format_number(0.0) == "0.00000e0"
    assert format_number(0.25) == "2.50000e-1"
    assert float(format_number(123456789.0)) == pytest.approx(123457000.0)


def test_rerun_is_byte_identical(tmp_path):
    sc = small()
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(run_sweep(sc, SweepConfig.distance(sc)), a)
    emit_csv(run_sweep(sc, SweepConfig.distance(sc)), b)
    assert a.read_bytes() == b.read_bytes()


def test_parallel_equals_serial():
    sc = small()
    serial = csv_text(run_sweep(sc, SweepConfig.distance(sc), jobs=1))
    parallel = csv_text(run_sweep(sc, SweepConfig.distance(sc), jobs=3))
    assert serial == parallel


def test_emit_csv_reports_unwritable_path(tmp_path):
    curves = run_sweep(small(), SweepConfig.distance(small(), [Mode.V_ONLY]), trials=1)
    target = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError, match=str(target)):
        emit_csv(curves, target)
    buf = io.StringIO()
    emit_csv(curves, buf)
    assert buf.getvalue().startswith(CSV_HEADER)


def test_sweep_config_invariants():
    with pytest.raises(ValueError):
        SweepConfig(sweep.SweepVariable.DISTANCE, (10.0, 10.0))
    with pytest.raises(ValueError):
        SweepConfig(sweep.SweepVariable.DISTANCE, ())


@settings(max_examples=50)
@given(st.lists(st.floats(0, 1e11), min_size=1, max_size=40), st.randoms())
def test_summary_is_order_independent(samples, rnd):
    shuffled = samples[:]
    rnd.shuffle(shuffled)
    assert summarize(samples) == summarize(shuffled)


def test_trial_order_does_not_change_aggregate():
    sc = small()
    pt = SweepPoint(1, 100.0, 0, 100.0)
    order = list(range(12))
    forward = [run_trial(sc, pt, Mode.HYBRID, t).mean_throughput_bps for t in order]
    random.Random(4).shuffle(order)
    shuffled = {t: run_trial(sc, pt, Mode.HYBRID, t).mean_throughput_bps for t in order}
    assert summarize(forward) == summarize([shuffled[t] for t in range(12)])
    assert summarize(forward) == summarize(list(shuffled.values()))


@pytest.mark.slow
def test_statistical_consistency():
    sc = dataclasses.replace(Scenario(), distances_m=(100.0,))
    cfg = SweepConfig.distance(sc, [Mode.HYBRID])
    small_run = run_sweep(sc, cfg, trials=1000)[Mode.HYBRID].rows[0]
    big_run = run_sweep(dataclasses.replace(sc, master_seed=2), cfg, trials=10_000)[Mode.HYBRID].rows[0]
    assert abs(small_run.mean_throughput_bps - big_run.mean_throughput_bps) <= small_run.ci95_bps


@pytest.mark.xfail(strict=True, reason="E stays ahead of V across the density sweep; see README")
def test_v_and_e_curves_cross_at_high_density():
    sc = dataclasses.replace(Scenario(), trials=60)
    curves = run_sweep(sc, SweepConfig.density(sc, [Mode.V_ONLY, Mode.E_ONLY]))
    diff = curves[Mode.V_ONLY].means - curves[Mode.E_ONLY].means
    assert (diff > 0).any() and (diff < 0).any()
