from pathlib import Path

import pytest

from hybridnet.errors import ScenarioError, ValidationFailed
from hybridnet.regulatory import Band
from hybridnet.scenario import Scenario, load_scenario, parse_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def test_empty_text_gives_defaults():
    assert parse_scenario("") == Scenario()


def test_reference_file_spells_out_the_defaults():
    assert load_scenario(SCENARIOS / "reference.scn") == Scenario()


@pytest.mark.parametrize("name", ["isolated.scn", "dense.scn"])
def test_shipped_scenarios_load(name):
    sc = load_scenario(SCENARIOS / name)
    assert sc.validate()


def test_isolated_scenario_shape():
    sc = load_scenario(SCENARIOS / "isolated.scn")
    assert not sc.interference
    assert sc.user_count == 1


def test_dense_scenario_shape():
    sc = load_scenario(SCENARIOS / "dense.scn")
    assert sc.neighbors.count >= 8
    assert sc.neighbors.radius_m <= 50


def test_power_violation_is_located():
    with pytest.raises(ValidationFailed) as info:
        parse_scenario("# comment\nradio.v.tx_power_dbm = 30 dBm\n")
    assert info.value.locations == [
        "line 2, key 'radio.v.tx_power_dbm': max transmit power exceeded: 30 dBm > 27 dBm"
    ]


def test_validation_can_be_deferred():
    sc = parse_scenario("radio.v.tx_power_dbm = 30", validate=False)
    assert sc.band_radios[Band.V].tx_power_dbm == 30.0
    assert not sc.validation_reports()[0].ok


def test_unknown_key_names_the_line():
    with pytest.raises(ScenarioError) as info:
        parse_scenario("trials = 10\nradio.w.tx_power_dbm = 1\n")
    assert info.value.line == 2
    assert "radio.w.tx_power_dbm" in str(info.value)


@pytest.mark.parametrize(
    "text",
    ["trials", "trials = ten", "trials = 5\ntrials = 6", "radio.v.tx_power_dbm = 27 dBi", "= 3"],
)
def test_malformed_input(text):
    with pytest.raises(ScenarioError):
        parse_scenario(text)


def test_unit_suffixes():
    a = parse_scenario("radio.e.carrier_ghz = 73.5 GHz\nhandover.sync_delay_s = 0.02 s\nradio.v.tx_power_dbm=20dBm")
    assert a.band_radios[Band.E].carrier_hz == 73.5e9
    assert a.handover.sync_delay_s == 0.02
    assert a.band_radios[Band.V].tx_power_dbm == 20.0


def test_overrides():
    sc = parse_scenario(
        "trials = 7\nmaster_seed = 9\npolicy.hysteresis_db = 3\nbs.femto.x = 150\n"
        "bs.femto.architecture = single\nantenna.sidelobe_dbi = -20\n"
    )
    assert sc.trials == 7 and sc.master_seed == 9
    assert sc.thresholds.hysteresis_db == 3
    assert sc.station("femto").x == 150
    assert sc.station("femto").architecture.value == "single"
    assert sc.gains.sidelobe_dbi == -20


def test_new_station_needs_a_position():
    with pytest.raises(ScenarioError):
        parse_scenario("network.base_stations = macro, pico1\n")
    sc = parse_scenario("network.base_stations = macro, p\nbs.p.role = pico\nbs.p.x = 50\nbs.p.y = 5\n")
    assert [b.name for b in sc.base_stations] == ["macro", "p"]


def test_min_gain_enforcement_flags_default_e_radio():
    with pytest.raises(ValidationFailed):
        parse_scenario("regulatory.enforce_min_gain = true")
    reports = Scenario().validation_reports()
    assert all(r.ok for r in reports)
    assert any(r.waivers for r in reports)
