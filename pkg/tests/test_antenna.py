import numpy as np
import pytest

from feedercolor.antenna import PRESETS, GainMask, gain_db, masks_for, preset
from feedercolor.scenario import load_scenario, sample_scenario_path


def test_peak_gains():
    # Table I peak gains
    assert gain_db(PRESETS["s1528-like"], 0.0) == pytest.approx(35.0)
    assert gain_db(PRESETS["s1428-like"], 0.0) == pytest.approx(45.76)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_floor_at_180(name):
    m = PRESETS[name]
    assert gain_db(m, 180.0) == pytest.approx(m.sidelobe_floor_db)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_strictly_decreasing_main_lobe(name):
    m = PRESETS[name]
    phi = np.linspace(0, m.half_beamwidth_deg, 500)
    g = gain_db(m, phi)
    oracle = m.peak_gain_db - 3.0 * (phi / m.half_beamwidth_deg) ** 2
    assert np.allclose(g, oracle)
    assert np.all(np.diff(g) < 0)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_envelope_monotone_and_floored(name):
    m = PRESETS[name]
    g = gain_db(m, np.arange(0, 18000 + 1) / 100.0)
    assert np.all(np.diff(g) <= 1e-12)
    assert np.all(g >= m.sidelobe_floor_db)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_sharp_near_boresight(name):
    m = PRESETS[name]
    assert gain_db(m, 0.0) - gain_db(m, 5.0) >= 20.0


def test_negative_angle_rejected():
    with pytest.raises(ValueError):
        gain_db(PRESETS["s1528-like"], -0.1)
    with pytest.raises(ValueError):
        gain_db(PRESETS["s1528-like"], 181.0)


def test_linear_matches_db():
    m = PRESETS["s1428-like"]
    assert m.gain_linear(2.0) == pytest.approx(10 ** (m.gain_db(2.0) / 10))


def test_sidelobe_region_formula():
    m = PRESETS["s1528-like"]
    phi = 20.0
    assert gain_db(m, phi) == pytest.approx(max(min(35 - 25, 32 - 25 * np.log10(phi)), -5.0))


def test_preset_overrides_and_unknown():
    m = preset("s1528-like", peak_gain_db=40.0, half_beamwidth_deg=2.0)
    assert m.peak_gain_db == 40.0 and m.half_beamwidth_deg == 2.0
    with pytest.raises(ValueError):
        preset("nope")
    with pytest.raises(ValueError):
        GainMask(30.0, 0.0, -5.0)


def test_masks_for_config_overrides():
    cfg = load_scenario(sample_scenario_path())
    sat, gs = masks_for(cfg)
    assert sat.peak_gain_db == 35.0 and gs.peak_gain_db == 45.76
    cfg2 = cfg.with_overrides(antennas={"gateway": {"preset": "s1528-like", "half_beamwidth_deg": 1.0}})
    _, gs2 = masks_for(cfg2)
    assert gs2.half_beamwidth_deg == 1.0 and gs2.peak_gain_db == 45.76
