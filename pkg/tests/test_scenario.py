import json
import math

import pytest

from perfplate.errors import ConfigError
from perfplate.scenario import FAMILIES, load_scenario, parse_scenario

BASE = {
    "perforation": {"family": "circular_bore", "r_mm": 0.225, "h_mm": 2.0, "theta_deg": 60},
    "lattice": {"xi1_mm": [3.0, 0.0], "xi2_mm": [0.0, 2.7]},
    "wave": {"phi_deg": 45, "frequency_hz": 1000},
}


def _with(block, **kw):
    data = json.loads(json.dumps(BASE))
    data[block].update(kw)
    return data


def _path(data):
    with pytest.raises(ConfigError) as info:
        parse_scenario(data)
    return info.value.path


def test_parse_converts_units():
    cfg = parse_scenario(BASE)
    assert cfg.family == "circular_bore"
    assert cfg.bore.r == pytest.approx(0.225e-3)
    assert cfg.perforation.a == pytest.approx(0.45e-3)
    assert cfg.lattice.cell_area == pytest.approx(8.1e-6)
    assert cfg.wave.phi == pytest.approx(math.pi / 4)
    assert cfg.plate().bore is cfg.bore


@pytest.mark.parametrize(
    "perf, family",
    [
        ({"r_mm": 1, "h_mm": 1}, "untilted_cylinder"),
        ({"r_mm": 1, "h_mm": 1, "theta_deg": 30}, "circular_bore"),
        ({"a_mm": 2, "b_mm": 1, "h_mm": 1}, "untilted_elliptical"),
        ({"a_mm": 2, "b_mm": 1, "h_mm": 1, "theta_deg": 30}, "tilted_elliptical"),
    ],
)
def test_family_inference(perf, family):
    assert parse_scenario({"perforation": perf}).family == family


def test_all_families_parse():
    specs = {
        "circular_bore": {"r_mm": 1, "h_mm": 1, "theta_deg": 20},
        "tilted_circular_opening": {"r_mm": 1, "h_mm": 1, "theta_deg": 20},
        "untilted_cylinder": {"r_mm": 1, "h_mm": 1},
        "tilted_elliptical": {"a_mm": 2, "b_mm": 1, "h_mm": 1, "theta_deg": 20},
        "untilted_elliptical": {"a_mm": 2, "b_mm": 1, "h_mm": 1},
    }
    assert set(specs) == set(FAMILIES)
    for fam, p in specs.items():
        assert parse_scenario({"perforation": {"family": fam, **p}}).family == fam


def test_missing_minor_axis_names_field():
    data = {"perforation": {"family": "tilted_elliptical", "a_mm": 2, "h_mm": 1}}
    assert _path(data) == "perforation.b_mm"


@pytest.mark.parametrize(
    "data, path",
    [
        (_with("perforation", colour="red"), "perforation.colour"),
        (_with("lattice", xi3_mm=[1, 1]), "lattice.xi3_mm"),
        (_with("wave", phi_deg=95), "wave.phi_deg"),
        (_with("wave", frequency_hz=-5), "wave.frequency_hz"),
        (_with("perforation", theta_deg=90), "perforation.theta_deg"),
        (_with("perforation", a_mm=1.0), "perforation.a_mm"),
        (_with("lattice", xi2_mm=[6.0, 0.0]), "lattice"),
        (_with("lattice", xi2_mm=[6.0]), "lattice.xi2_mm"),
        ({**BASE, "extra": 1}, "extra"),
        ({"lattice": BASE["lattice"]}, "perforation"),
        ({"perforation": {"family": "conical", "r_mm": 1, "h_mm": 1}}, "perforation.family"),
        ({"perforation": {"family": "untilted_cylinder", "r_mm": 1, "h_mm": 1, "theta_deg": 5}}, "perforation.theta_deg"),
        ({"perforation": {"a_mm": 1, "b_mm": 2, "h_mm": 1}}, "perforation.b_mm"),
        ({"perforation": {"r_mm": True, "h_mm": 1}}, "perforation.r_mm"),
    ],
)
def test_errors_name_the_field(data, path):
    assert _path(data) == path


def test_error_message_has_path():
    err = ConfigError("missing", "perforation.b_mm")
    assert str(err).startswith("perforation.b_mm: ")


def test_sweep_grid():
    cfg = parse_scenario({**BASE, "sweep": {"f_min_hz": 500, "f_max_hz": 5000, "n": 10, "spacing": "log"}})
    assert len(cfg.frequencies) == 10
    assert cfg.frequencies[0] == pytest.approx(500) and cfg.frequencies[-1] == pytest.approx(5000)
    assert cfg.frequencies[1] / cfg.frequencies[0] == pytest.approx(cfg.frequencies[2] / cfg.frequencies[1])
    explicit = parse_scenario({**BASE, "sweep": {"frequencies_hz": [700, 800]}})
    assert explicit.frequencies == [700.0, 800.0]


@pytest.mark.parametrize(
    "sweep, path",
    [
        ({"f_min_hz": 500, "f_max_hz": 100}, "sweep.f_max_hz"),
        ({"f_min_hz": 500, "f_max_hz": 600, "n": 0}, "sweep.n"),
        ({"f_min_hz": 500, "f_max_hz": 600, "spacing": "cubic"}, "sweep.spacing"),
        ({"frequencies_hz": []}, "sweep.frequencies_hz"),
        ({"frequencies_hz": [100, -1]}, "sweep.frequencies_hz[1]"),
        ({"frequencies_hz": [100], "n": 3}, "sweep.n"),
    ],
)
def test_sweep_errors(sweep, path):
    assert _path({**BASE, "sweep": sweep}) == path


def test_plate_requires_lattice():
    cfg = parse_scenario({"perforation": BASE["perforation"]})
    with pytest.raises(ConfigError) as info:
        cfg.plate()
    assert info.value.path == "lattice"


def test_load_scenario(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(BASE))
    assert load_scenario(p).family == "circular_bore"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_scenario(bad)
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "missing.json")
