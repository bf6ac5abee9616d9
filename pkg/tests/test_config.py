import dataclasses
import json

import pytest

from qiupsim import config
from qiupsim.errors import PhysicsError, SchemaError


def assert_config_close(a, b):
    """Field-wise equality, allowing an ulp from the unit conversions."""
    for f in dataclasses.fields(b):
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if isinstance(vb, float):
            assert va == pytest.approx(vb, rel=1e-12), f.name
        elif isinstance(vb, tuple) and vb and isinstance(vb[0], float):
            assert va == pytest.approx(vb, rel=1e-12), f.name
        else:
            assert va == vb, f.name


def test_preset_setup1_values():
    cfg = config.preset("setup1")
    assert cfg.pump_wavelength == pytest.approx(532e-9)
    assert cfg.signal_wavelength == pytest.approx(810e-9)
    assert cfg.poling_period == pytest.approx(9.675e-6)
    assert cfg.temperature_c == 85.0
    assert cfg.focal_length_idler == pytest.approx(75e-3)
    assert cfg.focal_length_detector == pytest.approx(150e-3)


def test_preset_setup2_values():
    cfg = config.preset("setup2")
    assert cfg.signal_wavelength == pytest.approx(842e-9)
    assert cfg.idler_wavelength == pytest.approx(780.34e-9, rel=1e-4)
    assert cfg.poling_period == pytest.approx(5.33e-6)
    assert cfg.temperature_c == 75.0


def test_unknown_preset():
    with pytest.raises(SchemaError):
        config.preset("setup3")


def test_round_trip():
    cfg = config.preset("setup1")
    assert_config_close(config.validate_document(json.loads(config.serialize_setup(cfg))), cfg)


def test_round_trip_with_optional_fields():
    cfg = dataclasses.replace(
        config.preset("setup2"),
        lens_shift_i1=(0.3e-3, 0.0),
        gap_i1_before=80e-3,
        phase_p1=0.25,
    )
    assert_config_close(config.validate_document(json.loads(config.serialize_setup(cfg))), cfg)


def test_unknown_key_rejected_with_path():
    doc = config.preset("setup1").to_dict()
    doc["focal_length_mm"] = 75.0
    with pytest.raises(SchemaError) as err:
        config.validate_document(doc)
    assert err.value.path == "focal_length_mm"


def test_missing_focal_length_names_key():
    doc = config.preset("setup1").to_dict()
    del doc["focal_length_idler_mm"]
    with pytest.raises(SchemaError) as err:
        config.validate_document(doc)
    assert "focal_length_idler_mm" in err.value.path


def test_nested_key_path():
    doc = config.preset("setup1").to_dict()
    doc["detector"]["pitch_um"] = "five"
    with pytest.raises(SchemaError) as err:
        config.validate_document(doc)
    assert err.value.path == "detector.pitch_um"


def test_nonpositive_waist_is_physics_error():
    doc = config.preset("setup1").to_dict()
    doc["pump_waist_um"] = -3.0
    with pytest.raises(PhysicsError):
        config.validate_document(doc)


def test_load_setup_file(tmp_path):
    p = tmp_path / "setup.json"
    p.write_text(config.serialize_setup(config.preset("setup2")))
    assert_config_close(config.load_setup_file(p), config.preset("setup2"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError):
        config.load_setup_file(bad)


def test_parse_length():
    assert config.parse_length("0.3mm") == pytest.approx(0.3e-3)
    assert config.parse_length("200um") == pytest.approx(200e-6)
    assert config.parse_length("1.5e-3m") == pytest.approx(1.5e-3)
    with pytest.raises(SchemaError):
        config.parse_length("12 parsec")


def test_polynomial_index_entry():
    cfg = dataclasses.replace(config.preset("setup1"), n_signal=(1.845,))
    setup = config.build_setup(cfg)
    ref = config.build_setup(config.preset("setup1"))
    assert setup.model1._k_signal == pytest.approx(ref.model1._k_signal)


def test_index_model_rejects_far_wavelength():
    setup = config.build_setup(config.preset("setup1"))
    with pytest.raises(PhysicsError):
        setup.model1.crystal.index_model(410e-9)
