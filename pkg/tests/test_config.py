"""Tests for config loading and validation."""

import json
from pathlib import Path

import pytest

from skomap.config import (
    conditions_config,
    cusp_config,
    load_document,
    parse_seeds,
    thorn_config,
    verify_config,
)
from skomap.errors import ConfigError

CONFIGS = Path(__file__).parent.parent / "configs"


def test_parse_seeds():
    assert parse_seeds("0..4") == [0, 1, 2, 3, 4]
    assert parse_seeds("7") == [7]
    assert parse_seeds("1,3..5, 9") == [1, 3, 4, 5, 9]
    assert parse_seeds([2, 1]) == [2, 1]
    for bad in ("", "a..b", "5..2", "1..2..3"):
        with pytest.raises(ValueError):
            parse_seeds(bad)


def test_bundled_cusp_config():
    cfg = cusp_config(load_document(CONFIGS / "cusp_alpha_sweep.json"))
    assert cfg.spec.kind == "symmetric_cusp"
    assert cfg.alphas == [0.5, 1.0, 1.5]
    assert cfg.resolutions[0] == 1024 and cfg.resolutions[-1] == 262144
    assert len(cfg.seeds) == 30
    assert cfg.thresholds.diverging == 1.5


def test_bundled_thorn_config():
    cfg = thorn_config(load_document(CONFIGS / "thorn_gamma_sweep.json"))
    assert [p.gamma for p in cfg.profiles] == [1.0, 2.0, 3.0, 1.0]
    assert cfg.profiles[-1].base_width == 1.0
    assert cfg.experiments == ["excursion", "horizon"]


def test_other_bundled_configs():
    cond = conditions_config(load_document(CONFIGS / "conditions_symmetric_cusp.json"))
    assert cond.checks == ["comb", "box"]
    assert cond.c1_box == 4.0
    ver = verify_config(load_document(CONFIGS / "verify_oracle.json"))
    assert ver.suite == "oracle"
    assert len(ver.seeds) == 1000


def _cusp_doc(**overrides):
    doc = {"spec": {"kind": "closing_cusp"}, "alphas": [1.0],
           "resolutions": [64, 128], "seeds": "0..2"}
    doc.update(overrides)
    return doc


@pytest.mark.parametrize("overrides, pointer", [
    ({"spec": {"kind": "closing_cusp", "alpha": -1}}, "/spec/alpha"),
    ({"spec": {"kind": "wedge"}}, "/spec/kind"),
    ({"resolutions": [64, 100]}, "/resolutions/1"),
    ({"resolutions": [128, 64]}, "/resolutions/1"),
    ({"seeds": "zero"}, "/seeds"),
    ({"thresholds": {"span": "diagonal"}}, "/thresholds/span"),
    ({"thresholds": {"diverging": 1.2, "plateauing": 1.3}}, "/thresholds"),
    ({"extra": 1}, "/"),
])
def test_cusp_config_errors_carry_pointer(overrides, pointer):
    with pytest.raises(ConfigError) as exc:
        cusp_config(_cusp_doc(**overrides))
    assert exc.value.pointer == pointer


def test_missing_field():
    doc = _cusp_doc()
    del doc["alphas"]
    with pytest.raises(ConfigError) as exc:
        cusp_config(doc)
    assert "alphas" in str(exc.value)


def test_thorn_profile_error_pointer():
    doc = {"profiles": [{"gamma": 1.0}, {"gamma": 0.5}], "resolutions": [64, 128], "seeds": [0]}
    with pytest.raises(ConfigError) as exc:
        thorn_config(doc)
    assert exc.value.pointer == "/profiles/1"


def test_verify_config_rejects_unknown_suite():
    with pytest.raises(ConfigError) as exc:
        verify_config({"suite": "nope"})
    assert exc.value.pointer == "/suite"


def test_load_document_formats(tmp_path):
    yaml_file = tmp_path / "c.yaml"
    yaml_file.write_text("suite: esp\nseeds: 0..3\n")
    assert verify_config(load_document(yaml_file)).seeds == [0, 1, 2, 3]
    json_file = tmp_path / "c.json"
    json_file.write_text(json.dumps({"suite": "sp"}))
    assert verify_config(load_document(json_file)).seeds == list(range(100))
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ConfigError):
        load_document(broken)
    with pytest.raises(ConfigError):
        load_document(tmp_path / "missing.json")
