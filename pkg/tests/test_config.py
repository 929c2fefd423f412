import hashlib
import json
import logging

import pytest

from qftverify.config import (
    config_hash,
    get_settings,
    load_config,
    parse_config,
    reset_settings,
    with_seed,
)
from qftverify.exceptions import ConfigError
from qftverify.models import SUITES


def test_every_shipped_config_parses(config_dir):
    suites = set()
    for path in sorted(config_dir.glob("*.yaml")):
        cfg = load_config(path)
        suites.add(cfg.suite)
        assert path.stem == cfg.suite
    assert suites == set(SUITES)


def test_minimal_demo_config(demo_config):
    cfg = parse_config(demo_config)
    assert cfg.suite == "adversarial_demo"
    assert cfg.plan.epsilon == 0.05
    assert cfg.demo.max_fidelity == 0.6


def test_missing_seed_is_named(demo_config):
    del demo_config["seed"]
    with pytest.raises(ConfigError) as info:
        parse_config(demo_config)
    assert ("seed", "Field required") in info.value.errors


def test_register_width_limit(demo_config):
    demo_config.update(suite="closeness_audit", channels=[{"id": "big", "kind": "exact", "n": 12}])
    with pytest.raises(ConfigError) as info:
        parse_config(demo_config)
    assert any(loc == "channels.0.n" for loc, _ in info.value.errors)


def test_env_width_limit(demo_config, monkeypatch):
    monkeypatch.setenv("QFTV_MAX_QUBITS", "3")
    reset_settings()
    demo_config.update(suite="closeness_audit", channels=[{"id": "c", "kind": "exact", "n": 4}])
    with pytest.raises(ConfigError) as info:
        parse_config(demo_config)
    assert info.value.errors[0][0] == "channels.0.n"


def test_all_errors_are_collected(demo_config):
    demo_config.update(suite="nope", schema_version=2, extra_key=True)
    with pytest.raises(ConfigError) as info:
        parse_config(demo_config)
    locs = {loc for loc, _ in info.value.errors}
    assert {"suite", "schema_version", "extra_key"} <= locs
    assert "suite" in str(info.value)


def test_unresolved_references(demo_config):
    demo_config.update(
        suite="hhl_perfect",
        channels=[{"id": "c", "kind": "exact", "n": 2}],
        pairs=[{"id": "pair", "c": "c", "p": "missing"}],
        instances=[{"id": "inst", "n": 2, "spectrum": [0.25]}],
    )
    with pytest.raises(ConfigError) as info:
        parse_config(demo_config)
    assert "unknown channel 'missing'" in str(info.value)


def test_population_only_hhl_config(demo_config):
    demo_config.update(suite="hhl_perfect", population={"count": 3, "n": [2], "d": [2]})
    cfg = parse_config(demo_config)
    assert cfg.population.d == [2]
    assert cfg.hhl_cases() == []


def test_hhl_suites_need_instances_or_population(demo_config):
    demo_config.update(suite="hhl_general")
    with pytest.raises(ConfigError) as info:
        parse_config(demo_config)
    assert "needs 'instances' or 'population'" in str(info.value)


def test_unitary_population_needs_a_unitary_family(demo_config):
    demo_config.update(suite="hhl_cp_mode", population={"families": ["depolarized", "mixed_unitary"]})
    with pytest.raises(ConfigError) as info:
        parse_config(demo_config)
    assert "at least one unitary family" in str(info.value)


def test_population_dimensions_are_bounded(demo_config):
    demo_config.update(suite="hhl_perfect", population={"d": [0]})
    with pytest.raises(ConfigError):
        parse_config(demo_config)


def test_duplicate_ids(demo_config):
    demo_config.update(
        suite="closeness_audit",
        channels=[{"id": "c", "kind": "exact", "n": 2}, {"id": "c", "kind": "exact", "n": 3}],
    )
    with pytest.raises(ConfigError):
        parse_config(demo_config)


def test_yaml_errors(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("suite: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("42\n")
    with pytest.raises(ConfigError):
        load_config(scalar)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")


def test_seed_override_and_hash(demo_config):
    cfg = parse_config(demo_config)
    moved = with_seed(cfg, 12345)
    assert moved.seed == 12345
    assert config_hash(moved) != config_hash(cfg)
    canonical = json.dumps(cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    assert config_hash(cfg) == hashlib.sha256(canonical.encode("utf-8")).hexdigest()
    assert config_hash(parse_config(dict(demo_config))) == config_hash(cfg)
    with pytest.raises(ConfigError):
        with_seed(cfg, -1)


def test_settings_fall_back_on_bad_values(monkeypatch):
    monkeypatch.setenv("QFTV_WORKERS", "many")
    monkeypatch.setenv("LOG_LEVEL", "chatty")
    monkeypatch.setenv("QFTV_REPORT_DIR", "out")
    reset_settings()
    settings = get_settings()
    assert settings.workers == 1
    assert settings.log_level == logging.INFO
    assert settings.report_dir == "out"
    assert get_settings() is settings
