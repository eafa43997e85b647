from pathlib import Path

import pytest
import yaml

from cyclo_slv.core import ScaleGuards
from utils.config import Config, merge_configs

DEFAULT_FILE = Path(__file__).resolve().parent.parent / "config" / "default_config.yml"


def test_defaults_without_file():
    config = Config()
    assert config.get("favard.nodes") == 2048
    assert config.get("slv.epsilon") == "1/2"
    assert config.get("parallel.n_jobs") == 1
    assert config.get("missing.key", "fallback") == "fallback"
    assert config.scale_guards() == ScaleGuards()
    assert config.validate() == (True, [])


def test_shipped_config_loads_and_validates():
    config = Config()
    assert config.load_from_file(str(DEFAULT_FILE))
    assert config.validate() == (True, [])
    assert config.scale_guards().max_points == 65536


def test_load_from_file(tmp_path):
    path = tmp_path / "config.yml"
    path.write_text(yaml.safe_dump({"guards": {"max_points": 100, "bogus": 3}, "favard": {"nodes": 64}}))
    config = Config(str(path))
    assert config.get("favard.nodes") == 64
    assert config.get("favard.chunk_size") == 128
    guards = config.scale_guards()
    assert guards.max_points == 100
    assert guards.max_modulus == ScaleGuards().max_modulus


def test_missing_and_malformed_files(tmp_path):
    config = Config()
    assert not config.load_from_file(str(tmp_path / "nope.yml"))
    listing = tmp_path / "list.yml"
    listing.write_text("- 1\n- 2\n")
    assert not config.load_from_file(str(listing))
    broken = tmp_path / "broken.yml"
    broken.write_text("guards: [unclosed\n")
    assert not config.load_from_file(str(broken))
    assert config.get("favard.nodes") == 2048


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("CYCLO_N_JOBS", "4")
    monkeypatch.setenv("CYCLO_LOG_LEVEL", "DEBUG")
    monkeypatch.setenv("CYCLO_MAX_POINTS", "512")
    monkeypatch.setenv("CYCLO_SEED", "not-a-number")
    config = Config(str(tmp_path / "absent.yml"))
    assert config.get("parallel.n_jobs") == 4
    assert config.get("logging.level") == "DEBUG"
    assert config.scale_guards().max_points == 512
    assert config.get("run.seed") == 0


def test_environment_beats_file(monkeypatch, tmp_path):
    path = tmp_path / "config.yml"
    path.write_text(yaml.safe_dump({"favard": {"nodes": 64}}))
    monkeypatch.setenv("CYCLO_FAVARD_NODES", "256")
    assert Config(str(path)).get("favard.nodes") == 256


def test_set_creates_nested_keys():
    config = Config()
    config.set("extra.deep.value", 3)
    assert config.get("extra.deep.value") == 3
    config.set("favard", 7)
    config.set("favard.nodes", 32)
    assert config.get("favard") == {"nodes": 32}


@pytest.mark.parametrize(
    "key, value, message",
    [
        ("guards.max_points", 0, "guards.max_points must be a positive integer"),
        ("parallel.n_jobs", 0, "parallel.n_jobs must be a nonzero integer"),
        ("favard.nodes", 8, "favard.nodes must be an integer >= 16"),
        ("favard.chunk_size", "many", "favard.chunk_size must be a positive integer"),
        ("slv.phi_samples", -1, "slv.phi_samples must be a positive integer"),
        ("run.seed", -1, "run.seed must be a nonnegative integer"),
    ],
)
def test_validate_reports_bad_values(key, value, message):
    config = Config()
    config.set(key, value)
    ok, errors = config.validate()
    assert not ok
    assert errors == [message]
    section = key.split(".")[0]
    assert config.validate(section) == (False, [message])
    other = "run" if section != "run" else "slv"
    assert config.validate(other) == (True, [])


def test_negative_n_jobs_is_valid():
    config = Config()
    config.set("parallel.n_jobs", -1)
    assert config.validate("parallel") == (True, [])


def test_save_and_reload(tmp_path):
    config = Config()
    config.set("favard.nodes", 512)
    out = tmp_path / "saved" / "config.yml"
    assert config.save_to_file(str(out))
    assert Config(str(out)).get_all() == config.get_all()


def test_merge_configs():
    base = {"a": {"x": 1, "y": 2}, "b": 1}
    merged = merge_configs(base, {"a": {"y": 3}, "c": {"z": 4}})
    assert merged == {"a": {"x": 1, "y": 3}, "b": 1, "c": {"z": 4}}
    assert base == {"a": {"x": 1, "y": 2}, "b": 1}
    config = Config()
    config.merge({"slv": {"phi_samples": 16}})
    assert config.get("slv.phi_samples") == 16
    assert config.get("slv.epsilon") == "1/2"
