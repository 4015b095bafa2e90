import os

import pytest

from app.config import ENV_CACHE, ENV_THREADS, RunConfig
from app.errors import DomainError


def test_defaults_validate():
    config = RunConfig().validate()
    assert config.precision_digits == 30
    assert config.escalation_threshold < config.vanishing_threshold


@pytest.mark.parametrize("field, value", [
    ("precision_digits", 20),
    ("prime_cutoff", 0),
    ("zero_grid_step", -0.1),
    ("workers", 0),
    ("seed", -1),
    ("escalation_threshold", 1.0),
])
def test_invalid_settings(field, value):
    config = RunConfig()
    setattr(config, field, value)
    with pytest.raises(DomainError):
        config.validate()


def test_environment_overrides():
    config = RunConfig().apply_environment({ENV_CACHE: "/tmp/z.jsonl", ENV_THREADS: "4"})
    assert config.cache_path == "/tmp/z.jsonl"
    assert config.workers == 4
    with pytest.raises(DomainError):
        RunConfig().apply_environment({ENV_THREADS: "many"})


def test_hash_ignores_paths_and_workers():
    a = RunConfig(cache_path="a.jsonl", workers=1)
    b = RunConfig(cache_path="b.jsonl", workers=8, output_path="elsewhere")
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != RunConfig(precision_digits=40).config_hash()


def test_dict_round_trip_skips_unknown_keys():
    data = RunConfig(seed=7).to_dict()
    data["colour"] = "blue"
    assert RunConfig.from_dict(data).seed == 7


def test_artifact_path_resolves_relative_names():
    config = RunConfig(output_path="out")
    assert config.artifact_path("t.csv") == os.path.join("out", "t.csv")
    assert config.artifact_path(os.path.abspath("t.csv")) == os.path.abspath("t.csv")
    assert config.artifact_path(None) is None
