import pytest
import yaml

from liss.config import PRESETS, ConfigError, apply_overrides, dump_config, load_config, preset


def test_paper_preset_values():
    cfg = preset("paper")
    snap = cfg.snapshot()
    assert (snap["k"], snap["z"], snap["epsilon"], snap["pool_cap"]) == (1000, 4, 0.20, 400)
    assert snap["beta_programs"] == 50 and snap["beta_neighbors"] == 1000
    assert snap["train_seconds_per_iteration"] == 400.0
    assert len(snap["exp2_seeds"]) == 30


def test_desk_preset_is_valid():
    cfg = preset("desk").validate()
    assert cfg.beta_programs == 20 and cfg.beta_neighbors == 200
    assert cfg.beta_maps == ("nwr_9x8", "lmo_16x8") and len(cfg.beta_seeds) == 3
    for name in PRESETS:
        PRESETS[name].validate()


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("laptop")


def test_override_file(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("format: 1\npreset: paper\nk: 20\nbeta_maps: [nwr_9x8]\n")
    cfg = load_config(path)
    assert cfg.k == 20 and cfg.z == 4 and cfg.beta_maps == ("nwr_9x8",) and cfg.preset == "paper"


@pytest.mark.parametrize("body", [
    "k: 3\n",
    "format: 2\nk: 3\n",
    "format: 1\nbogus: 1\n",
    "format: 1\nk: many\n",
    "format: 1\nepsilon: 1.5\n",
    "format: 1\ngames_per_eval: 3\n",
    "format: 1\nbeta_maps: nwr_9x8\n",
    "format: 1\ncontinual_growth: 1\n",
    "format: 1\ntrain_seconds_per_iteration: 10\n",
    "format: [\n",
])
def test_bad_config_files(tmp_path, body):
    path = tmp_path / "c.yaml"
    path.write_text(body)
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.yaml")


def test_dump_round_trip(tmp_path):
    cfg = apply_overrides(preset("desk"), {"k": 7, "epsilon": 0.5})
    text = dump_config(cfg)
    assert yaml.safe_load(text)["format"] == 1
    path = tmp_path / "c.yaml"
    path.write_text(text)
    assert load_config(path) == cfg
