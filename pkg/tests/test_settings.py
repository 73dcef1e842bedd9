from pathlib import Path

from evaluator.settings import OUTPUT_DIR_ENV, get_default_config, load_config, resolve_output_dir


def test_missing_file_falls_back_to_defaults(tmp_path):
    assert load_config(str(tmp_path / "absent.yaml")) == get_default_config()


def test_partial_file_is_merged_over_defaults(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("markers:\n  thresholds: [0.25, 0.75]\nplot:\n  palette:\n    curve: '#000000'\n",
                    encoding="utf-8")
    config = load_config(str(path))
    assert config["markers"]["thresholds"] == [0.25, 0.75]
    assert config["plot"]["palette"]["curve"] == "#000000"
    assert config["plot"]["palette"]["fpr"] == get_default_config()["plot"]["palette"]["fpr"]
    assert config["output"]["report_file"] == "report.json"


def test_non_mapping_file_is_ignored(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("- just\n- a list\n", encoding="utf-8")
    assert load_config(str(path)) == get_default_config()


def test_output_dir_precedence(monkeypatch):
    config = get_default_config()
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
    assert resolve_output_dir(config) == Path("./results")

    monkeypatch.setenv(OUTPUT_DIR_ENV, "/tmp/from-env")
    assert resolve_output_dir(config) == Path("/tmp/from-env")
    assert resolve_output_dir(config, "cli-dir") == Path("cli-dir")
