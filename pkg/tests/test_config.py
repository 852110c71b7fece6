"""
配置测试 - schema 检查、覆盖顺序、随附配置文件与保存
"""
import json
from pathlib import Path

import pytest

import symeqprop
from symeqprop.config import (
    check_value,
    default_mapping,
    load_run_config,
    load_schema,
    read_config_file,
    save_run_config,
)
from symeqprop.data.dataset import DatasetKind
from symeqprop.errors import ConfigError
from symeqprop.estimators.pipeline import EstimatorKind
from symeqprop.network.architecture import ConnectionMode, LossHead

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def write_config(tmp_path, values: dict) -> Path:
    path = tmp_path / "run.json"
    path.write_text(json.dumps(values), encoding="utf-8")
    return path


class TestSchema:
    def test_every_entry_has_default_and_type(self):
        for key, entry in load_schema().items():
            assert {"description", "type", "default"} <= set(entry), key

    def test_defaults_pass_own_types(self):
        schema = load_schema()
        for key, value in default_mapping(schema).items():
            check_value(key, value, schema)

    @pytest.mark.parametrize(
        "key, value",
        [
            ("T", 1.5),
            ("T", True),
            ("beta", "0.5"),
            ("normalize", 1),
            ("estimator", 3),
            ("learning_rates", 0.1),
            ("learning_rates", [0.1, None]),
        ],
    )
    def test_type_errors(self, key, value):
        with pytest.raises(ConfigError) as exc:
            check_value(key, value, load_schema())
        assert exc.value.field == key

    def test_int_accepted_as_float(self):
        assert check_value("beta", 1, load_schema()) == 1.0

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as exc:
            check_value("learning_rate", 0.1, load_schema())
        assert exc.value.field == "learning_rate"


class TestLoad:
    def test_defaults(self):
        run = load_run_config()
        assert run.architecture.loss is LossHead.SOFTMAX_READOUT
        assert run.hyperparams.estimator is EstimatorKind.SYMMETRIC
        assert run.data.dataset is DatasetKind.SYNTHETIC
        assert run.precision == "f64"

    def test_file_then_overrides(self, tmp_path):
        path = write_config(tmp_path, {"beta": 0.2, "seed": 4})
        run = load_run_config(path, {"beta": 0.1, "seed": None, "out_dir": str(tmp_path)})
        assert run.hyperparams.beta == 0.1
        assert run.hyperparams.seed == 4
        assert run.out_dir == tmp_path

    def test_unknown_key_in_file(self, tmp_path):
        path = write_config(tmp_path, {"betta": 0.2})
        with pytest.raises(ConfigError) as exc:
            load_run_config(path)
        assert exc.value.field == "betta"

    @pytest.mark.parametrize(
        "values, field",
        [
            ({"beta": 0.0}, "beta"),
            ({"learning_rates": [0.1]}, "learning_rates"),
            ({"conv_kernels": [3, 3]}, "conv_kernels"),
            ({"estimator": "kp_vf_sym"}, "estimator"),
            ({"precision": "f16"}, "precision"),
            ({"grad_check_betas": [0.5, 0]}, "grad_check_betas"),
            ({"train_subset": -1}, "train_subset"),
            ({"dataset": "imagenet"}, "dataset"),
            ({"learning_rates": [0.1, "fast"]}, "learning_rates"),
            ({"input_shape": [1, 8.5, 8]}, "input_shape"),
        ],
    )
    def test_validation_names_field(self, tmp_path, values, field):
        with pytest.raises(ConfigError) as exc:
            load_run_config(write_config(tmp_path, values))
        assert exc.value.field == field

    def test_not_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{beta: 1", encoding="utf-8")
        with pytest.raises(ConfigError) as exc:
            read_config_file(path)
        assert exc.value.field == "config"

    def test_not_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_config_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config_file(tmp_path / "absent.json")

    def test_save_and_reload(self, tmp_path):
        run = load_run_config(overrides={"beta": 0.25})
        path = save_run_config(run, tmp_path / "saved" / "config.json")
        again = load_run_config(path)
        assert again.architecture == run.architecture
        assert again.hyperparams.to_dict() == run.hyperparams.to_dict()
        assert again.mapping == run.mapping


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    run = load_run_config(path)
    assert run.hyperparams.T >= run.hyperparams.K


def test_shipped_config_variants():
    se = load_run_config(CONFIG_DIR / "cifar10_se.json")
    assert se.architecture.loss is LossHead.SQUARED_ERROR
    assert se.architecture.num_groups == 5
    kp = load_run_config(CONFIG_DIR / "cifar10_kpvf.json")
    assert kp.architecture.connection is ConnectionMode.UNIDIRECTIONAL
    assert kp.hyperparams.estimator is EstimatorKind.KP_VF_SYM
    dropout = load_run_config(CONFIG_DIR / "cifar10_ce_dropout.json")
    assert dropout.hyperparams.dropout_layers == (4,)


def test_toy_kp_config_contracts_feedback_gap():
    run = load_run_config(CONFIG_DIR / "toy_kpvf.json")
    hp = run.hyperparams
    assert hp.momentum == 0.0
    assert hp.weight_decay > 0
    # 200 次迭代后 ‖wᶠ − wᵇ‖ 至少缩小到 5%
    for lr in hp.learning_rates:
        assert (1 - lr * hp.weight_decay) ** run.align_iterations < 0.05


def test_version_matches_metadata():
    metadata = (CONFIG_DIR.parent / "metadata.yaml").read_text(encoding="utf-8")
    versions = [line.split(":", 1)[1].strip() for line in metadata.splitlines() if line.startswith("version:")]
    assert versions == [symeqprop.__version__]
