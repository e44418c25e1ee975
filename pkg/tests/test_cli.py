import json

import numpy as np
import pytest

from pnlssdec.cli import (DEFAULT_CONFIG, PipelineConfig, RunManifest,
                          cmd_decouple, cmd_evaluate, cmd_generate,
                          cmd_identify, main, split_realizations)
from pnlssdec.linid import output_error_db
from pnlssdec.pnlss import PnlssModel
from pnlssdec.signals import Dataset, Signal, load_dataset, save_dataset


SMALL_OVERRIDES = {
    "integration": {"oversample": 4},
    "excitation": {
        "samples_per_period": 512,
        "train_realizations": 2,
        "retained_periods": 2,
        "transient_periods": 2,
        "sweptsine": {"f_start": 20.0, "f_end": 50.0,
                      "rate_hz_per_min": 600.0, "amplitude": 50.0},
    },
    "model": {"order": 2, "state_degrees": [2]},
    "training": {"max_iterations": 5},
    "sweep": {"r_list": [1], "d_list": [2, 3], "trials": 1,
              "tensor_points": 100, "cpd_restarts": 2,
              "max_iterations": 4, "rank_scan": False},
}


@pytest.fixture(scope="module")
def small_config():
    return PipelineConfig(SMALL_OVERRIDES, seed=7)


@pytest.fixture(scope="module")
def pipeline_dir(tmp_path_factory, small_config):
    out = tmp_path_factory.mktemp("pipeline")
    cmd_generate(small_config, str(out))
    return out


class TestConfig:
    def test_default_sweep_grid_is_paper_scale(self):
        sw = DEFAULT_CONFIG["sweep"]
        assert len(sw["r_list"]) * len(sw["d_list"]) * sw["trials"] == 300

    def test_defaults_match_benchmark_settings(self):
        exc = DEFAULT_CONFIG["excitation"]
        assert exc["samples_per_period"] == 8192
        assert exc["fs"] == 750.0
        assert exc["band"] == [5.0, 150.0]
        assert exc["train_rms"] == 55.0
        assert exc["test_rms"] == 50.0
        assert DEFAULT_CONFIG["model"]["order"] == 3

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config key"):
            PipelineConfig({"excitaton": {}})

    def test_band_misconfiguration_rejected(self):
        with pytest.raises(ValueError):
            PipelineConfig({"excitation": {"band": [150.0, 5.0]}})

    def test_seed_override(self):
        cfg = PipelineConfig(SMALL_OVERRIDES, seed=99)
        assert cfg.seed == 99

    def test_from_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(SMALL_OVERRIDES))
        cfg = PipelineConfig.from_file(path, seed=3)
        assert cfg.data["model"]["order"] == 2


class TestGenerate:
    def test_writes_four_datasets_with_sidecars(self, pipeline_dir):
        for name in ("train", "validation", "test_multisine", "test_sweptsine"):
            assert (pipeline_dir / f"{name}.csv").exists()
            assert (pipeline_dir / f"{name}.csv.json").exists()
        assert (pipeline_dir / "manifest_generate.json").exists()

    def test_train_rms_level(self, pipeline_dir):
        train = load_dataset(pipeline_dir / "train.csv")
        assert train.u.rms() == pytest.approx(55.0, rel=1e-3)

    def test_split_realizations(self, pipeline_dir):
        train = load_dataset(pipeline_dir / "train.csv")
        parts = split_realizations(train)
        assert len(parts) == 2
        assert all(p.periods == 2 for p in parts)
        assert not np.array_equal(parts[0].u.samples, parts[1].u.samples)

    def test_same_seed_byte_identical(self, small_config, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        cmd_generate(small_config, str(out_a))
        cmd_generate(small_config, str(out_b))
        for name in ("train.csv", "validation.csv", "test_multisine.csv",
                     "test_sweptsine.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_different_seed_differs(self, small_config, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        cmd_generate(small_config, str(out_a))
        cmd_generate(PipelineConfig(SMALL_OVERRIDES, seed=8), str(out_b))
        assert (out_a / "train.csv").read_bytes() != (out_b / "train.csv").read_bytes()

    def test_manifest_digests_verify(self, pipeline_dir):
        assert RunManifest.verify(pipeline_dir / "manifest_generate.json") == []


class TestIdentify:
    def test_missing_datasets_actionable_error(self, small_config, tmp_path):
        with pytest.raises(FileNotFoundError, match="generate"):
            cmd_identify(small_config, str(tmp_path / "empty"))

    def test_identify_writes_models_and_logs(self, small_config, pipeline_dir, capsys):
        model, report = cmd_identify(small_config, str(pipeline_dir))
        out = capsys.readouterr().out
        assert "nonlinear parameters" in out
        assert (pipeline_dir / "bla.csv").exists()
        assert (pipeline_dir / "linear_model.json").exists()
        assert (pipeline_dir / "pnlss_model.json").exists()
        assert (pipeline_dir / "training_log.csv").exists()
        # printed count satisfies the combinatorial formula for the block
        n = model.order
        assert model.nonlinear_parameter_count == len(model.state_basis) * n

    def test_training_data_rms_consistency(self, pipeline_dir):
        # evaluating the stored model on its training record reproduces the
        # training report's rms
        model = PnlssModel.load(pipeline_dir / "pnlss_model.json")
        train = split_realizations(load_dataset(pipeline_dir / "train.csv"))[0]
        log = (pipeline_dir / "training_log.csv").read_text().splitlines()
        err = output_error_db(model, train)
        # the stored log carries per-iteration costs; compare with a direct
        # recomputation of the selected model instead
        assert np.isfinite(err)
        from pnlssdec.cli import PipelineConfig as _PC  # determinism helper
        model2, report2 = cmd_identify(PipelineConfig(SMALL_OVERRIDES, seed=7),
                                       str(pipeline_dir))
        assert err == pytest.approx(report2.train_rms_db, abs=0.01)


# the tiny config yields an effectively linear full model, so the sweep runs
# through its zero-tensor/ridge fallbacks by design
@pytest.mark.filterwarnings("ignore::RuntimeWarning")
class TestDecouple:
    def test_missing_model_actionable_error(self, small_config, pipeline_dir, tmp_path):
        with pytest.raises(FileNotFoundError, match="identify"):
            cmd_decouple(small_config, str(tmp_path / "nothing"))

    def test_sweep_outputs(self, small_config, pipeline_dir, capsys):
        report, best = cmd_decouple(small_config, str(pipeline_dir))
        out = capsys.readouterr().out
        assert "parameter count vs best multisine-test rms" in out
        lines = (pipeline_dir / "sweep.csv").read_text().splitlines()
        assert len(lines) == 1 + 1 * 2 * 1  # header + r x d x trials
        assert (pipeline_dir / "decoupled_model.json").exists()
        assert RunManifest.verify(pipeline_dir / "manifest_decouple.json") == []

    def test_sweep_deterministic(self, small_config, pipeline_dir):
        first = (pipeline_dir / "sweep.csv").read_text()
        cmd_decouple(small_config, str(pipeline_dir))
        assert (pipeline_dir / "sweep.csv").read_text() == first


class TestEvaluate:
    def test_evaluate_linear_model(self, small_config, pipeline_dir, tmp_path):
        out = tmp_path / "eval"
        level = cmd_evaluate(str(pipeline_dir / "linear_model.json"),
                             str(pipeline_dir / "test_multisine.csv"),
                             small_config, str(out))
        assert np.isfinite(level)
        assert (out / "error_time.csv").exists()
        assert (out / "error_spectrum.csv").exists()

    def test_evaluate_decoupled_emits_branches(self, small_config, pipeline_dir,
                                               tmp_path):
        out = tmp_path / "eval_dec"
        cmd_evaluate(str(pipeline_dir / "decoupled_model.json"),
                     str(pipeline_dir / "test_multisine.csv"),
                     small_config, str(out))
        header = (out / "branches.csv").read_text().splitlines()[0]
        assert header == "branch,s_tilde,g"

    def test_zero_dataset_zero_error(self, small_config, pipeline_dir, tmp_path):
        zeros = Dataset(Signal(np.zeros(512), 750.0), Signal(np.zeros(512), 750.0),
                        label="zeros")
        path = tmp_path / "zeros.csv"
        save_dataset(zeros, path)
        level = cmd_evaluate(str(pipeline_dir / "linear_model.json"), str(path),
                             small_config, str(tmp_path / "out"))
        assert level == float("-inf")

    def test_rate_mismatch_rejected(self, small_config, pipeline_dir, tmp_path):
        ds = Dataset(Signal(np.ones(10), 100.0), Signal(np.ones(10), 100.0))
        path = tmp_path / "bad.csv"
        save_dataset(ds, path)
        with pytest.raises(ValueError, match="rate"):
            cmd_evaluate(str(pipeline_dir / "linear_model.json"), str(path),
                         small_config, str(tmp_path / "out"))


class TestMain:
    def test_bad_config_exit_code(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{\"nope\": 1}")
        assert main(["generate", "--config", str(bad), "--out", str(tmp_path)]) == 2

    def test_missing_inputs_exit_code(self, tmp_path, capsys):
        assert main(["identify", "--out", str(tmp_path / "none")]) == 1
        assert "generate" in capsys.readouterr().err

    def test_generate_then_evaluate_via_main(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(SMALL_OVERRIDES))
        out = tmp_path / "run"
        assert main(["generate", "--config", str(cfg_path), "--seed", "3",
                     "--out", str(out)]) == 0
        assert (out / "train.csv").exists()
