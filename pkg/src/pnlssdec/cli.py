"""Pipeline commands: generate, identify, decouple, evaluate.

Each command is a pure function of (config, input files): all randomness
derives from the master seed, outputs are written atomically with fixed
formatting, and every run emits a manifest listing the produced files with
content digests.  Plot-style outputs are data-only CSVs.
"""

import argparse
import copy
import hashlib
import json
import sys
import time

import numpy as np

from .boucwen import BoucWenParams, SimConfig, make_benchmark_datasets
from .decouple import (DecoupledModel, estimate_rank, sampling_scales,
                       build_jacobian_tensor, check_uniqueness, sweep_and_select)
from .levmarq import LmOptions
from .linid import LinearModel, estimate_bla, fit_linear_model, output_error_db
from .pnlss import (MonomialBasis, PnlssModel, TrainOptions, monomial_count,
                    train_pnlss)
from .signals import (Dataset, MultisineSpec, Signal, SweptSineSpec,
                      load_dataset, save_dataset)
from .util import atomic_write_text, derive_seed, load_json, save_json, sha256_file

__all__ = ["PipelineConfig", "RunManifest", "cmd_generate", "cmd_identify",
           "cmd_decouple", "cmd_evaluate", "main", "DEFAULT_CONFIG"]


DEFAULT_CONFIG = {
    "seed": 0,
    "bouc_wen": {"m": 2.0, "c": 10.0, "k": 5.0e4, "alpha": 5.0e4,
                 "beta": 1.0e3, "gamma": 0.8, "delta": -1.1, "nu": 1.0},
    "integration": {"oversample": 20, "newmark_beta": 0.25, "newmark_gamma": 0.5,
                    "newton_tol": 1.0e-10, "newton_max_iter": 50},
    "excitation": {
        "samples_per_period": 8192,
        "fs": 750.0,
        "band": [5.0, 150.0],
        "train_rms": 55.0,
        "test_rms": 50.0,
        "train_realizations": 4,
        "retained_periods": 2,
        "transient_periods": 1,
        "sweptsine": {"f_start": 20.0, "f_end": 50.0,
                      "rate_hz_per_min": 10.0, "amplitude": 50.0},
    },
    "model": {"order": 3, "state_degrees": [2, 3], "output_degrees": []},
    "training": {"max_iterations": 100, "lambda_init": 1.0e-3,
                 "lambda_factor": 10.0, "lambda_cap": 1.0e10,
                 "ftol": 0.0, "ftol_patience": 3},
    "sweep": {"r_list": [1, 2, 3, 4, 5, 6],
              "d_list": [2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
              "trials": 5,
              "tensor_points": 500,
              "cpd_restarts": 5,
              "max_iterations": 100,
              "ftol": 1.0e-8,
              "ftol_patience": 5,
              "rank_scan": True,
              "rank_tol": 1.0e-3},
}


def _merge_validate(defaults, override, path=""):
    merged = copy.deepcopy(defaults)
    for key, value in override.items():
        if key not in defaults:
            raise ValueError(f"unknown config key '{path}{key}'")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ValueError(f"config key '{path}{key}' must be an object")
            merged[key] = _merge_validate(defaults[key], value, f"{path}{key}.")
        else:
            merged[key] = value
    return merged


class PipelineConfig:
    """Resolved pipeline configuration (user values over full defaults)."""

    def __init__(self, overrides=None, seed=None):
        self.data = _merge_validate(DEFAULT_CONFIG, overrides or {})
        if seed is not None:
            self.data["seed"] = int(seed)
        if self.data["seed"] is None:
            raise ValueError("a master seed is required")
        # construct eagerly so bad values fail at load time
        self.bouc_wen_params()
        self.sim_config()
        self.train_spec()
        self.test_multisine_spec()
        self.sweptsine_spec()

    @classmethod
    def from_file(cls, path, seed=None):
        return cls(load_json(path), seed=seed)

    @property
    def seed(self):
        return self.data["seed"]

    def bouc_wen_params(self):
        return BoucWenParams(**self.data["bouc_wen"])

    def sim_config(self):
        return SimConfig(**self.data["integration"])

    def _multisine(self, rms_level, seed_label):
        exc = self.data["excitation"]
        return MultisineSpec(
            samples_per_period=exc["samples_per_period"],
            fs=exc["fs"],
            band_low=exc["band"][0],
            band_high=exc["band"][1],
            target_rms=rms_level,
            period_count=exc["retained_periods"],
            seed=derive_seed(self.seed, seed_label),
        )

    def train_spec(self):
        return self._multisine(self.data["excitation"]["train_rms"], "excitation:train")

    def test_multisine_spec(self):
        return self._multisine(self.data["excitation"]["test_rms"], "excitation:test")

    def sweptsine_spec(self):
        ss = self.data["excitation"]["sweptsine"]
        return SweptSineSpec(ss["f_start"], ss["f_end"], ss["rate_hz_per_min"],
                             ss["amplitude"], self.data["excitation"]["fs"])

    def _lm(self, section):
        return LmOptions(max_iter=section["max_iterations"],
                         lambda_init=section["lambda_init"],
                         lambda_factor=section["lambda_factor"],
                         lambda_cap=section["lambda_cap"],
                         ftol=section["ftol"],
                         ftol_patience=section["ftol_patience"])

    def train_options(self):
        return TrainOptions(lm=self._lm(self.data["training"]),
                            transient_periods=1)

    def sweep_options(self):
        sw = self.data["sweep"]
        lm = LmOptions(max_iter=sw["max_iterations"],
                       lambda_init=self.data["training"]["lambda_init"],
                       lambda_factor=self.data["training"]["lambda_factor"],
                       lambda_cap=self.data["training"]["lambda_cap"],
                       ftol=sw["ftol"], ftol_patience=sw["ftol_patience"])
        return TrainOptions(lm=lm, transient_periods=1)

    def config_hash(self):
        text = json.dumps(self.data, sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()


class RunManifest:
    """Record of one pipeline stage: config digest, files, timings, versions."""

    def __init__(self, stage, config):
        self.stage = stage
        self.config_sha256 = config.config_hash()
        self.files = []
        self.timings = {}
        self._t0 = time.time()

    def add(self, path):
        self.files.append({"path": str(path), "sha256": sha256_file(path)})

    def mark(self, label):
        self.timings[label] = round(time.time() - self._t0, 3)
        self._t0 = time.time()

    def write(self, path):
        import scipy

        payload = {
            "stage": self.stage,
            "config_sha256": self.config_sha256,
            "files": self.files,
            "timings_s": self.timings,
            "versions": {
                "python": sys.version.split()[0],
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pnlssdec": __import__("pnlssdec").__version__,
            },
        }
        save_json(path, payload)

    @staticmethod
    def verify(path):
        """Re-hash every listed file; returns the list of mismatches."""
        import os

        payload = load_json(path)
        base = os.path.dirname(os.path.abspath(path))
        bad = []
        for entry in payload["files"]:
            target = entry["path"]
            if not os.path.isabs(target):
                target = os.path.join(base, target)
            if not os.path.exists(target) or sha256_file(target) != entry["sha256"]:
                bad.append(entry["path"])
        return bad


def _out_path(out_dir, name):
    import os

    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def _concat_train(datasets):
    """Stack the train realizations into one record for persistence."""
    u = np.concatenate([ds.u.samples for ds in datasets])
    y = np.concatenate([ds.y.samples for ds in datasets])
    first = datasets[0]
    meta = dict(first.meta)
    meta["realizations"] = len(datasets)
    u_sig = Signal(u, first.fs, dict(first.u.meta))
    y_sig = Signal(y, first.fs, dict(first.y.meta))
    return Dataset(u_sig, y_sig, label="train",
                   periods=first.periods * len(datasets),
                   samples_per_period=first.samples_per_period, meta=meta)


def split_realizations(dataset):
    """Undo :func:`_concat_train` using the sidecar realization count."""
    count = dataset.meta.get("realizations", 1)
    if count == 1:
        return [dataset]
    periods = dataset.periods // count
    block = periods * dataset.samples_per_period
    out = []
    for i in range(count):
        sl = slice(i * block, (i + 1) * block)
        out.append(Dataset(
            Signal(dataset.u.samples[sl].copy(), dataset.fs, dict(dataset.u.meta)),
            Signal(dataset.y.samples[sl].copy(), dataset.fs, dict(dataset.y.meta)),
            label=dataset.label, periods=periods,
            samples_per_period=dataset.samples_per_period,
            meta={k: v for k, v in dataset.meta.items() if k != "realizations"}))
    return out


def cmd_generate(config, out_dir):
    """Simulate and persist the train/validation/test records."""
    manifest = RunManifest("generate", config)
    exc = config.data["excitation"]
    data = make_benchmark_datasets(
        config.bouc_wen_params(),
        config.train_spec(),
        {"multisine": config.test_multisine_spec(),
         "sweptsine": config.sweptsine_spec()},
        config.sim_config(),
        train_realizations=exc["train_realizations"],
        transient_periods=exc["transient_periods"],
    )
    manifest.mark("simulate")

    files = {
        "train.csv": _concat_train(data["train"]),
        "validation.csv": data["validation"],
        "test_multisine.csv": data["test_multisine"],
        "test_sweptsine.csv": data["test_sweptsine"],
    }
    for name, dataset in files.items():
        path = _out_path(out_dir, name)
        save_dataset(dataset, path)
        manifest.add(path)
        manifest.add(path + ".json")
    config_path = _out_path(out_dir, "config_resolved.json")
    save_json(config_path, config.data)
    manifest.add(config_path)
    manifest.mark("write")
    manifest.write(_out_path(out_dir, "manifest_generate.json"))
    print(f"generate: wrote {len(files)} datasets to {out_dir} "
          f"(train rms {files['train.csv'].u.rms():.2f} N)")
    return data


def _load_stage_datasets(out_dir):
    import os

    needed = ["train.csv", "validation.csv", "test_multisine.csv", "test_sweptsine.csv"]
    missing = [n for n in needed if not os.path.exists(os.path.join(out_dir, n))]
    if missing:
        raise FileNotFoundError(
            f"missing {', '.join(missing)} in {out_dir}; run `pnlssdec generate` first")
    train_all = load_dataset(os.path.join(out_dir, "train.csv"))
    return {
        "train": split_realizations(train_all),
        "validation": load_dataset(os.path.join(out_dir, "validation.csv")),
        "test_multisine": load_dataset(os.path.join(out_dir, "test_multisine.csv")),
        "test_sweptsine": load_dataset(os.path.join(out_dir, "test_sweptsine.csv")),
    }


def _error_or_nan(model, dataset):
    from .errors import SimulationError

    try:
        return output_error_db(model, dataset)
    except (SimulationError, ValueError):
        return float("nan")


def cmd_identify(config, out_dir):
    """BLA, linear model, and full polynomial model training."""
    manifest = RunManifest("identify", config)
    data = _load_stage_datasets(out_dir)

    bla = estimate_bla(data["train"])
    bla_path = _out_path(out_dir, "bla.csv")
    bla.to_csv(bla_path)
    manifest.add(bla_path)
    manifest.mark("bla")

    order = config.data["model"]["order"]
    linear = fit_linear_model(bla, order)
    lin_path = _out_path(out_dir, "linear_model.json")
    linear.save(lin_path)
    manifest.add(lin_path)
    manifest.mark("linear")

    init = PnlssModel.from_linear(linear,
                                  state_degrees=config.data["model"]["state_degrees"],
                                  output_degrees=config.data["model"]["output_degrees"])
    model, report = train_pnlss(init, data["train"][0], data["validation"],
                                config.train_options())
    model_path = _out_path(out_dir, "pnlss_model.json")
    model.save(model_path)
    manifest.add(model_path)
    log_path = _out_path(out_dir, "training_log.csv")
    report.to_csv(log_path)
    manifest.add(log_path)
    manifest.mark("pnlss")

    n = linear.order
    degrees = config.data["model"]["state_degrees"]
    state_terms = len(model.state_basis) * n
    rows = [
        ("linear", 0, _error_or_nan(linear, data["test_multisine"]),
         _error_or_nan(linear, data["test_sweptsine"])),
        ("pnlss", model.nonlinear_parameter_count,
         _error_or_nan(model, data["test_multisine"]),
         _error_or_nan(model, data["test_sweptsine"])),
    ]
    print(f"identify: model order {n}, state degrees {degrees}, "
          f"{model.nonlinear_parameter_count} nonlinear parameters "
          f"(state-equation block {state_terms}, "
          f"full-count formula {monomial_count(n, max(degrees))})")
    print(f"{'model':<8} {'nl params':>9} {'test multisine':>15} {'test sweptsine':>15}")
    for name, params, ms, ss in rows:
        print(f"{name:<8} {params:>9d} {ms:>12.2f} dB {ss:>12.2f} dB")
    manifest.write(_out_path(out_dir, "manifest_identify.json"))
    return model, report


def cmd_decouple(config, out_dir, workers=1):
    """Branch/degree sweep with validation-based selection."""
    import os

    manifest = RunManifest("decouple", config)
    model_path = os.path.join(out_dir, "pnlss_model.json")
    if not os.path.exists(model_path):
        raise FileNotFoundError(
            f"missing pnlss_model.json in {out_dir}; run `pnlssdec identify` first")
    model = PnlssModel.load(model_path)
    data = _load_stage_datasets(out_dir)
    datasets = {
        "train": data["train"][0],
        "validation": data["validation"],
        "test_multisine": data["test_multisine"],
        "test_sweptsine": data["test_sweptsine"],
    }
    sw = config.data["sweep"]

    scale = sampling_scales(model, datasets["train"].u.samples)
    if sw["rank_scan"]:
        tensor = build_jacobian_tensor(model, sw["tensor_points"],
                                       seed=derive_seed(config.seed, "rankscan"),
                                       scale=scale, verify=False)
        scan = estimate_rank(tensor, max(sw["r_list"]), tol=sw["rank_tol"],
                             restarts=sw["cpd_restarts"],
                             seed=derive_seed(config.seed, "rankscan"))
        curve = ", ".join(f"r={idx + 1}: {err:.2e}"
                          for idx, err in enumerate(scan.fit_errors))
        print(f"decouple: rank scan -> {scan.rank} "
              f"({'converged' if scan.converged else 'tolerance not reached'}; {curve})")
        print(f"decouple: uniqueness inequality at model order n={model.order}: "
              + ", ".join(f"r={r}: {check_uniqueness(model.order, r)}"
                          for r in sw["r_list"]))
    manifest.mark("rank_scan")

    report, best = sweep_and_select(
        model, datasets,
        r_list=sw["r_list"], d_list=sw["d_list"], trials=sw["trials"],
        options=config.sweep_options(),
        seed=derive_seed(config.seed, "sweep"),
        n_points=sw["tensor_points"], cpd_restarts=sw["cpd_restarts"],
        scale=scale, workers=workers,
    )
    manifest.mark("sweep")

    sweep_path = _out_path(out_dir, "sweep.csv")
    report.to_csv(sweep_path)
    manifest.add(sweep_path)
    if best is not None:
        best_path = _out_path(out_dir, "decoupled_model.json")
        best.save(best_path)
        manifest.add(best_path)

    failures = [rec for rec in report.records if rec.status != "ok"]
    if failures:
        print(f"decouple: {len(failures)} of {len(report.records)} trials failed "
              "(recorded in sweep.csv)")

    # error versus parameter count, minimum over trials (trade-off summary)
    print("decouple: parameter count vs best multisine-test rms (dB)")
    by_cfg = {}
    for rec in report.records:
        if rec.status != "ok" or not np.isfinite(rec.test_ms_rms_db):
            continue
        key = (rec.param_count, rec.r, rec.d)
        by_cfg[key] = min(by_cfg.get(key, np.inf), rec.test_ms_rms_db)
    for (count, r, d), err in sorted(by_cfg.items()):
        print(f"  params={count:3d} (r={r}, d={d:2d})  test rms {err:8.2f} dB")
    if report.best_record is not None:
        rec = report.best_record
        print(f"decouple: selected r={rec.r}, d={rec.d} "
              f"({rec.param_count} nonlinear parameters, "
              f"validation {rec.val_rms_db:.2f} dB, "
              f"multisine test {rec.test_ms_rms_db:.2f} dB)")
    manifest.write(_out_path(out_dir, "manifest_decouple.json"))
    return report, best


def _load_model(path):
    data = load_json(path)
    kind = data.get("kind")
    if kind == "linear":
        return LinearModel.from_dict(data)
    if kind == "pnlss":
        return PnlssModel.from_dict(data)
    if kind == "decoupled":
        return DecoupledModel.from_dict(data)
    raise ValueError(f"unrecognized model kind {kind!r} in {path}")


def cmd_evaluate(model_file, dataset_file, config, out_dir):
    """Score a stored model on a stored dataset; emit plot-data CSVs."""
    from .linid import simulate_record
    from .signals import rms_db

    manifest = RunManifest("evaluate", config)
    model = _load_model(model_file)
    dataset = load_dataset(dataset_file)
    model_fs = model.linear.fs if hasattr(model, "linear") else model.fs
    if model_fs != dataset.fs:
        raise ValueError(f"model rate {model_fs} Hz != dataset rate {dataset.fs} Hz")

    y_model = simulate_record(model, dataset)
    error = y_model - dataset.y.samples
    level = rms_db(error)
    manifest.mark("simulate")

    t = dataset.u.time()
    rows = ["time_s,y_true,y_model,error"]
    for i in range(t.size):
        rows.append(f"{t[i]:.17g},{dataset.y.samples[i]:.17g},"
                    f"{y_model[i]:.17g},{error[i]:.17g}")
    time_path = _out_path(out_dir, "error_time.csv")
    atomic_write_text(time_path, "\n".join(rows) + "\n")
    manifest.add(time_path)

    if dataset.periods is not None:
        from .linid import _dataset_lines

        ns = dataset.samples_per_period
        lines = _dataset_lines(dataset)
        err_spec = np.abs(np.fft.rfft(error.reshape(-1, ns), axis=1)).mean(0) / ns
        out_spec = np.abs(np.fft.rfft(dataset.y.samples.reshape(-1, ns),
                                      axis=1)).mean(0) / ns
        rows = ["freq_hz,output_db,error_db"]
        for k in lines:
            rows.append(f"{k * dataset.fs / ns:.17g},"
                        f"{20 * np.log10(max(out_spec[k], 1e-300)):.17g},"
                        f"{20 * np.log10(max(err_spec[k], 1e-300)):.17g}")
        spec_path = _out_path(out_dir, "error_spectrum.csv")
        atomic_write_text(spec_path, "\n".join(rows) + "\n")
        manifest.add(spec_path)

    if isinstance(model, DecoupledModel) and model.branch_count:
        _, states = model.simulate_with_states(dataset.u.samples)
        s_tilde = model.branch_inputs(states, dataset.u.samples)
        values = model.branch_values(s_tilde)
        rows = ["branch,s_tilde,g"]
        for l in range(model.branch_count):
            for i in range(0, s_tilde.shape[0]):
                rows.append(f"{l},{s_tilde[i, l]:.17g},{values[i, l]:.17g}")
        branch_path = _out_path(out_dir, "branches.csv")
        atomic_write_text(branch_path, "\n".join(rows) + "\n")
        manifest.add(branch_path)

    manifest.mark("write")
    manifest.write(_out_path(out_dir, "manifest_evaluate.json"))
    print(f"evaluate: rms error {level:.2f} dB "
          f"({model.__class__.__name__} on {dataset.label or 'dataset'})")
    return level


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="pnlssdec",
        description="Hysteretic-benchmark nonlinear state-space identification "
                    "and polynomial decoupling pipeline")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [("generate", "simulate benchmark datasets"),
                       ("identify", "BLA, linear and full polynomial models"),
                       ("decouple", "branch/degree sweep and model selection"),
                       ("evaluate", "score a model file on a dataset file")]:
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", help="JSON config (merged over defaults)")
        cmd.add_argument("--out", default="pnlssdec_out", help="output directory")
        cmd.add_argument("--seed", type=int, help="master seed override")
        cmd.add_argument("--workers", type=int, default=1,
                         help="parallel trials for the sweep")
        if name == "evaluate":
            cmd.add_argument("--model", required=True, help="model JSON file")
            cmd.add_argument("--dataset", required=True, help="dataset CSV file")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.config:
            config = PipelineConfig.from_file(args.config, seed=args.seed)
        else:
            config = PipelineConfig(seed=args.seed)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"pnlssdec {args.command}: config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "generate":
            cmd_generate(config, args.out)
        elif args.command == "identify":
            cmd_identify(config, args.out)
        elif args.command == "decouple":
            cmd_decouple(config, args.out, workers=args.workers)
        elif args.command == "evaluate":
            cmd_evaluate(args.model, args.dataset, config, args.out)
    except Exception as exc:
        print(f"pnlssdec {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
