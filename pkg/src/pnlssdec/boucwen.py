"""Hysteretic oscillator benchmark: simulation and benchmark dataset assembly.

The simulated plant is a single-mass oscillator with an internal hysteretic
restoring state,

    m y'' + c y' + k y + z = u(t)
    z'   = alpha y' - beta (gamma |y'| |z|^(nu-1) z + delta y' |z|^nu)

integrated with an implicit Newmark scheme on an oversampled grid and
subsampled back to the excitation rate.
"""

from dataclasses import asdict, dataclass, replace

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import DivergenceError, NewtonConvergenceError
from .signals import Dataset, Signal, generate_multisine, generate_swept_sine
from .util import derive_seed

__all__ = [
    "BoucWenParams",
    "SimConfig",
    "simulate",
    "linearized_model",
    "natural_frequency",
    "make_benchmark_datasets",
]


@dataclass(frozen=True)
class BoucWenParams:
    """Oscillator coefficients (SI units).

    ``benchmark()`` returns the data-generation values used throughout.
    """

    m: float = 2.0
    c: float = 10.0
    k: float = 5.0e4
    alpha: float = 5.0e4
    beta: float = 1.0e3
    gamma: float = 0.8
    delta: float = -1.1
    nu: float = 1.0

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if self.k <= 0:
            raise ValueError("stiffness must be positive")
        if self.nu < 1:
            raise ValueError("nu must be at least 1")

    @classmethod
    def benchmark(cls):
        return cls()


@dataclass(frozen=True)
class SimConfig:
    """Time-integration configuration.

    The default Newmark constants (1/4, 1/2) give the unconditionally
    stable constant-average-acceleration scheme; ``oversample`` integrates
    on a grid that much finer than the excitation rate, with plain
    subsampling back (the excitation is band-limited far below the fine
    Nyquist rate).
    """

    oversample: int = 20
    newmark_beta: float = 0.25
    newmark_gamma: float = 0.5
    newton_tol: float = 1.0e-10
    newton_max_iter: int = 50

    def __post_init__(self):
        if self.oversample < 1 or int(self.oversample) != self.oversample:
            raise ValueError("oversample must be a positive integer")
        if not 0.0 < self.newmark_beta <= 0.5:
            raise ValueError("newmark_beta must lie in (0, 0.5]")
        if not 0.0 <= self.newmark_gamma <= 1.0:
            raise ValueError("newmark_gamma must lie in [0, 1]")
        if self.newton_tol <= 0 or self.newton_max_iter < 1:
            raise ValueError("invalid Newton settings")


def _integrate(params, u_samples, fs, cfg):
    """Run the Newmark kernel at rate ``fs``; returns (y, v, z)."""
    tol = cfg.newton_tol * max(1.0, float(np.max(np.abs(u_samples))))
    status, index, y, v, z = _kernels.bw_newmark(
        np.ascontiguousarray(u_samples, dtype=float),
        1.0 / fs,
        params.m, params.c, params.k,
        params.alpha, params.beta, params.gamma, params.delta, params.nu,
        cfg.newmark_beta, cfg.newmark_gamma,
        tol, cfg.newton_max_iter,
    )
    if status == 1:
        raise NewtonConvergenceError(index)
    if status == 2:
        raise DivergenceError(index)
    return y, v, z


def _fourier_upsample(samples, factor):
    """Zero-padded-spectrum interpolation; exact for periodic band-limited records."""
    n = samples.size
    spectrum = np.fft.rfft(samples)
    return np.fft.irfft(spectrum, n=n * factor) * factor


def simulate(params, u, cfg=None, label="", u_fine=None, full_output=False):
    """Simulate the hysteretic oscillator driven by ``u``.

    Integration runs at ``cfg.oversample`` times the rate of ``u`` and the
    output is subsampled back, so the returned dataset is sampled like the
    input.  When no explicit fine-rate input ``u_fine`` is supplied the
    input is interpolated by Fourier zero padding, which is exact for the
    periodic band-limited excitations used here; for aperiodic inputs pass
    the analytically generated fine signal instead.

    Parameters
    ----------
    params : BoucWenParams
    u : Signal
        Excitation at the output rate.
    cfg : SimConfig, optional
    label : str
        Dataset split label.
    u_fine : Signal, optional
        Excitation evaluated on the fine grid (len(u) * oversample).
    full_output : bool
        Also return velocity and hysteretic-state trajectories.

    Returns
    -------
    Dataset, or (Dataset, dict) when ``full_output`` is set.
    """
    cfg = cfg or SimConfig()
    if u_fine is not None:
        fine = u_fine.samples
        if fine.size != len(u) * cfg.oversample:
            raise ValueError("u_fine length must be len(u) * oversample")
        fs_fine = u_fine.fs
    elif cfg.oversample == 1:
        fine = u.samples
        fs_fine = u.fs
    else:
        fine = _fourier_upsample(u.samples, cfg.oversample)
        fs_fine = u.fs * cfg.oversample

    y_fine, v_fine, z_fine = _integrate(params, fine, fs_fine, cfg)
    step = cfg.oversample
    y = Signal(y_fine[::step].copy(), u.fs, {"kind": "displacement"})

    periods = None
    ns = None
    spec = u.meta.get("spec") if isinstance(u.meta, dict) else None
    if u.meta.get("kind") == "multisine" and spec is not None:
        periods = spec["period_count"]
        ns = spec["samples_per_period"]

    ds = Dataset(u, y, label=label, periods=periods, samples_per_period=ns,
                 meta={"params": asdict(params), "sim": asdict(cfg)})
    if not full_output:
        return ds
    info = {
        "velocity": v_fine[::step].copy(),
        "hysteretic_state": z_fine[::step].copy(),
    }
    return ds, info


def linearized_model(params, fs):
    """Discrete-time linearization of the oscillator about the origin.

    The hysteretic rate linearizes to ``z' = alpha y'``, so with zero
    initial conditions ``z = alpha y`` identically and the input/output
    behaviour collapses to the second-order system
    ``m y'' + c y' + (k + alpha) y = u``.  That minimal realization is
    discretized exactly (zero-order hold); the full three-state form would
    carry an uncontrollable integrator mode sitting on the unit circle.
    """
    from .linid import LinearModel

    a_ct = np.array([[0.0, 1.0], [-(params.k + params.alpha) / params.m, -params.c / params.m]])
    b_ct = np.array([0.0, 1.0 / params.m])
    c_out = np.array([1.0, 0.0])
    block = np.zeros((3, 3))
    block[:2, :2] = a_ct
    block[:2, 2] = b_ct
    expm = scipy.linalg.expm(block / fs)
    return LinearModel(expm[:2, :2], expm[:2, 2], c_out, 0.0, fs)


def natural_frequency(model):
    """Undamped natural frequency (Hz) of a discrete model's dominant poles.

    Maps the eigenvalues of A back to continuous time and returns the
    largest pole magnitude over 2*pi.
    """
    eig = np.linalg.eigvals(model.a)
    eig = eig[np.abs(eig) > 0]
    s = np.log(eig) * model.fs
    return float(np.max(np.abs(s)) / (2.0 * np.pi))


def _multisine_dataset(params, spec, cfg, transient_periods, label):
    """Simulate one multisine realization and discard its leading transient periods."""
    total = replace(spec, period_count=spec.period_count + transient_periods)
    u_coarse = generate_multisine(total)
    if cfg.oversample > 1:
        u_fine = generate_multisine(total, oversample=cfg.oversample)
        fine = u_fine.samples
        fs_fine = u_fine.fs
    else:
        fine = u_coarse.samples
        fs_fine = spec.fs

    y_fine, _, _ = _integrate(params, fine, fs_fine, cfg)
    y = y_fine[:: cfg.oversample]

    ns = spec.samples_per_period
    skip = transient_periods * ns
    meta = {"kind": "multisine", "spec": asdict(spec), "transient_periods": transient_periods}
    u_sig = Signal(u_coarse.samples[skip:].copy(), spec.fs, meta)
    y_sig = Signal(y[skip:].copy(), spec.fs, {"kind": "displacement"})
    return Dataset(u_sig, y_sig, label=label, periods=spec.period_count,
                   samples_per_period=ns,
                   meta={"params": asdict(params), "sim": asdict(cfg)})


def make_benchmark_datasets(params, train_spec, test_specs, cfg=None,
                            train_realizations=4, transient_periods=1):
    """Produce the train / validation / test records of the benchmark.

    Parameters
    ----------
    params : BoucWenParams
    train_spec : MultisineSpec
        Training excitation; ``period_count`` is the number of retained
        steady-state periods per realization.  Realization seeds derive
        from ``train_spec.seed``.
    test_specs : dict
        ``{"multisine": MultisineSpec, "sweptsine": SweptSineSpec}``.
    cfg : SimConfig, optional
    train_realizations : int
        Number of independent training phase realizations.
    transient_periods : int
        Leading periods simulated and discarded so every retained period is
        in periodic steady state.

    Returns
    -------
    dict with keys ``train`` (list of Dataset), ``validation``,
    ``test_multisine`` and ``test_sweptsine``.
    """
    cfg = cfg or SimConfig()
    if transient_periods < 1:
        raise ValueError("at least one transient period is required")

    train = []
    for i in range(train_realizations):
        spec_i = replace(train_spec, seed=derive_seed(train_spec.seed, f"train:{i}"))
        train.append(_multisine_dataset(params, spec_i, cfg, transient_periods, "train"))

    val_spec = replace(train_spec, seed=derive_seed(train_spec.seed, "validation"))
    validation = _multisine_dataset(params, val_spec, cfg, transient_periods, "validation")

    ms_spec = test_specs["multisine"]
    test_ms = _multisine_dataset(params, ms_spec, cfg, transient_periods, "test_multisine")

    ss_spec = test_specs["sweptsine"]
    u_ss = generate_swept_sine(ss_spec)
    if cfg.oversample > 1:
        u_ss_fine = generate_swept_sine(ss_spec, oversample=cfg.oversample)
        n = min(len(u_ss), len(u_ss_fine) // cfg.oversample)
        u_ss = Signal(u_ss.samples[:n].copy(), u_ss.fs, u_ss.meta)
        fine = u_ss_fine.samples[: n * cfg.oversample]
        fs_fine = u_ss_fine.fs
    else:
        fine = u_ss.samples
        fs_fine = u_ss.fs
    y_fine, _, _ = _integrate(params, fine, fs_fine, cfg)
    y_ss = Signal(y_fine[:: cfg.oversample].copy(), u_ss.fs, {"kind": "displacement"})
    test_ss = Dataset(u_ss, y_ss, label="test_sweptsine",
                      meta={"params": asdict(params), "sim": asdict(cfg)})

    return {
        "train": train,
        "validation": validation,
        "test_multisine": test_ms,
        "test_sweptsine": test_ss,
    }
