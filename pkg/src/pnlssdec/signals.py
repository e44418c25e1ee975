"""Excitation signals and spectral utilities.

Random-phase multisines and linear swept sines drive the benchmark
simulations.  This module also hosts the sampled-signal and input/output
dataset containers, their CSV persistence, and the rms/dB helpers used by
every evaluation routine.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .util import atomic_write_text, load_json, save_json

__all__ = [
    "MultisineSpec",
    "SweptSineSpec",
    "Signal",
    "Dataset",
    "generate_multisine",
    "generate_swept_sine",
    "rms",
    "rms_db",
    "db",
    "line_spectrum",
    "save_signal",
    "load_signal",
    "save_dataset",
    "load_dataset",
]


def rms(x):
    """Root-mean-square value of a sample array."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("rms of an empty signal is undefined")
    return float(np.sqrt(np.mean(x * x)))


def db(x):
    """Amplitude in dB, ``20 log10 |x|`` (elementwise)."""
    return 20.0 * np.log10(np.abs(x))


def rms_db(x):
    """rms level in dB: ``20 log10(rms)``.

    Accepts a :class:`Signal` or a plain array.  An identically zero signal
    returns ``-inf`` rather than raising, so callers can report "below
    numerical floor" distinctly.
    """
    value = rms(getattr(x, "samples", x))
    if value == 0.0:
        return float("-inf")
    return float(20.0 * np.log10(value))


@dataclass(frozen=True)
class MultisineSpec:
    """Random-phase multisine on a uniform DFT grid.

    ``samples_per_period`` must be an even power of two.  All lines with
    ``band_low <= k*fs/samples_per_period <= band_high`` are excited with
    equal amplitude and independent uniform phases in (-pi, pi); the
    synthesized signal is rescaled to ``target_rms``.
    """

    samples_per_period: int
    fs: float
    band_low: float
    band_high: float
    target_rms: float
    period_count: int = 1
    seed: int = 0

    def __post_init__(self):
        ns = self.samples_per_period
        if ns < 2 or ns & (ns - 1):
            raise ValueError("samples_per_period must be an even power of two")
        if self.fs <= 0:
            raise ValueError("fs must be positive")
        if not 0.0 <= self.band_low < self.band_high:
            raise ValueError("need 0 <= band_low < band_high")
        if self.band_high >= self.fs / 2:
            raise ValueError("band_high must stay below the Nyquist frequency")
        if self.target_rms <= 0:
            raise ValueError("target_rms must be positive")
        if self.period_count < 1:
            raise ValueError("period_count must be at least 1")
        if self.excited_lines().size == 0:
            raise ValueError(
                "no excited lines: band narrower than the line spacing "
                f"fs/Ns = {self.fs / ns:.6g} Hz"
            )

    def excited_lines(self):
        """Indices k of the excited DFT lines (DC always excluded)."""
        ns = self.samples_per_period
        k_min = max(1, math.ceil(self.band_low * ns / self.fs - 1e-9))
        k_max = math.floor(self.band_high * ns / self.fs + 1e-9)
        return np.arange(k_min, k_max + 1, dtype=int)

    def line_frequencies(self):
        return self.excited_lines() * self.fs / self.samples_per_period


@dataclass(frozen=True)
class SweptSineSpec:
    """Linear swept sine (chirp) with constant amplitude.

    When ``duration`` is omitted it follows from the sweep rate:
    ``(f_end - f_start) / sweep_rate`` minutes.  The instantaneous frequency
    always ramps linearly from ``f_start`` to ``f_end`` over the resolved
    duration, so an explicit duration with ``f_start == f_end`` yields a
    constant-frequency sine.
    """

    f_start: float
    f_end: float
    sweep_rate: float  # Hz per minute
    amplitude: float
    fs: float
    duration: float = None  # seconds

    def __post_init__(self):
        if self.f_start < 0 or self.f_end < self.f_start:
            raise ValueError("need 0 <= f_start <= f_end")
        if self.sweep_rate <= 0:
            raise ValueError("sweep_rate must be positive")
        if self.amplitude <= 0:
            raise ValueError("amplitude must be positive")
        if self.fs <= 0:
            raise ValueError("fs must be positive")
        if self.duration is not None and self.duration <= 0:
            raise ValueError("duration must be positive when given")
        if self.resolved_duration() <= 0:
            raise ValueError("zero-width sweep needs an explicit duration")

    def resolved_duration(self):
        if self.duration is not None:
            return float(self.duration)
        return (self.f_end - self.f_start) / self.sweep_rate * 60.0


@dataclass
class Signal:
    """Uniformly sampled real signal with its sampling rate and provenance."""

    samples: np.ndarray
    fs: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")
        if self.fs <= 0:
            raise ValueError("fs must be positive")
        self.fs = float(self.fs)

    def __len__(self):
        return self.samples.size

    def time(self):
        return np.arange(self.samples.size) / self.fs

    def rms(self):
        return rms(self.samples)


@dataclass
class Dataset:
    """One input/output record of a simulated experiment.

    ``periods``/``samples_per_period`` are set for periodic steady-state
    records (multisine experiments) and ``None`` for aperiodic ones (swept
    sine); evaluation routines use them for transient handling.
    """

    u: Signal
    y: Signal
    label: str = ""
    periods: int = None
    samples_per_period: int = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.u) != len(self.y):
            raise ValueError("input and output must have the same length")
        if self.u.fs != self.y.fs:
            raise ValueError("input and output must share the sampling rate")
        if (self.periods is None) != (self.samples_per_period is None):
            raise ValueError("periods and samples_per_period come together")
        if self.periods is not None:
            if self.periods * self.samples_per_period != len(self.u):
                raise ValueError("periods * samples_per_period != record length")

    @property
    def fs(self):
        return self.u.fs


def generate_multisine(spec, oversample=1):
    """Synthesize a random-phase multisine from its spec.

    Returns one period of ``spec.samples_per_period * oversample`` samples
    tiled ``spec.period_count`` times.  The spectrum is flat over the excited
    band and exactly zero elsewhere; the rms of the base-rate samples equals
    ``spec.target_rms``.  ``oversample > 1`` evaluates the same band-limited
    waveform on a finer grid (used by the time integrator), with the scale
    factor taken from the base rate so both rates describe one signal.
    """
    if oversample < 1 or int(oversample) != oversample:
        raise ValueError("oversample must be a positive integer")
    lines = spec.excited_lines()
    rng = np.random.default_rng(spec.seed)
    phases = rng.uniform(-np.pi, np.pi, lines.size)

    ns = spec.samples_per_period
    half = np.zeros(ns // 2 + 1, dtype=complex)
    half[lines] = np.exp(1j * phases)
    base = np.fft.irfft(half, n=ns)
    scale = spec.target_rms / rms(base)

    if oversample == 1:
        period = base * scale
        fs = spec.fs
    else:
        period = np.fft.irfft(half, n=ns * oversample) * (oversample * scale)
        fs = spec.fs * oversample

    samples = np.tile(period, spec.period_count)
    meta = {"kind": "multisine", "spec": asdict(spec), "oversample": int(oversample)}
    return Signal(samples, fs, meta)


def generate_swept_sine(spec, oversample=1):
    """Synthesize a linear swept sine from its spec."""
    if oversample < 1 or int(oversample) != oversample:
        raise ValueError("oversample must be a positive integer")
    fs = spec.fs * oversample
    duration = spec.resolved_duration()
    n = int(round(duration * fs))
    t = np.arange(n) / fs
    rate = (spec.f_end - spec.f_start) / duration  # Hz per second
    phase = 2.0 * np.pi * (spec.f_start * t + 0.5 * rate * t * t)
    samples = spec.amplitude * np.sin(phase)
    meta = {"kind": "sweptsine", "spec": asdict(spec), "oversample": int(oversample)}
    return Signal(samples, fs, meta)


def line_spectrum(samples, ns):
    """Per-period DFT coefficients, averaged when several periods are given.

    Returns the length-``ns//2 + 1`` half spectrum normalized so an excited
    line k holds the complex amplitude of ``exp(2j pi k t/T)`` in the signal
    (i.e. FFT/ns).  The input length must be a multiple of ``ns``.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size % ns:
        raise ValueError("record length is not a whole number of periods")
    periods = samples.reshape(-1, ns)
    spectra = np.fft.rfft(periods, axis=1) / ns
    return spectra.mean(axis=0)


# ---------------------------------------------------------------------------
# persistence: two-column CSV plus JSON sidecar


def _format_rows(columns):
    rows = np.column_stack(columns)
    lines = [",".join(f"{v:.17g}" for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def save_signal(signal, path):
    """Write a signal as ``time_s,value`` CSV with a JSON sidecar."""
    text = "time_s,value\n" + _format_rows([signal.time(), signal.samples])
    atomic_write_text(path, text)
    save_json(str(path) + ".json", {"fs": signal.fs, "meta": signal.meta})


def load_signal(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    sidecar = load_json(str(path) + ".json")
    return Signal(np.atleast_2d(data)[:, 1].copy(), sidecar["fs"], sidecar.get("meta", {}))


def save_dataset(dataset, path):
    """Write a dataset as ``time_s,u_N,y_m`` CSV with a JSON sidecar."""
    text = "time_s,u_N,y_m\n" + _format_rows(
        [dataset.u.time(), dataset.u.samples, dataset.y.samples]
    )
    atomic_write_text(path, text)
    sidecar = {
        "fs": dataset.fs,
        "label": dataset.label,
        "periods": dataset.periods,
        "samples_per_period": dataset.samples_per_period,
        "u_meta": dataset.u.meta,
        "y_meta": dataset.y.meta,
        "meta": dataset.meta,
    }
    save_json(str(path) + ".json", sidecar)


def load_dataset(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    side = load_json(str(path) + ".json")
    fs = side["fs"]
    u = Signal(data[:, 1].copy(), fs, side.get("u_meta", {}))
    y = Signal(data[:, 2].copy(), fs, side.get("y_meta", {}))
    return Dataset(
        u,
        y,
        label=side.get("label", ""),
        periods=side.get("periods"),
        samples_per_period=side.get("samples_per_period"),
        meta=side.get("meta", {}),
    )
