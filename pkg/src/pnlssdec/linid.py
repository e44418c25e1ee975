"""Best linear approximation and linear state-space initialization.

The nonparametric BLA is averaged over periods and phase realizations of
periodic multisine records; a parametric discrete-time model is then
realized from the band-limited impulse response (Hankel SVD) and refined by
weighted least squares on the measured frequency lines.
"""

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import DivergenceError, OrderTooHighError
from .levmarq import LmOptions, levenberg_marquardt
from .signals import rms_db
from .util import atomic_write_text, load_json, save_json

__all__ = [
    "LinearModel",
    "FrfEstimate",
    "estimate_bla",
    "fit_linear_model",
    "frf_fit_cost",
    "linear_rms_error",
    "simulate_record",
    "output_error_db",
]

_EMPTY_POW = np.zeros((0, 0), dtype=np.int64)


class LinearModel:
    """Discrete-time SISO state-space model (A, b, c, d) at rate ``fs``."""

    def __init__(self, a, b, c, d, fs):
        self.a = np.atleast_2d(np.asarray(a, dtype=float))
        self.b = np.asarray(b, dtype=float).ravel()
        self.c = np.asarray(c, dtype=float).ravel()
        self.d = float(np.asarray(d).ravel()[0])
        self.fs = float(fs)
        n = self.a.shape[0]
        if self.a.shape != (n, n) or self.b.size != n or self.c.size != n:
            raise ValueError("inconsistent state-space dimensions")
        if self.fs <= 0:
            raise ValueError("fs must be positive")

    @property
    def order(self):
        return self.a.shape[0]

    @property
    def spectral_radius(self):
        return float(np.max(np.abs(np.linalg.eigvals(self.a))))

    @property
    def stable(self):
        return self.spectral_radius < 1.0

    def eigenvalues(self):
        return np.linalg.eigvals(self.a)

    def frf(self, freq_hz):
        """Frequency response ``c (zI - A)^-1 b + d`` at ``z = exp(2j pi f/fs)``."""
        freq_hz = np.atleast_1d(np.asarray(freq_hz, dtype=float))
        z = np.exp(2j * np.pi * freq_hz / self.fs)
        n = self.order
        eye = np.eye(n)
        mats = z[:, None, None] * eye[None] - self.a[None]
        right = np.linalg.solve(mats, np.broadcast_to(self.b, (z.size, n))[..., None])
        return (self.c @ right[..., 0].T) + self.d

    def simulate(self, u):
        """Time response from zero initial state; ``u`` is a sample array."""
        u = np.ascontiguousarray(u, dtype=float)
        n = self.order
        status, index, y, _ = _kernels.pnlss_sim(
            self.a, self.b, self.c, self.d,
            np.zeros((n, 0)), np.zeros((0, n + 1), dtype=np.int64),
            np.zeros(0), np.zeros((0, n + 1), dtype=np.int64),
            1, u,
        )
        if status != 0:
            raise DivergenceError(index)
        return y

    def to_dict(self):
        return {
            "kind": "linear",
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "c": self.c.tolist(),
            "d": self.d,
            "fs": self.fs,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(np.array(data["a"]), np.array(data["b"]), np.array(data["c"]),
                   data["d"], data["fs"])

    def save(self, path):
        save_json(path, self.to_dict())

    @classmethod
    def load(cls, path):
        return cls.from_dict(load_json(path))


@dataclass
class FrfEstimate:
    """Nonparametric FRF over the excited lines with a distortion variance.

    ``g`` is the realization-averaged FRF; ``sigma2`` the sample variance
    over realizations divided by the realization count (variance of the
    mean, dominated by nonlinear distortion on noiseless data).
    """

    freq_hz: np.ndarray
    g: np.ndarray
    sigma2: np.ndarray
    realization_count: int
    period_count: int
    fs: float
    samples_per_period: int
    lines: np.ndarray

    def __post_init__(self):
        if not (len(self.freq_hz) == len(self.g) == len(self.sigma2) == len(self.lines)):
            raise ValueError("frequency grid, FRF and variance lengths differ")
        if np.any(self.sigma2 < 0):
            raise ValueError("sigma2 must be non-negative")

    def to_csv(self, path):
        rows = ["freq_hz,re_G,im_G,sigma2"]
        for fq, gv, s2 in zip(self.freq_hz, self.g, self.sigma2):
            rows.append(f"{fq:.17g},{gv.real:.17g},{gv.imag:.17g},{s2:.17g}")
        atomic_write_text(path, "\n".join(rows) + "\n")


def _dataset_lines(dataset):
    spec = dataset.u.meta.get("spec", {})
    if dataset.u.meta.get("kind") == "multisine" and spec:
        ns = spec["samples_per_period"]
        k_min = max(1, int(np.ceil(spec["band_low"] * ns / spec["fs"] - 1e-9)))
        k_max = int(np.floor(spec["band_high"] * ns / spec["fs"] + 1e-9))
        return np.arange(k_min, k_max + 1)
    # fall back to detecting non-zero input lines
    ns = dataset.samples_per_period
    spectrum = np.abs(np.fft.rfft(dataset.u.samples[:ns]))
    return np.flatnonzero(spectrum > 1e-8 * spectrum.max())


def estimate_bla(datasets):
    """Best linear approximation from periodic multisine records.

    Parameters
    ----------
    datasets : list of Dataset
        One record per phase realization, each in periodic steady state
        with the same line grid.  At least two realizations are required
        for the variance estimate.

    Returns
    -------
    FrfEstimate
    """
    if len(datasets) < 2:
        raise ValueError("need at least two realizations for the BLA variance")
    first = datasets[0]
    if first.periods is None:
        raise ValueError("estimate_bla needs periodic records")
    ns = first.samples_per_period
    fs = first.fs
    lines = _dataset_lines(first)
    periods = first.periods

    g_per_real = []
    for ds in datasets:
        if ds.samples_per_period != ns or ds.fs != fs:
            raise ValueError("realizations disagree on sampling grid")
        if not np.array_equal(_dataset_lines(ds), lines):
            raise ValueError("realizations disagree on excited lines")
        p = ds.periods
        u_spec = np.fft.rfft(ds.u.samples.reshape(p, ns), axis=1)[:, lines]
        y_spec = np.fft.rfft(ds.y.samples.reshape(p, ns), axis=1)[:, lines]
        g_per_real.append(np.mean(y_spec / u_spec, axis=0))

    g_all = np.array(g_per_real)
    g = g_all.mean(axis=0)
    m = len(datasets)
    sigma2 = np.sum(np.abs(g_all - g) ** 2, axis=0) / (m - 1) / m

    return FrfEstimate(lines * fs / ns, g, sigma2, m, periods, fs, ns, lines)


def _frf_weights(frf):
    floor = 1e-12 * float(np.max(np.abs(frf.g)) ** 2)
    return 1.0 / np.sqrt(np.maximum(frf.sigma2, floor))


def _hankel_realization(impulse, order, rows):
    hmat = scipy.linalg.hankel(impulse[1:rows + 1], impulse[rows:2 * rows])
    u_svd, s_svd, vt_svd = np.linalg.svd(hmat)
    if order > s_svd.size or s_svd[order - 1] <= 1e-12 * s_svd[0]:
        raise OrderTooHighError(
            f"data supports rank {int(np.sum(s_svd > 1e-12 * s_svd[0]))}, "
            f"requested order {order}"
        )
    sq = np.sqrt(s_svd[:order])
    obs = u_svd[:, :order] * sq
    con = (vt_svd[:order, :].T * sq).T
    a, *_ = np.linalg.lstsq(obs[:-1], obs[1:], rcond=None)
    return a, con[:, 0], obs[0].copy(), impulse[0]


def _reflect_unstable(a):
    """Mirror eigenvalues outside the unit circle to their reciprocals."""
    eig, vec = np.linalg.eig(a)
    mask = np.abs(eig) > 1.0
    if not mask.any():
        return a
    eig = eig.copy()
    eig[mask] = 1.0 / np.conj(eig[mask])
    try:
        return np.real(vec @ np.diag(eig) @ np.linalg.inv(vec))
    except np.linalg.LinAlgError:
        # defective A: fall back to a uniform radial shrink
        return a * (0.999 / np.max(np.abs(np.linalg.eigvals(a))))


def _pack_linear(model):
    return np.concatenate([model.a.ravel(), model.b, model.c, [model.d]])


def _unpack_linear(theta, n, fs):
    a = theta[: n * n].reshape(n, n)
    b = theta[n * n: n * n + n]
    c = theta[n * n + n: n * n + 2 * n]
    d = theta[n * n + 2 * n]
    return LinearModel(a, b, c, d, fs)


def _frf_residual_and_jacobian(frf, n, weights):
    z = np.exp(2j * np.pi * frf.freq_hz / frf.fs)
    g_meas = frf.g
    eye = np.eye(n)

    def split(values):
        return np.concatenate([values.real, values.imag])

    def residual(theta):
        a = theta[: n * n].reshape(n, n)
        b = theta[n * n: n * n + n]
        c = theta[n * n + n: n * n + 2 * n]
        d = theta[-1]
        mats = z[:, None, None] * eye[None] - a[None]
        right = np.linalg.solve(mats, np.broadcast_to(b, (z.size, n))[..., None])[..., 0]
        g_hat = right @ c + d
        return split(weights * (g_hat - g_meas))

    def jacobian(theta):
        a = theta[: n * n].reshape(n, n)
        b = theta[n * n: n * n + n]
        c = theta[n * n + n: n * n + 2 * n]
        mats = z[:, None, None] * eye[None] - a[None]
        inv = np.linalg.inv(mats)
        left = np.einsum("i,fij->fj", c, inv)
        right = np.einsum("fij,j->fi", inv, b)
        npar = n * n + 2 * n + 1
        jac = np.empty((z.size, npar), dtype=complex)
        jac[:, : n * n] = (left[:, :, None] * right[:, None, :]).reshape(z.size, n * n)
        jac[:, n * n: n * n + n] = left
        jac[:, n * n + n: n * n + 2 * n] = right
        jac[:, -1] = 1.0
        jac *= weights[:, None]
        return np.vstack([jac.real, jac.imag])

    return residual, jacobian


def fit_linear_model(frf, order, refine_options=None, hankel_rows=None):
    """Fit a stable parametric model to a nonparametric FRF.

    The initialization inverts the band-limited FRF to an impulse response
    and realizes (A, b, c) from a Hankel SVD; eigenvalues outside the unit
    circle are reflected inside.  A damped Gauss-Newton refinement then
    minimizes the variance-weighted FRF error over the excited lines
    (weights are floored so noiseless data gets a flat weighting).  The
    Hankel block size steers which basin the refinement lands in, so
    several sizes are tried and the best refined fit wins; ``hankel_rows``
    pins a single size instead.

    Raises
    ------
    OrderTooHighError
        When the data cannot support the requested order.
    """
    if order < 1 or int(order) != order:
        raise ValueError("order must be a positive integer")

    half = np.zeros(frf.samples_per_period // 2 + 1, dtype=complex)
    half[frf.lines] = frf.g
    impulse = np.fft.irfft(half, n=frf.samples_per_period)

    max_rows = frf.samples_per_period // 4
    if hankel_rows is not None:
        candidates = [hankel_rows]
    else:
        candidates = sorted({min(max(rows, order + 1), max_rows)
                             for rows in (2 * order + 2, 10, 20, 40, 80, 160)})

    weights = _frf_weights(frf)
    residual, jacobian = _frf_residual_and_jacobian(frf, order, weights)
    opts = refine_options or LmOptions(max_iter=200, ftol=1e-14, ftol_patience=5)

    best = None
    last_error = None
    for rows in candidates:
        try:
            a, b, c, d = _hankel_realization(impulse, order, rows)
        except OrderTooHighError as err:
            last_error = err
            continue
        a = _reflect_unstable(a)
        theta0 = _pack_linear(LinearModel(a, b, c, d, frf.fs))
        result = levenberg_marquardt(residual, jacobian, theta0, opts)
        if best is None or result.cost < best.cost:
            best = result
    if best is None:
        raise last_error

    model = _unpack_linear(best.theta, order, frf.fs)
    if not model.stable:
        model = LinearModel(_reflect_unstable(model.a), model.b, model.c, model.d, frf.fs)
    return model


def frf_fit_cost(model, frf):
    """Weighted squared FRF error of a model against an estimate."""
    weights = _frf_weights(frf)
    err = weights * (model.frf(frf.freq_hz) - frf.g)
    return float(np.sum(np.abs(err) ** 2))


def simulate_record(model, dataset, transient_periods=1):
    """Simulate a model over a dataset input with transient handling.

    For periodic records the first retained period is prepended
    ``transient_periods`` times and the corresponding outputs discarded, so
    the model response is compared in steady state; aperiodic records are
    simulated as-is from zero initial conditions (the recorded data starts
    from rest too).
    """
    u = dataset.u.samples
    if dataset.periods is not None and transient_periods > 0:
        ns = dataset.samples_per_period
        prefix = np.tile(u[:ns], transient_periods)
        y = model.simulate(np.concatenate([prefix, u]))
        return y[transient_periods * ns:]
    return model.simulate(u)


def output_error_db(model, dataset, transient_periods=1):
    """rms output error (dB) of a model on a dataset."""
    y_model = simulate_record(model, dataset, transient_periods)
    return rms_db(y_model - dataset.y.samples)


def linear_rms_error(model, test, transient_periods=1):
    """rms simulation error (dB) of a stable linear model on a test record."""
    if not model.stable:
        raise ValueError("linear model must be stable for evaluation")
    return output_error_db(model, test, transient_periods)
