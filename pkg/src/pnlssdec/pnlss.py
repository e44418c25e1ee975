"""Polynomial nonlinear state-space model: monomial basis, simulation, training.

The model augments a linear state-space core with full multivariate
monomials of the states and input,

    x(t+1) = A x(t) + b u(t) + E zeta(x(t), u(t))
    y(t)   = c' x(t) + d u(t) + f' eta(x(t), u(t))

where zeta/eta stack all monomials of the configured degrees (linear terms
live in the linear core, so degrees start at two).  Training minimizes the
time-domain output error with Levenberg-Marquardt over all parameters,
with Jacobians from forward sensitivity recursions.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._training import FrequencyWeighting, fit_output_error
from .errors import DivergenceError
from .levmarq import LmOptions
from .linid import LinearModel
from .signals import Signal
from .util import atomic_write_text, load_json, save_json

__all__ = [
    "MonomialBasis",
    "PnlssModel",
    "TrainOptions",
    "TrainReport",
    "monomial_count",
    "evaluate_basis",
    "simulate_pnlss",
    "train_pnlss",
]


def monomial_count(n, d):
    """Total polynomial coefficient count for a degree-2..d model of order n.

    Counts all monomials in the n states and one input of total degree two
    up to ``d`` across the n state equations plus the output equation:
    ``(C(n+1+d, d) - n - 2) * (n+1)``.
    """
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 and d >= 2")
    return (math.comb(n + 1 + d, d) - n - 2) * (n + 1)


def _enumerate_exponents(variable_count, degrees):
    rows = []
    for deg in degrees:
        for combo in itertools.combinations_with_replacement(range(variable_count), deg):
            exponent = [0] * variable_count
            for idx in combo:
                exponent[idx] += 1
            rows.append(exponent)
    table = np.array(rows, dtype=np.int64)
    return table.reshape(-1, variable_count)


class MonomialBasis:
    """All monomials of the given total degrees in ``variable_count`` variables.

    The canonical ordering is ascending total degree, then the natural
    combination order of the variables (x_1..x_n, u); for two states and
    degree two that reads x1^2, x1 x2, x1 u, x2^2, x2 u, u^2.  An empty
    degree set yields the empty basis.
    """

    def __init__(self, variable_count, degrees):
        degrees = tuple(sorted({int(d) for d in degrees}))
        if any(d < 2 for d in degrees):
            raise ValueError("basis degrees start at two")
        if variable_count < 1:
            raise ValueError("variable_count must be positive")
        self.variable_count = int(variable_count)
        self.degrees = degrees
        self.exponents = _enumerate_exponents(self.variable_count, degrees)

    def __len__(self):
        return self.exponents.shape[0]

    @property
    def max_degree(self):
        return max(self.degrees) if self.degrees else 0

    def evaluate(self, point):
        """Monomial values at one point, in canonical order."""
        point = np.asarray(point, dtype=float)
        if point.shape != (self.variable_count,):
            raise ValueError("point length must equal variable_count")
        if len(self) == 0:
            return np.zeros(0)
        return np.prod(point[None, :] ** self.exponents, axis=1)

    def evaluate_many(self, points):
        """Monomial values for an (N, variable_count) batch of points."""
        points = np.asarray(points, dtype=float)
        if len(self) == 0:
            return np.zeros((points.shape[0], 0))
        return np.prod(points[:, None, :] ** self.exponents[None, :, :], axis=2)

    def jacobian_many(self, points):
        """Derivatives d(monomial_j)/d(var_i) for a batch: (N, n_terms, nvars)."""
        points = np.asarray(points, dtype=float)
        n_pts = points.shape[0]
        out = np.zeros((n_pts, len(self), self.variable_count))
        for i in range(self.variable_count):
            reduced = self.exponents.copy()
            reduced[:, i] = np.maximum(reduced[:, i] - 1, 0)
            vals = np.prod(points[:, None, :] ** reduced[None, :, :], axis=2)
            out[:, :, i] = vals * self.exponents[None, :, i]
        return out

    def to_dict(self):
        return {
            "variable_count": self.variable_count,
            "degrees": list(self.degrees),
            "exponents": self.exponents.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        basis = cls(data["variable_count"], data["degrees"])
        stored = np.array(data["exponents"], dtype=np.int64).reshape(-1, data["variable_count"])
        if not np.array_equal(stored, basis.exponents):
            raise ValueError("stored exponent table is not in canonical order")
        return basis


def evaluate_basis(basis, point):
    """Evaluate a monomial basis at one (x, u) point."""
    return basis.evaluate(point)


class PnlssModel:
    """Linear core plus monomial coefficient blocks E (state) and f (output)."""

    def __init__(self, linear, state_basis, output_basis, e_coeffs, f_coeffs):
        n = linear.order
        if state_basis.variable_count != n + 1 or output_basis.variable_count != n + 1:
            raise ValueError("basis variable count must be n + 1")
        self.linear = linear
        self.state_basis = state_basis
        self.output_basis = output_basis
        self.e_coeffs = np.asarray(e_coeffs, dtype=float).reshape(n, len(state_basis))
        self.f_coeffs = np.asarray(f_coeffs, dtype=float).reshape(len(output_basis))

    @classmethod
    def from_linear(cls, linear, state_degrees=(2, 3), output_degrees=()):
        """Wrap a linear model with zero-initialized polynomial blocks."""
        n = linear.order
        state_basis = MonomialBasis(n + 1, state_degrees)
        output_basis = MonomialBasis(n + 1, output_degrees)
        return cls(linear, state_basis, output_basis,
                   np.zeros((n, len(state_basis))), np.zeros(len(output_basis)))

    @property
    def order(self):
        return self.linear.order

    @property
    def nonlinear_parameter_count(self):
        return int(self.e_coeffs.size + self.f_coeffs.size)

    @property
    def _dmax(self):
        return max(1, self.state_basis.max_degree, self.output_basis.max_degree)

    def _sim_arrays(self, u):
        lin = self.linear
        return (lin.a, lin.b, lin.c, lin.d,
                self.e_coeffs, self.state_basis.exponents,
                self.f_coeffs, self.output_basis.exponents,
                self._dmax, np.ascontiguousarray(u, dtype=float))

    def simulate(self, u):
        """Output response from zero initial state.

        Accepts a Signal (returns a Signal) or a sample array (returns an
        array).  Raises DivergenceError with the offending time index if the
        state recursion blows up; callers probing stability rely on this.
        """
        if isinstance(u, Signal):
            return Signal(self.simulate(u.samples), u.fs, {"kind": "model-output"})
        status, index, y, _ = _kernels.pnlss_sim(*self._sim_arrays(u))
        if status != 0:
            raise DivergenceError(index)
        return y

    def simulate_with_states(self, u):
        status, index, y, x = _kernels.pnlss_sim(*self._sim_arrays(u))
        if status != 0:
            raise DivergenceError(index)
        return y, x

    def to_dict(self):
        return {
            "kind": "pnlss",
            "linear": self.linear.to_dict(),
            "state_basis": self.state_basis.to_dict(),
            "output_basis": self.output_basis.to_dict(),
            "e": self.e_coeffs.tolist(),
            "f": self.f_coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            LinearModel.from_dict(data["linear"]),
            MonomialBasis.from_dict(data["state_basis"]),
            MonomialBasis.from_dict(data["output_basis"]),
            np.array(data["e"], dtype=float),
            np.array(data["f"], dtype=float),
        )

    def save(self, path):
        save_json(path, self.to_dict())

    @classmethod
    def load(cls, path):
        return cls.from_dict(load_json(path))


def simulate_pnlss(model, u):
    """Simulate a polynomial state-space model on an excitation."""
    return model.simulate(u)


@dataclass(frozen=True)
class TrainOptions:
    """Output-error training configuration.

    ``frequency_weighting`` optionally weights the residual per excited DFT
    line with 1/sigma of a BLA estimate; the default is the plain
    time-domain error (the benchmark data is noiseless).
    """

    lm: LmOptions = field(default_factory=LmOptions)
    transient_periods: int = 1
    frequency_weighting: object = None  # FrfEstimate or None


@dataclass
class TrainReport:
    """Iteration log of an output-error fit.

    ``iterations`` holds dicts (iteration, cost, lambda, accepted,
    rejections, val_rms_db); ``selected_iteration`` is the accepted iterate
    with the lowest validation rms, which is what the trained model returns.
    """

    iterations: list
    selected_iteration: int
    train_rms_db: float
    validation_rms_db: float
    status: str

    def to_csv(self, path):
        rows = ["iter,cost,lambda,val_rms_db"]
        for entry in self.iterations:
            cost = "" if entry["cost"] is None else f"{entry['cost']:.17g}"
            val = entry["val_rms_db"]
            val = "" if val is None else f"{val:.17g}"
            rows.append(f"{entry['iteration']},{cost},{entry['lambda']:.17g},{val}")
        atomic_write_text(path, "\n".join(rows) + "\n")


def _pack_pnlss(model):
    lin = model.linear
    return np.concatenate([
        lin.a.ravel(), lin.b, lin.c, [lin.d],
        model.e_coeffs.ravel(), model.f_coeffs,
    ])


def _unpack_pnlss(theta, template):
    n = template.order
    nzx = len(template.state_basis)
    nzy = len(template.output_basis)
    oa, ob = 0, n * n
    oc, od = ob + n, ob + 2 * n
    oe = od + 1
    of_ = oe + n * nzx
    linear = LinearModel(theta[oa:ob].reshape(n, n), theta[ob:oc], theta[oc:od],
                         theta[od], template.linear.fs)
    return PnlssModel(linear, template.state_basis, template.output_basis,
                      theta[oe:of_].reshape(n, nzx), theta[of_:of_ + nzy])


def train_pnlss(init, train, validation, options=None):
    """Levenberg-Marquardt output-error training of all model parameters.

    Starts from ``init`` (typically the linear model with zero polynomial
    blocks), iterates on the training record with one transient period
    prepended and discarded, and returns the accepted iterate with the
    lowest validation rms together with its TrainReport.  A trial step
    whose simulation diverges is treated as a rejected step.
    """
    opts = options or TrainOptions()
    template = init

    def simulate_fn(theta, u):
        model = _unpack_pnlss(theta, template)
        return model.simulate(u)

    def jacobian_fn(theta, u):
        model = _unpack_pnlss(theta, template)
        status, index, jac = _kernels.pnlss_jac(*model._sim_arrays(u))
        if status != 0:
            raise DivergenceError(index)
        return jac

    fw = None
    if opts.frequency_weighting is not None:
        frf = opts.frequency_weighting
        floor = 1e-12 * float(np.max(np.abs(frf.g)) ** 2)
        weights = 1.0 / np.sqrt(np.maximum(frf.sigma2, floor))
        fw = FrequencyWeighting(frf.lines, weights, train.samples_per_period)

    theta0 = _pack_pnlss(init)
    theta_best, details = fit_output_error(
        theta0, simulate_fn, jacobian_fn,
        lambda theta: _unpack_pnlss(theta, template),
        train, validation, opts.lm,
        transient_periods=opts.transient_periods,
        frequency_weighting=fw,
    )
    report = TrainReport(
        iterations=details["iterations"],
        selected_iteration=details["selected_iteration"],
        train_rms_db=details["train_rms_db"],
        validation_rms_db=details["validation_rms_db"],
        status=details["status"],
    )
    return _unpack_pnlss(theta_best, template), report
