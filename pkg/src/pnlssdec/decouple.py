"""Decoupling the multivariate polynomial into parallel univariate branches.

The trained model's nonlinear map f(s), s = (x; u), is probed at random
points; the stacked Jacobians form a third-order tensor whose canonical
polyadic decomposition (CPD) yields mixing matrices W, V and sampled branch
derivatives.  Each branch derivative is fitted by a univariate polynomial
and integrated, giving a decoupled model

    x(t+1) = A x(t) + b u(t) + W_x g(V' [x; u])
    y(t)   = c' x(t) + d u(t) + w_y' g(V' [x; u])

with r branches of degree-d polynomials, i.e. (2n + d + 1) r nonlinear
parameters instead of the combinatorial monomial count.  The assembled
model is re-optimized with the same output-error Levenberg-Marquardt as the
full model.
"""

import concurrent.futures
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from ._training import fit_output_error
from .errors import DivergenceError, SimulationError
from .levmarq import LmOptions
from .linid import LinearModel, output_error_db
from .pnlss import MonomialBasis, PnlssModel, TrainOptions, TrainReport
from .signals import rms_db
from .util import atomic_write_text, derive_seed, load_json, save_json

__all__ = [
    "JacobianTensor",
    "CpdFactors",
    "DecoupledModel",
    "RankScan",
    "SweepRecord",
    "SweepReport",
    "build_jacobian_tensor",
    "sampling_scales",
    "cpd",
    "estimate_rank",
    "check_uniqueness",
    "fit_branches",
    "assemble_decoupled",
    "train_decoupled",
    "sweep_and_select",
]


@dataclass
class JacobianTensor:
    """Stacked Jacobian evaluations of the polynomial map.

    ``values[i, j, k]`` is the derivative of polynomial row i (n state rows,
    then the output row) with respect to variable j, evaluated at sampling
    point k.
    """

    values: np.ndarray  # (n+1, n+1, N)
    points: np.ndarray  # (N, n+1)
    seed: int


def _polynomial_rows(model, points):
    """Evaluate [E zeta(s); f' eta(s)] at a batch of points: (N, n+1)."""
    n = model.order
    out = np.zeros((points.shape[0], n + 1))
    if len(model.state_basis):
        out[:, :n] = model.state_basis.evaluate_many(points) @ model.e_coeffs.T
    if len(model.output_basis):
        out[:, n] = model.output_basis.evaluate_many(points) @ model.f_coeffs
    return out


def build_jacobian_tensor(model, n_points=500, seed=0, scale=None, verify=True):
    """Probe the model's polynomial map at random points and stack Jacobians.

    Points are standard normal, scaled componentwise by ``scale`` (typically
    the standard deviations of the trained states and input over the
    training record, so the branches are fitted where they will operate).
    The analytic Jacobian is cross-checked against central finite
    differences unless ``verify`` is disabled.
    """
    if n_points < 1:
        raise ValueError("need at least one sampling point")
    n = model.order
    q = n + 1
    rng = np.random.default_rng(seed)
    points = rng.standard_normal((n_points, q))
    if scale is not None:
        scale = np.asarray(scale, dtype=float).reshape(q)
        points = points * scale

    values = np.zeros((q, q, n_points))
    if len(model.state_basis):
        dz = model.state_basis.jacobian_many(points)  # (N, nzx, q)
        values[:n] = np.einsum("ej,njq->eqn", model.e_coeffs, dz)
    if len(model.output_basis):
        de = model.output_basis.jacobian_many(points)
        values[n] = np.einsum("j,njq->qn", model.f_coeffs, de)

    tensor = JacobianTensor(values, points, int(seed))
    if verify:
        _verify_jacobian_tensor(model, tensor)
    return tensor


def _verify_jacobian_tensor(model, tensor, rel_tol=1e-6):
    points = tensor.points
    q = points.shape[1]
    fd = np.zeros_like(tensor.values)
    for j in range(q):
        h = 1e-6 * (1.0 + np.abs(points[:, j]))
        plus = points.copy()
        minus = points.copy()
        plus[:, j] += h
        minus[:, j] -= h
        diff = (_polynomial_rows(model, plus) - _polynomial_rows(model, minus))
        fd[:, j, :] = (diff / (2.0 * h)[:, None]).T
    scale = np.max(np.abs(tensor.values)) + 1e-300
    err = np.max(np.abs(fd - tensor.values)) / scale
    if err > rel_tol:
        raise RuntimeError(f"jacobian tensor failed finite-difference check ({err:.3e})")


def sampling_scales(model, u):
    """Componentwise standard deviations of (states, input) over a record."""
    _, x = model.simulate_with_states(np.asarray(u, dtype=float))
    scales = np.empty(model.order + 1)
    scales[: model.order] = np.std(x, axis=0)
    scales[model.order] = np.std(u)
    return np.maximum(scales, 1e-300)


@dataclass
class CpdFactors:
    """CPD factor matrices with fixed scaling/permutation conventions.

    Columns of ``v`` and ``h`` are unit norm with their largest-magnitude
    entry positive; all magnitude and sign freedom is absorbed into ``w``
    and columns are sorted by descending ``w`` norm, which makes the
    decomposition reproducible.  ``stagnated`` marks a decomposition whose
    alternating least squares stalled above the requested fit tolerance.
    """

    w: np.ndarray  # (n+1, r)
    v: np.ndarray  # (n+1, r)
    h: np.ndarray  # (N, r)
    fit_error: float
    stagnated: bool = False


def _solve_gram(gram, rhs):
    return np.linalg.lstsq(gram, rhs.T, rcond=None)[0].T


def _svd_init(tensor, r, rng):
    dims = tensor.shape
    mats = [
        tensor.reshape(dims[0], -1),
        np.moveaxis(tensor, 1, 0).reshape(dims[1], -1),
        np.moveaxis(tensor, 2, 0).reshape(dims[2], -1),
    ]
    factors = []
    for mat in mats:
        u_svd, _, _ = np.linalg.svd(mat, full_matrices=False)
        cols = u_svd[:, :r]
        if cols.shape[1] < r:
            extra = rng.standard_normal((cols.shape[0], r - cols.shape[1]))
            cols = np.hstack([cols, extra])
        factors.append(cols.copy())
    return factors


def _cpd_single(tensor, r, init, max_iter, rel_tol):
    norm_t = np.linalg.norm(tensor)
    w, v, h = init
    prev = np.inf
    cost = np.inf
    for _ in range(max_iter):
        gram = (v.T @ v) * (h.T @ h)
        w = _solve_gram(gram, np.einsum("ijk,jl,kl->il", tensor, v, h))
        gram = (w.T @ w) * (h.T @ h)
        v = _solve_gram(gram, np.einsum("ijk,il,kl->jl", tensor, w, h))
        gram = (w.T @ w) * (v.T @ v)
        h = _solve_gram(gram, np.einsum("ijk,il,jl->kl", tensor, w, v))
        approx = np.einsum("il,jl,kl->ijk", w, v, h)
        cost = np.linalg.norm(tensor - approx)
        if prev - cost <= rel_tol * max(prev, 1e-300) and np.isfinite(prev):
            break
        prev = cost
    fit = 0.0 if norm_t == 0.0 else cost / norm_t
    return w, v, h, fit


def _sign_of_peak(column):
    peak = column[np.argmax(np.abs(column))]
    return 1.0 if peak >= 0 else -1.0


def _normalize_factors(w, v, h):
    w = w.copy()
    v = v.copy()
    h = h.copy()
    for l in range(v.shape[1]):
        nv = np.linalg.norm(v[:, l])
        nh = np.linalg.norm(h[:, l])
        if nv == 0.0 or nh == 0.0:
            w[:, l] *= nv * nh
            continue
        sv = _sign_of_peak(v[:, l])
        sh = _sign_of_peak(h[:, l])
        v[:, l] *= sv / nv
        h[:, l] *= sh / nh
        w[:, l] *= sv * sh * nv * nh
    order = np.argsort(-np.linalg.norm(w, axis=0), kind="stable")
    return w[:, order], v[:, order], h[:, order]


def cpd(tensor, r, restarts=5, seed=0, max_iter=2000, rel_tol=1e-10, fit_tol=None):
    """Canonical polyadic decomposition by alternating least squares.

    The best of ``restarts`` initializations is kept (the first is
    SVD-based, the rest random).  Factors come back normalized and sorted
    per the CpdFactors conventions.
    """
    values = tensor.values if isinstance(tensor, JacobianTensor) else np.asarray(tensor)
    q = values.shape[0]
    if not 1 <= r <= q * q:
        raise ValueError(f"rank must lie in [1, {q * q}]")

    best = None
    for attempt in range(max(1, restarts)):
        rng = np.random.default_rng(derive_seed(seed, f"cpd-restart:{attempt}"))
        if attempt == 0:
            init = _svd_init(values, r, rng)
        else:
            init = [rng.standard_normal((dim, r)) for dim in values.shape]
        w, v, h, fit = _cpd_single(values, r, init, max_iter, rel_tol)
        if best is None or fit < best[3]:
            best = (w, v, h, fit)
        if fit == 0.0:
            break

    w, v, h = _normalize_factors(*best[:3])
    fit = best[3]
    stagnated = fit_tol is not None and fit > fit_tol
    return CpdFactors(w, v, h, float(fit), stagnated)


@dataclass
class RankScan:
    """Result of scanning candidate CPD ranks."""

    rank: int
    fit_errors: list
    converged: bool


def estimate_rank(tensor, r_max, tol=1e-3, restarts=5, seed=0):
    """Smallest rank whose CPD fit error drops below ``tol``.

    Returns a RankScan with the full error-vs-rank curve; when no rank up
    to ``r_max`` reaches the tolerance the scan reports ``r_max`` with
    ``converged=False``.
    """
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    errors = []
    for r in range(1, r_max + 1):
        factors = cpd(tensor, r, restarts=restarts,
                      seed=derive_seed(seed, f"rankscan:{r}"), fit_tol=tol)
        errors.append(factors.fit_error)
        if factors.fit_error < tol:
            return RankScan(r, errors, True)
    return RankScan(r_max, errors, False)


def check_uniqueness(n, r):
    """Generic-uniqueness inequality ``n^2 (n^2 - 1) >= 2 r (r - 1)``.

    ``n`` is the size of the square tensor slices being decomposed.  The
    source convention is ambiguous about whether the input dimension is
    included (slices here are (n+1) x (n+1) for n states plus the input
    row); this helper applies the inequality literally to whatever ``n``
    the caller passes.
    """
    if n < 1 or r < 1:
        raise ValueError("need n >= 1 and r >= 1")
    return n * n * (n * n - 1) >= 2 * r * (r - 1)


def fit_branches(factors, tensor, degree):
    """Fit each branch derivative with a polynomial and integrate it.

    Branch l's CPD column ``h[:, l]`` samples g_l' at the projected points
    ``s~ = points @ v[:, l]``; a Vandermonde regression on powers
    1..degree-1 (no constant term) gives the derivative coefficients, and
    termwise integration with zero integration constants yields g_l over
    powers 2..degree.  Ill-conditioned regressions (condition > 1e12) fall
    back to a trace-scaled ridge solve with a warning.

    Returns an (r, degree-1) array, lowest power (2) first.
    """
    if degree < 2:
        raise ValueError("branch degree must be at least 2")
    points = tensor.points
    r = factors.v.shape[1]
    coeffs = np.zeros((r, degree - 1))
    powers = np.arange(1, degree)
    for l in range(r):
        s_tilde = points @ factors.v[:, l]
        phi = s_tilde[:, None] ** powers[None, :]
        svals = np.linalg.svd(phi, compute_uv=False)
        if svals[-1] == 0 or svals[0] / svals[-1] > 1e12:
            warnings.warn(
                f"branch {l}: Vandermonde condition above 1e12, using ridge fallback",
                RuntimeWarning,
            )
            gram = phi.T @ phi
            lam = 1e-10 * np.trace(gram) / gram.shape[0]
            deriv, *_ = np.linalg.lstsq(gram + lam * np.eye(gram.shape[0]),
                                        phi.T @ factors.h[:, l], rcond=None)
        else:
            deriv, *_ = np.linalg.lstsq(phi, factors.h[:, l], rcond=None)
        coeffs[l] = deriv / (powers + 1.0)
    return coeffs


class DecoupledModel:
    """Linear core plus r univariate polynomial branches.

    ``v`` mixes (states; input) into the branch inputs; ``w`` holds the
    state feedback rows (first n) and the output combination (last row).
    ``coeffs[l]`` are branch l's polynomial coefficients for powers
    2..degree, lowest power first.
    """

    def __init__(self, linear, v, w, coeffs):
        n = linear.order
        self.linear = linear
        self.v = np.asarray(v, dtype=float).reshape(n + 1, -1)
        self.w = np.asarray(w, dtype=float).reshape(n + 1, -1)
        r = self.v.shape[1]
        if self.w.shape != (n + 1, r):
            raise ValueError("V and W must both be (n+1) x r")
        coeffs = np.asarray(coeffs, dtype=float)
        if r == 0:
            coeffs = coeffs.reshape(0, 0)
        elif coeffs.ndim != 2 or coeffs.shape[0] != r or coeffs.shape[1] < 1:
            raise ValueError("coeffs must be (r, degree-1) with degree >= 2")
        self.coeffs = coeffs

    @property
    def order(self):
        return self.linear.order

    @property
    def branch_count(self):
        return self.v.shape[1]

    @property
    def degree(self):
        return self.coeffs.shape[1] + 1 if self.branch_count else 0

    @property
    def nonlinear_parameter_count(self):
        return int(self.v.size + self.w.size + self.coeffs.size)

    @property
    def w_x(self):
        return self.w[: self.order]

    @property
    def w_y(self):
        return self.w[self.order]

    def branch_inputs(self, states, u):
        """Projected branch inputs s~ along a trajectory: (N, r)."""
        s = np.column_stack([states, np.asarray(u, dtype=float)])
        return s @ self.v

    def branch_values(self, s_tilde):
        """Evaluate g_l at given branch inputs: columns match branches."""
        s_tilde = np.asarray(s_tilde, dtype=float)
        out = np.zeros_like(s_tilde)
        for l in range(self.branch_count):
            for p in range(self.degree, 1, -1):
                out[..., l] = (out[..., l] + self.coeffs[l, p - 2]) * s_tilde[..., l]
            out[..., l] *= s_tilde[..., l]
        return out

    def _sim_arrays(self, u):
        lin = self.linear
        return (lin.a, lin.b, lin.c, lin.d, self.v,
                np.ascontiguousarray(self.w_x), np.ascontiguousarray(self.w_y),
                self.coeffs, np.ascontiguousarray(u, dtype=float))

    def simulate(self, u):
        from .signals import Signal

        if isinstance(u, Signal):
            return Signal(self.simulate(u.samples), u.fs, {"kind": "model-output"})
        status, index, y, _ = _kernels.dec_sim(*self._sim_arrays(u))
        if status != 0:
            raise DivergenceError(index)
        return y

    def simulate_with_states(self, u):
        status, index, y, x = _kernels.dec_sim(*self._sim_arrays(u))
        if status != 0:
            raise DivergenceError(index)
        return y, x

    def to_pnlss(self):
        """Expand the branches back into a full monomial-basis model.

        Exact re-expansion: simulating the result reproduces this model's
        output (used as a consistency oracle and for comparisons against
        the full model).
        """
        n = self.order
        q = n + 1
        d = max(self.degree, 2)
        basis = MonomialBasis(q, range(2, d + 1))
        index = {tuple(row): i for i, row in enumerate(basis.exponents.tolist())}
        e_new = np.zeros((n, len(basis)))
        f_new = np.zeros(len(basis))
        for l in range(self.branch_count):
            for p in range(2, self.degree + 1):
                cp = self.coeffs[l, p - 2]
                if cp == 0.0:
                    continue
                import itertools

                for combo in itertools.combinations_with_replacement(range(q), p):
                    exponent = [0] * q
                    for idx in combo:
                        exponent[idx] += 1
                    multinom = math.factorial(p)
                    for e_j in exponent:
                        multinom //= math.factorial(e_j)
                    val = cp * multinom * np.prod(self.v[:, l] ** exponent)
                    col = index[tuple(exponent)]
                    e_new[:, col] += self.w_x[:, l] * val
                    f_new[col] += self.w_y[l] * val
        return PnlssModel(self.linear, basis, basis, e_new, f_new)

    def to_dict(self):
        return {
            "kind": "decoupled",
            "linear": self.linear.to_dict(),
            "v": self.v.tolist(),
            "w": self.w.tolist(),
            "coeffs": self.coeffs.tolist(),
            "degree_range": [2, self.degree] if self.branch_count else [],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(LinearModel.from_dict(data["linear"]), np.array(data["v"]),
                   np.array(data["w"]), np.array(data["coeffs"]))

    def save(self, path):
        save_json(path, self.to_dict())

    @classmethod
    def load(cls, path):
        return cls.from_dict(load_json(path))


def assemble_decoupled(linear, v, w, branch_coeffs):
    """Build a decoupled model from mixing matrices and branch coefficients."""
    return DecoupledModel(linear, v, w, branch_coeffs)


def _pack_decoupled(model):
    lin = model.linear
    return np.concatenate([
        lin.a.ravel(), lin.b, lin.c, [lin.d],
        model.v.ravel(), model.w.ravel(), model.coeffs.ravel(),
    ])


def _unpack_decoupled(theta, template):
    n = template.order
    q = n + 1
    r = template.branch_count
    ncoef = template.coeffs.shape[1]
    oa, ob = 0, n * n
    oc, od = ob + n, ob + 2 * n
    ov = od + 1
    ow = ov + q * r
    oco = ow + q * r
    linear = LinearModel(theta[oa:ob].reshape(n, n), theta[ob:oc], theta[oc:od],
                         theta[od], template.linear.fs)
    return DecoupledModel(linear, theta[ov:ow].reshape(q, r),
                          theta[ow:oco].reshape(q, r),
                          theta[oco:].reshape(r, ncoef))


def train_decoupled(init, train, validation, options=None):
    """Output-error refinement of a decoupled model.

    Optimizes the linear core, both mixing matrices and all branch
    coefficients.  When the assembled initialization diverges on the
    training input it falls back to the safe start: keep V and the branch
    coefficients, zero W, so the first iterate is the stable linear model.
    """
    opts = options or TrainOptions()
    template = init

    def _extended_input():
        u = train.u.samples
        if train.periods is not None and opts.transient_periods > 0:
            ns = train.samples_per_period
            return np.concatenate([np.tile(u[:ns], opts.transient_periods), u])
        return u

    try:
        init.simulate(_extended_input())
    except SimulationError:
        init = DecoupledModel(init.linear, init.v, np.zeros_like(init.w), init.coeffs)
        template = init

    def simulate_fn(theta, u):
        return _unpack_decoupled(theta, template).simulate(u)

    def jacobian_fn(theta, u):
        model = _unpack_decoupled(theta, template)
        status, index, jac = _kernels.dec_jac(*model._sim_arrays(u))
        if status != 0:
            raise DivergenceError(index)
        return jac

    theta0 = _pack_decoupled(init)
    theta_best, details = fit_output_error(
        theta0, simulate_fn, jacobian_fn,
        lambda theta: _unpack_decoupled(theta, template),
        train, validation, opts.lm,
        transient_periods=opts.transient_periods,
    )
    report = TrainReport(
        iterations=details["iterations"],
        selected_iteration=details["selected_iteration"],
        train_rms_db=details["train_rms_db"],
        validation_rms_db=details["validation_rms_db"],
        status=details["status"],
    )
    return _unpack_decoupled(theta_best, template), report


@dataclass
class SweepRecord:
    r: int
    d: int
    trial: int
    seed: int
    cpd_fit_error: float
    train_rms_db: float
    val_rms_db: float
    test_ms_rms_db: float
    test_ss_rms_db: float
    param_count: int
    status: str = "ok"


@dataclass
class SweepReport:
    records: list
    best_index: int = None

    @property
    def best_record(self):
        return None if self.best_index is None else self.records[self.best_index]

    def to_csv(self, path):
        rows = ["r,d,trial,seed,cpd_fit_error,train_rms_db,val_rms_db,"
                "test_ms_rms_db,test_ss_rms_db,param_count,status"]
        for rec in self.records:
            rows.append(
                f"{rec.r},{rec.d},{rec.trial},{rec.seed},{rec.cpd_fit_error:.17g},"
                f"{rec.train_rms_db:.17g},{rec.val_rms_db:.17g},"
                f"{rec.test_ms_rms_db:.17g},{rec.test_ss_rms_db:.17g},"
                f"{rec.param_count},{rec.status}"
            )
        atomic_write_text(path, "\n".join(rows) + "\n")


def _safe_error_db(model, dataset, transient_periods):
    try:
        return output_error_db(model, dataset, transient_periods)
    except SimulationError:
        return float("nan")


def _sweep_trial(model, datasets, r, d, trial, master_seed, options,
                 n_points, cpd_restarts, scale):
    point_seed = derive_seed(master_seed, f"points:{trial}")
    tensor = build_jacobian_tensor(model, n_points, seed=point_seed,
                                   scale=scale, verify=False)
    factors = cpd(tensor, r, restarts=cpd_restarts,
                  seed=derive_seed(master_seed, f"cpd:{trial}:r{r}"))
    coeffs = fit_branches(factors, tensor, d)
    init = assemble_decoupled(model.linear, factors.v, factors.w, coeffs)
    trained, report = train_decoupled(init, datasets["train"],
                                      datasets["validation"], options)
    record = SweepRecord(
        r=r, d=d, trial=trial, seed=point_seed,
        cpd_fit_error=factors.fit_error,
        train_rms_db=report.train_rms_db,
        val_rms_db=report.validation_rms_db if report.validation_rms_db is not None
        else report.train_rms_db,
        test_ms_rms_db=_safe_error_db(trained, datasets["test_multisine"],
                                      options.transient_periods),
        test_ss_rms_db=_safe_error_db(trained, datasets["test_sweptsine"],
                                      options.transient_periods),
        param_count=trained.nonlinear_parameter_count,
    )
    return record, trained


def _sweep_job(args):
    (model, datasets, r, d, trial, master_seed, options,
     n_points, cpd_restarts, scale) = args
    try:
        record, trained = _sweep_trial(model, datasets, r, d, trial, master_seed,
                                       options, n_points, cpd_restarts, scale)
        return record, trained.to_dict()
    except Exception as exc:  # keep the sweep alive on individual failures
        nan = float("nan")
        record = SweepRecord(r=r, d=d, trial=trial,
                             seed=derive_seed(master_seed, f"points:{trial}"),
                             cpd_fit_error=nan, train_rms_db=nan, val_rms_db=nan,
                             test_ms_rms_db=nan, test_ss_rms_db=nan,
                             param_count=0, status=f"failed: {exc}")
        return record, None


def sweep_and_select(model, datasets, r_list, d_list, trials, options=None,
                     seed=0, n_points=500, cpd_restarts=5, scale=None,
                     workers=1):
    """Scan branch counts and degrees, re-estimating each candidate ``trials`` times.

    Every trial draws a fresh set of Jacobian sampling points; each (r, d,
    trial) candidate is decomposed, fitted, re-optimized, and scored on the
    validation and test records.  The model with the lowest validation rms
    is returned along with the full grid so the error-versus-parameter
    trade-off can be reported.

    Parameters
    ----------
    model : PnlssModel
        Trained full model to decouple.
    datasets : dict
        Keys ``train``, ``validation``, ``test_multisine``,
        ``test_sweptsine``.
    options : TrainOptions, optional
        Applied to every re-optimization.
    scale : array, optional
        Sampling-point scales; defaults to the state/input standard
        deviations on the training record.
    workers : int
        Trials run in parallel processes when > 1; results are ordered
        deterministically either way.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    opts = options or TrainOptions()
    if scale is None:
        scale = sampling_scales(model, datasets["train"].u.samples)

    tasks = [
        (model, datasets, r, d, trial, seed, opts, n_points, cpd_restarts, scale)
        for r in r_list for d in d_list for trial in range(trials)
    ]

    results = []
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_job, tasks))
    else:
        results = [_sweep_job(task) for task in tasks]

    records = [record for record, _ in results]
    best_index = None
    best_val = np.inf
    best_model = None
    for idx, (record, model_dict) in enumerate(results):
        if record.status != "ok" or model_dict is None:
            continue
        if np.isfinite(record.val_rms_db) and record.val_rms_db < best_val:
            best_val = record.val_rms_db
            best_index = idx
            best_model = DecoupledModel.from_dict(model_dict)

    return SweepReport(records, best_index), best_model
