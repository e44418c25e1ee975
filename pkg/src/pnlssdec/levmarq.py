"""Damped Gauss-Newton (Levenberg-Marquardt) driver for output-error fits.

The driver is generic over a residual/Jacobian pair so the linear FRF
refinement, the full polynomial model and the decoupled model all share the
same trust-region logic: columns of the Jacobian are rescaled to unit norm,
the damped step comes from an SVD, lambda shrinks on acceptance and grows
on rejection, and a trial point that diverges simply counts as a rejected
step with infinite cost.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import SimulationError

__all__ = ["LmOptions", "LmResult", "levenberg_marquardt"]


@dataclass(frozen=True)
class LmOptions:
    max_iter: int = 100
    lambda_init: float = 1.0e-3
    lambda_factor: float = 10.0
    lambda_cap: float = 1.0e10
    ftol: float = 0.0  # relative cost decrease considered real progress
    ftol_patience: int = 3

    def __post_init__(self):
        if self.max_iter < 1 or self.lambda_factor <= 1 or self.lambda_init <= 0:
            raise ValueError("invalid LM options")


@dataclass
class LmResult:
    theta: np.ndarray
    cost: float
    status: str  # max_iter | lambda_cap | ftol
    history: list = field(default_factory=list)  # dicts: iter, cost, lamb, accepted, rejections


def _evaluate(residual_fn, theta):
    try:
        res = residual_fn(theta)
    except SimulationError:
        return None, np.inf
    if res is None or not np.all(np.isfinite(res)):
        return None, np.inf
    return res, float(res @ res)


def levenberg_marquardt(residual_fn, jacobian_fn, theta0, options=None, on_accept=None):
    """Minimize ``sum(residual(theta)**2)`` from ``theta0``.

    ``on_accept(iteration, theta, cost)`` fires for the initial point
    (iteration 0) and after every accepted step; callers use it to track
    validation error per iterate.  Accepted steps are strictly decreasing
    in cost by construction.
    """
    opts = options or LmOptions()
    theta = np.asarray(theta0, dtype=float).copy()

    res, cost = _evaluate(residual_fn, theta)
    if res is None:
        raise ValueError("initial parameters diverge on the training data")
    if on_accept is not None:
        on_accept(0, theta, cost)

    lamb = opts.lambda_init
    history = []
    status = "max_iter"
    stall = 0

    for iteration in range(1, opts.max_iter + 1):
        jac = jacobian_fn(theta)
        col_norms = np.linalg.norm(jac, axis=0)
        floor = max(np.max(col_norms), 1.0) * 1e-14
        col_norms = np.maximum(col_norms, floor)
        u_svd, s_svd, vt_svd = np.linalg.svd(jac / col_norms, full_matrices=False)
        g = u_svd.T @ res

        accepted = False
        rejections = 0
        while lamb <= opts.lambda_cap:
            step = -(vt_svd.T @ (s_svd / (s_svd * s_svd + lamb) * g)) / col_norms
            res_new, cost_new = _evaluate(residual_fn, theta + step)
            if cost_new < cost:
                theta = theta + step
                prev_cost = cost
                res, cost = res_new, cost_new
                lamb = max(lamb / opts.lambda_factor, 1e-14)
                accepted = True
                break
            lamb *= opts.lambda_factor
            rejections += 1

        history.append({
            "iteration": iteration,
            "cost": cost,
            "lambda": lamb,
            "accepted": accepted,
            "rejections": rejections,
        })

        if not accepted:
            status = "lambda_cap"
            break
        if on_accept is not None:
            on_accept(iteration, theta, cost)
        if opts.ftol > 0.0:
            if prev_cost - cost <= opts.ftol * max(prev_cost, 1e-300):
                stall += 1
                if stall >= opts.ftol_patience:
                    status = "ftol"
                    break
            else:
                stall = 0

    return LmResult(theta=theta, cost=cost, status=status, history=history)
