"""Shared output-error training loop for the full and decoupled models.

Wraps the LM driver with the dataset conventions: one period of a periodic
training record is prepended and discarded before the residual is formed,
every accepted iterate is scored on the validation record, and the iterate
with the lowest validation rms is returned.
"""

import numpy as np

from .errors import SimulationError
from .levmarq import levenberg_marquardt
from .signals import rms_db

__all__ = ["FrequencyWeighting", "fit_output_error"]


class FrequencyWeighting:
    """Per-line weighting of residual and Jacobian in the DFT domain.

    ``weights`` apply to the DFT of each retained period at the excited
    ``lines``; real and imaginary parts are stacked so the LM driver keeps
    working on real arrays.
    """

    def __init__(self, lines, weights, samples_per_period):
        self.lines = np.asarray(lines, dtype=int)
        self.weights = np.asarray(weights, dtype=float)
        self.ns = int(samples_per_period)
        if self.lines.shape != self.weights.shape:
            raise ValueError("lines and weights must align")

    def residual(self, err):
        spec = np.fft.rfft(err.reshape(-1, self.ns), axis=1)[:, self.lines]
        spec = spec * self.weights
        return np.concatenate([spec.real.ravel(), spec.imag.ravel()])

    def jacobian(self, jac):
        npar = jac.shape[1]
        spec = np.fft.rfft(jac.reshape(-1, self.ns, npar), axis=0 + 1)
        spec = spec[:, self.lines, :] * self.weights[None, :, None]
        spec = spec.reshape(-1, npar)
        return np.vstack([spec.real, spec.imag])


def fit_output_error(theta0, simulate_fn, jacobian_fn, unpack_model, train,
                     validation, lm_options, transient_periods=1,
                     frequency_weighting=None):
    """Run the LM output-error fit and select the best-validation iterate.

    Parameters
    ----------
    simulate_fn : callable(theta, u) -> y
        Raises SimulationError on divergence.
    jacobian_fn : callable(theta, u) -> (len(u), n_par) array
    unpack_model : callable(theta) -> model with ``simulate``
    train, validation : Dataset
        ``validation`` may be None (selection then falls back to cost).

    Returns
    -------
    (theta_best, details) with details holding the per-iteration log,
    selected iteration, status, and rms summaries.
    """
    u = train.u.samples
    y_true = train.y.samples
    if train.periods is not None and transient_periods > 0:
        ns = train.samples_per_period
        discard = transient_periods * ns
        u_ext = np.concatenate([np.tile(u[:ns], transient_periods), u])
    else:
        discard = 0
        u_ext = u

    fw = frequency_weighting

    def residual(theta):
        err = simulate_fn(theta, u_ext)[discard:] - y_true
        return fw.residual(err) if fw is not None else err

    def jacobian(theta):
        jac = jacobian_fn(theta, u_ext)[discard:]
        return fw.jacobian(jac) if fw is not None else jac

    def validation_rms(theta):
        if validation is None:
            return None
        model = unpack_model(theta)
        try:
            if validation.periods is not None and transient_periods > 0:
                nsv = validation.samples_per_period
                uv = np.concatenate(
                    [np.tile(validation.u.samples[:nsv], transient_periods),
                     validation.u.samples])
                y_val = model.simulate(uv)[transient_periods * nsv:]
            else:
                y_val = model.simulate(validation.u.samples)
        except SimulationError:
            return np.inf
        return rms_db(y_val - validation.y.samples)

    candidates = []
    val_by_iter = {}

    def on_accept(iteration, theta, cost):
        val = validation_rms(theta)
        key = cost if val is None else val
        val_by_iter[iteration] = val
        candidates.append((key, iteration, theta.copy()))

    result = levenberg_marquardt(residual, jacobian, theta0, lm_options, on_accept)

    best_key, best_iter, best_theta = min(candidates, key=lambda c: (c[0], c[1]))

    # per-iteration log with the validation value carried through rejections
    log = []
    last_val = val_by_iter.get(0)
    log.append({"iteration": 0, "cost": None, "lambda": lm_options.lambda_init,
                "accepted": True, "rejections": 0, "val_rms_db": last_val})
    for entry in result.history:
        if entry["accepted"]:
            last_val = val_by_iter.get(entry["iteration"], last_val)
        record = dict(entry)
        record["val_rms_db"] = last_val
        log.append(record)

    err_best = simulate_fn(best_theta, u_ext)[discard:] - y_true
    details = {
        "iterations": log,
        "selected_iteration": best_iter,
        "train_rms_db": rms_db(err_best),
        "validation_rms_db": val_by_iter.get(best_iter),
        "status": result.status,
    }
    return best_theta, details
