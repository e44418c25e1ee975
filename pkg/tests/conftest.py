"""Shared synthetic model/data builders for the test suite."""

from dataclasses import replace

import numpy as np
import pytest

from pnlssdec.linid import LinearModel
from pnlssdec.pnlss import MonomialBasis, PnlssModel
from pnlssdec.signals import Dataset, MultisineSpec, Signal, generate_multisine


def stable_linear(n=2, fs=750.0, seed=0):
    """Random stable model with poles well inside the unit circle."""
    rng = np.random.default_rng(seed)
    if n == 2:
        rho, ang = 0.8, 0.5
        a = rho * np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
    else:
        a = rng.standard_normal((n, n))
        a *= 0.8 / np.max(np.abs(np.linalg.eigvals(a)))
    b = rng.standard_normal(n)
    c = rng.standard_normal(n)
    return LinearModel(a, b, c, 0.1 * rng.standard_normal(), fs)


def toy_pnlss(n=2, degrees=(2, 3), coeff_scale=5e-3, seed=1, output=False):
    """Small polynomial model that stays stable for unit-scale excitations.

    The polynomial coefficients are scaled down until a bounded probe
    simulation passes, so any seed yields a usable data generator.
    """
    from pnlssdec.errors import SimulationError

    rng = np.random.default_rng(seed)
    linear = stable_linear(n=n, seed=seed)
    model = PnlssModel.from_linear(linear, state_degrees=degrees,
                                   output_degrees=degrees if output else ())
    e_shape = rng.standard_normal(model.e_coeffs.shape)
    f_shape = rng.standard_normal(model.f_coeffs.shape) if output else None
    probe = 1.5 * np.random.default_rng(0).standard_normal(3000)
    scale = coeff_scale
    for _ in range(20):
        model.e_coeffs[:] = scale * e_shape
        if output:
            model.f_coeffs[:] = scale * f_shape
        try:
            y = model.simulate(probe)
        except SimulationError:
            scale /= 4.0
            continue
        if np.max(np.abs(y)) < 1e3:
            return model
        scale /= 4.0
    raise RuntimeError("could not build a stable toy model")


def periodic_dataset(model, spec, transient_periods=2, label="train"):
    """Simulate a model on a tiled multisine and keep the steady-state periods."""
    total = replace(spec, period_count=spec.period_count + transient_periods)
    u = generate_multisine(total)
    y = model.simulate(u.samples)
    ns = spec.samples_per_period
    skip = transient_periods * ns
    u_sig = Signal(u.samples[skip:].copy(), spec.fs,
                   {"kind": "multisine", "spec": {**u.meta["spec"],
                                                  "period_count": spec.period_count}})
    return Dataset(u_sig, Signal(y[skip:].copy(), spec.fs), label=label,
                   periods=spec.period_count, samples_per_period=ns)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
