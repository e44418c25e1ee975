"""Acceptance suite: benchmark-scale pipeline targets and property checks.

Every numbered criterion runs at its stated tolerance and prints one
pass/fail line (run with ``pytest tests/test_acceptance.py -v -s``).  The
expensive pipeline artifacts (datasets, linear model, full polynomial
model, decoupling sweep) are built once per session and shared.

Criterion 5 (degree-2 failure mode) is known to fail: fully converged
quadratic decoupled models reach about -85 dB on this benchmark (matching
the -85.3 dB of a full quadratic model), which is ~10 dB above the full
model rather than the required >= 15 dB.  The test states the criterion
faithfully and reports the measured gaps.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

import pnlssdec as p
from pnlssdec.cli import PipelineConfig


def _report(num, name, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {num} [{name}]: {status} ({detail})")
    return ok


# ---------------------------------------------------------------------------
# shared benchmark-scale artifacts


@pytest.fixture(scope="session")
def config():
    return PipelineConfig(seed=0)


@pytest.fixture(scope="session")
def timings():
    return {}


@pytest.fixture(scope="session")
def bench(config, timings):
    t0 = time.time()
    exc = config.data["excitation"]
    data = p.make_benchmark_datasets(
        config.bouc_wen_params(),
        config.train_spec(),
        {"multisine": config.test_multisine_spec(),
         "sweptsine": config.sweptsine_spec()},
        config.sim_config(),
        train_realizations=exc["train_realizations"],
        transient_periods=exc["transient_periods"],
    )
    timings["generate"] = time.time() - t0
    return data


@pytest.fixture(scope="session")
def linear_model(config, bench, timings):
    t0 = time.time()
    bla = p.estimate_bla(bench["train"])
    model = p.fit_linear_model(bla, config.data["model"]["order"])
    timings["linear"] = time.time() - t0
    return model


@pytest.fixture(scope="session")
def pnlss_model(config, bench, linear_model, timings):
    t0 = time.time()
    init = p.PnlssModel.from_linear(
        linear_model,
        state_degrees=config.data["model"]["state_degrees"],
        output_degrees=config.data["model"]["output_degrees"])
    model, report = p.train_pnlss(init, bench["train"][0], bench["validation"],
                                  config.train_options())
    timings["pnlss"] = time.time() - t0
    return model, report


@pytest.fixture(scope="session")
def sweep(config, bench, pnlss_model, timings):
    """Reduced sweep (criterion 4 allows r in {2,3}, d in {3,7,10}, 3 trials);
    r=1 and d=2 are added for the stagnation/failure-mode checks."""
    model, _ = pnlss_model
    datasets = {
        "train": bench["train"][0],
        "validation": bench["validation"],
        "test_multisine": bench["test_multisine"],
        "test_sweptsine": bench["test_sweptsine"],
    }
    options = p.TrainOptions(lm=p.LmOptions(max_iter=100, ftol=1e-8,
                                            ftol_patience=5))
    t0 = time.time()
    report, best = p.sweep_and_select(
        model, datasets,
        r_list=[1, 2, 3], d_list=[2, 3, 7, 10], trials=3,
        options=options, seed=42,
        n_points=config.data["sweep"]["tensor_points"],
        cpd_restarts=config.data["sweep"]["cpd_restarts"],
        workers=2,
    )
    timings["sweep"] = time.time() - t0
    return report, best


# ---------------------------------------------------------------------------
# criterion 1: linearized resonance


def test_criterion_1_linearized_resonance():
    t0 = time.time()
    model = p.linearized_model(p.BoucWenParams.benchmark(), 750.0)
    fn = p.natural_frequency(model)
    elapsed = time.time() - t0
    ok = abs(fn - 35.59) <= 0.01 and elapsed < 1.0
    assert _report(1, "linearized resonance",
                   ok, f"natural frequency {fn:.4f} Hz, {elapsed:.3f} s")


# ---------------------------------------------------------------------------
# criterion 2: linear baseline on the 50 N multisine test


def test_criterion_2_linear_baseline(bench, linear_model, timings):
    err = p.linear_rms_error(linear_model, bench["test_multisine"])
    runtime = timings["generate"] + timings["linear"]
    ok = -79.0 <= err <= -73.0 and runtime < 300.0
    assert _report(2, "linear baseline",
                   ok, f"multisine test rms {err:.2f} dB (target -76 +/- 3), "
                       f"{runtime:.1f} s incl. data generation")


# ---------------------------------------------------------------------------
# criterion 3: full polynomial model


def test_criterion_3_full_pnlss(bench, pnlss_model, timings):
    model, report = pnlss_model
    err = p.output_error_db(model, bench["test_multisine"])
    count = model.nonlinear_parameter_count
    ok = (count == 90) and (-98.0 <= err <= -90.0) and timings["pnlss"] < 7200.0
    assert _report(3, "full polynomial model",
                   ok, f"{count} nonlinear parameters, multisine test rms "
                       f"{err:.2f} dB (target [-98, -90]), "
                       f"{timings['pnlss']:.0f} s training")


# ---------------------------------------------------------------------------
# criterion 4: decoupling payoff


def test_criterion_4_decoupling_payoff(bench, pnlss_model, sweep):
    model, _ = pnlss_model
    report, best = sweep
    full_err = p.output_error_db(model, bench["test_multisine"])
    rec = report.best_record
    assert rec is not None
    # "within 3 dB" reads as: at most 3 dB worse (better is success)
    ok = (rec.param_count <= 54) and (rec.test_ms_rms_db <= full_err + 3.0)
    assert _report(4, "decoupling payoff",
                   ok, f"selected r={rec.r}, d={rec.d}: {rec.param_count} "
                       f"parameters (<= 54), test rms {rec.test_ms_rms_db:.2f} dB "
                       f"vs full {full_err:.2f} dB")


# ---------------------------------------------------------------------------
# criterion 5: degree-2 failure mode (known red; see module docstring)


def test_criterion_5_degree2_failure_mode(bench, pnlss_model, sweep):
    model, _ = pnlss_model
    report, _ = sweep
    full_err = p.output_error_db(model, bench["test_multisine"])
    gaps = [(rec.r, rec.trial, rec.test_ms_rms_db - full_err)
            for rec in report.records
            if rec.d == 2 and rec.status == "ok"
            and np.isfinite(rec.test_ms_rms_db)]
    assert gaps, "sweep produced no degree-2 models"
    worst = min(g for _, _, g in gaps)
    detail = ", ".join(f"r={r} t={t}: +{g:.1f} dB" for r, t, g in gaps)
    ok = worst >= 15.0
    assert _report(5, "degree-2 failure mode",
                   ok, f"required >= +15 dB above full model; measured {detail}")


# ---------------------------------------------------------------------------
# criterion 6: property suite


def test_criterion_6a_cpd_exact_recovery():
    from test_decouple import match_columns, rank_r_tensor

    worst = 0.0
    for r in (1, 2, 3):
        tensor, (w, v, h) = rank_r_tensor((4, 4, 50), r, seed=r + 10)
        factors = p.cpd(tensor, r, restarts=5, seed=0)
        worst = max(worst, factors.fit_error)
        match_columns(v / np.linalg.norm(v, axis=0), factors.v)
    assert _report("6a", "CPD exact recovery", worst < 1e-8,
                   f"worst fit error {worst:.2e} for ranks 1..3")


def test_criterion_6b_vandermonde_branch_fit(rng):
    from pnlssdec.decouple import CpdFactors, JacobianTensor, fit_branches

    degree = 6
    points = rng.standard_normal((60, 4))
    v = rng.standard_normal((4, 2))
    v /= np.linalg.norm(v, axis=0)
    true = rng.standard_normal((2, degree - 1))
    h = np.empty((60, 2))
    for l in range(2):
        s = points @ v[:, l]
        h[:, l] = sum((q + 2) * true[l, q] * s ** (q + 1) for q in range(degree - 1))
    factors = CpdFactors(np.ones((4, 2)), v, h, 0.0)
    coeffs = fit_branches(factors, JacobianTensor(np.zeros((4, 4, 60)), points, 0),
                          degree)
    err = float(np.max(np.abs(coeffs - true)))
    assert _report("6b", "Vandermonde branch fit", err < 1e-8,
                   f"coefficient error {err:.2e}")


def test_criterion_6c_reexpansion_equivalence(rng):
    from test_decouple import toy_decoupled

    model = toy_decoupled(n=2, r=2, degree=3, seed=5)
    full = model.to_pnlss()
    u = 0.8 * rng.standard_normal(500)
    y_dec = model.simulate(u)
    y_full = full.simulate(u)
    rel = float(np.max(np.abs(y_dec - y_full)) / np.max(np.abs(y_dec)))
    assert _report("6c", "re-expansion equivalence", rel < 1e-10,
                   f"relative deviation {rel:.2e}")


def test_criterion_6d_lm_jacobians(rng):
    from conftest import toy_pnlss
    from pnlssdec import _kernels
    from pnlssdec.decouple import _pack_decoupled, _unpack_decoupled
    from pnlssdec.pnlss import _pack_pnlss, _unpack_pnlss
    from test_decouple import toy_decoupled
    from test_pnlss import finite_difference_jacobian

    u = 0.5 * rng.standard_normal(200)

    full = toy_pnlss(n=2, degrees=(2,), coeff_scale=0.01, seed=3, output=True)
    _, _, jac = _kernels.pnlss_jac(*full._sim_arrays(u))
    jac_fd = finite_difference_jacobian(
        lambda th: _unpack_pnlss(th, full).simulate(u), _pack_pnlss(full))
    rel_full = float(np.max(np.abs(jac - jac_fd)) / np.abs(jac_fd).max())

    dec = toy_decoupled(n=2, r=2, degree=3, seed=7)
    _, _, jac = _kernels.dec_jac(*dec._sim_arrays(u))
    jac_fd = finite_difference_jacobian(
        lambda th: _unpack_decoupled(th, dec).simulate(u), _pack_decoupled(dec))
    rel_dec = float(np.max(np.abs(jac - jac_fd)) / np.abs(jac_fd).max())

    ok = rel_full < 1e-5 and rel_dec < 1e-5
    assert _report("6d", "LM analytic Jacobians", ok,
                   f"full {rel_full:.2e}, decoupled {rel_dec:.2e}")


def test_criterion_6e_monomial_count():
    ok = all(p.monomial_count(n, d) == len(p.MonomialBasis(n + 1, range(2, d + 1)))
             * (n + 1)
             for n in range(1, 5) for d in range(2, 8))
    assert _report("6e", "monomial count vs enumeration", ok, "n <= 4, d <= 7")


def test_criterion_6f_newmark_convergence():
    from test_boucwen import linear_steady_state

    params = replace(p.BoucWenParams.benchmark(), beta=0.0)
    spec = p.MultisineSpec(8192, 750.0, 5.0, 150.0, 30.0, period_count=2, seed=7)
    u = p.generate_multisine(spec)
    y_ss = linear_steady_state(params, u.samples[:8192], 8192, 750.0,
                               spec.excited_lines())
    errs = []
    for factor in (5, 10, 20):
        ds = p.boucwen.simulate(params, u, p.SimConfig(oversample=factor))
        errs.append(np.linalg.norm(ds.y.samples[8192:] - y_ss) / np.linalg.norm(y_ss))
    ratios = (errs[0] / errs[1], errs[1] / errs[2])
    ok = all(3.5 < r < 4.5 for r in ratios)
    assert _report("6f", "Newmark step-halving", ok,
                   f"error ratios {ratios[0]:.2f}, {ratios[1]:.2f}; "
                   f"linear-oracle error at default rate {errs[2]:.2e}")


def test_criterion_6g_multisine_purity():
    spec = p.MultisineSpec(8192, 750.0, 5.0, 150.0, 55.0, seed=1)
    u = p.generate_multisine(spec)
    spectrum = np.abs(np.fft.rfft(u.samples))
    lines = spec.excited_lines()
    mask = np.ones(spectrum.size, dtype=bool)
    mask[lines] = False
    leak = float(spectrum[mask].max() / spectrum[lines].max())
    assert _report("6g", "multisine spectral purity", leak < 1e-12,
                   f"worst non-excited line {leak:.2e} relative")


# ---------------------------------------------------------------------------
# criterion 7: self-identification


def test_criterion_7_self_identification():
    from conftest import periodic_dataset, toy_pnlss
    from pnlssdec.linid import LinearModel
    from test_decouple import toy_decoupled

    t0 = time.time()
    spec = p.MultisineSpec(512, 750.0, 5.0, 150.0, 1.0, period_count=2, seed=11)
    rng = np.random.default_rng(0)

    generator = toy_pnlss(n=2, degrees=(2, 3), seed=5)
    train = periodic_dataset(generator, spec)
    val = periodic_dataset(generator, replace(spec, seed=12), label="validation")
    perturbed = p.PnlssModel(
        LinearModel(generator.linear.a * (1 + 0.01 * rng.standard_normal((2, 2))),
                    generator.linear.b, generator.linear.c, generator.linear.d,
                    generator.linear.fs),
        generator.state_basis, generator.output_basis,
        generator.e_coeffs * (1 + 0.01 * rng.standard_normal(
            generator.e_coeffs.shape)),
        generator.f_coeffs)
    _, rep_full = p.train_pnlss(perturbed, train, val,
                                p.TrainOptions(lm=p.LmOptions(max_iter=50)))

    dec = toy_decoupled(n=2, r=2, degree=3, seed=10)
    train_d = periodic_dataset(dec, spec)
    val_d = periodic_dataset(dec, replace(spec, seed=13), label="validation")
    dec_init = p.DecoupledModel(
        dec.linear,
        dec.v * (1 + 0.01 * rng.standard_normal(dec.v.shape)),
        dec.w * (1 + 0.01 * rng.standard_normal(dec.w.shape)),
        dec.coeffs * (1 + 0.01 * rng.standard_normal(dec.coeffs.shape)))
    _, rep_dec = p.train_decoupled(dec_init, train_d, val_d,
                                   p.TrainOptions(lm=p.LmOptions(max_iter=50)))

    elapsed = time.time() - t0
    ok = (rep_full.train_rms_db < -120.0 and rep_dec.train_rms_db < -120.0
          and elapsed < 600.0)
    assert _report(7, "self-identification", ok,
                   f"full {rep_full.train_rms_db:.1f} dB, "
                   f"decoupled {rep_dec.train_rms_db:.1f} dB, {elapsed:.0f} s")


# ---------------------------------------------------------------------------
# paper-consistency observations attached to the sweep (stated tolerances)


def test_sweep_branch_stagnation_levels(bench, pnlss_model, sweep):
    report, _ = sweep
    best = {}
    for rec in report.records:
        if rec.status == "ok" and rec.d > 2 and np.isfinite(rec.test_ms_rms_db):
            best[rec.r] = min(best.get(rec.r, np.inf), rec.test_ms_rms_db)
    # single-branch models stagnate near -85 dB, two-branch near -91 dB
    print(f"\nbranch stagnation: best per branch count {best}")
    assert best[1] == pytest.approx(-85.0, abs=3.0)
    assert best[2] == pytest.approx(-91.0, abs=3.0)


def test_sweep_selection_is_validation_minimum(sweep):
    report, _ = sweep
    finite = [rec.val_rms_db for rec in report.records
              if rec.status == "ok" and np.isfinite(rec.val_rms_db)]
    assert report.best_record.val_rms_db == min(finite)
