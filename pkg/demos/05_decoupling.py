"""Decoupling the polynomial model into parallel univariate branches.

The multivariate polynomial of the trained model is probed at 500 random
points; stacking the Jacobians gives a 4 x 4 x 500 tensor whose canonical
polyadic decomposition factors the map into r branches: mix (states, input)
with V, apply one univariate polynomial per branch, mix back with W.  The
branch count and polynomial degree trade parameters against accuracy:
(2n + d + 1) r coefficients instead of the combinatorial monomial count.

This demo decouples a stored model (run demo 04 first, or it retrains) at a
few (r, d) candidates and prints the parameter-count/error trade-off.

Run:  python demos/05_decoupling.py   (a few minutes)
Writes the branch shapes of the best model to demos/output/branches.csv.
"""

import os

import numpy as np

from pnlssdec import (BoucWenParams, LmOptions, MultisineSpec, PnlssModel,
                      SimConfig, SweptSineSpec, TrainOptions,
                      build_jacobian_tensor, check_uniqueness, cpd,
                      estimate_rank, make_benchmark_datasets, output_error_db,
                      sweep_and_select)
from pnlssdec.decouple import sampling_scales

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

train_spec = MultisineSpec(8192, 750.0, 5.0, 150.0, 55.0, period_count=2, seed=0)
test_specs = {
    "multisine": MultisineSpec(8192, 750.0, 5.0, 150.0, 50.0, period_count=2,
                               seed=1000),
    "sweptsine": SweptSineSpec(20.0, 50.0, 10.0, 50.0, 750.0),
}
data = make_benchmark_datasets(BoucWenParams.benchmark(), train_spec, test_specs,
                               SimConfig(), train_realizations=4)
datasets = {"train": data["train"][0], "validation": data["validation"],
            "test_multisine": data["test_multisine"],
            "test_sweptsine": data["test_sweptsine"]}

model_path = os.path.join(OUT, "pnlss_model.json")
if os.path.exists(model_path):
    model = PnlssModel.load(model_path)
    print(f"loaded trained model from {model_path}")
else:
    print("no stored model; training one first (see demo 04) ...")
    from pnlssdec import estimate_bla, fit_linear_model, train_pnlss

    bla = estimate_bla(data["train"])
    init = PnlssModel.from_linear(fit_linear_model(bla, 3), state_degrees=(2, 3))
    model, _ = train_pnlss(init, datasets["train"], datasets["validation"],
                           TrainOptions(lm=LmOptions(max_iter=100)))
    model.save(model_path)

full_err = output_error_db(model, datasets["test_multisine"])
print(f"full model: {model.nonlinear_parameter_count} nonlinear parameters, "
      f"multisine test rms {full_err:.2f} dB")

# rank of the Jacobian tensor suggests how many branches are worth scanning
scale = sampling_scales(model, datasets["train"].u.samples)
tensor = build_jacobian_tensor(model, 500, seed=1, scale=scale)
scan = estimate_rank(tensor, 8, tol=1e-3, seed=2)
print(f"jacobian tensor rank scan: rank {scan.rank} "
      f"(fit errors {[f'{e:.1e}' for e in scan.fit_errors]})")
print(f"uniqueness inequality at n=3: r=6 -> {check_uniqueness(3, 6)}, "
      f"r=7 -> {check_uniqueness(3, 7)}")

# small sweep around the sweet spot; the full grid is r<=6, d<=11, 5 trials
options = TrainOptions(lm=LmOptions(max_iter=100, ftol=1e-8, ftol_patience=5))
report, best = sweep_and_select(model, datasets, r_list=[2, 3], d_list=[3, 7, 10],
                                trials=2, options=options, seed=7, workers=2)
print("\n r  d   params   val rms      test rms")
for rec in report.records:
    print(f" {rec.r}  {rec.d:2d}   {rec.param_count:4d}   "
          f"{rec.val_rms_db:8.2f}   {rec.test_ms_rms_db:8.2f} dB")
rec = report.best_record
print(f"\nselected: r={rec.r}, d={rec.d} with {rec.param_count} parameters "
      f"({100 * rec.param_count / model.nonlinear_parameter_count:.0f}% of full), "
      f"test rms {rec.test_ms_rms_db:.2f} dB vs full {full_err:.2f} dB")

# branch shapes along the test trajectory
_, states = best.simulate_with_states(datasets["test_multisine"].u.samples)
s_tilde = best.branch_inputs(states, datasets["test_multisine"].u.samples)
g_vals = best.branch_values(s_tilde)
rows = ["branch,s_tilde,g"]
for l in range(best.branch_count):
    for i in range(0, s_tilde.shape[0], 8):
        rows.append(f"{l},{s_tilde[i, l]:.8e},{g_vals[i, l]:.8e}")
with open(os.path.join(OUT, "branches.csv"), "w") as fh:
    fh.write("\n".join(rows) + "\n")
best.save(os.path.join(OUT, "decoupled_model.json"))
print(f"wrote {OUT}/branches.csv and {OUT}/decoupled_model.json")
