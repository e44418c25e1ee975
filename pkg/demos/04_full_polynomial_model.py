"""Training the full polynomial nonlinear state-space model.

The linear baseline is extended with all degree-2 and degree-3 monomials of
the three states and the input in the state equation: 30 monomials x 3
state rows = 90 nonlinear coefficients, initialized at zero.  A
Levenberg-Marquardt output-error fit over all parameters then drives the
multisine test error from the linear -76 dB down to about -94 dB, selecting
the iterate with the lowest validation error.

Run:  python demos/04_full_polynomial_model.py   (about a minute)
Writes the trained model to demos/output/pnlss_model.json.
"""

import os

import numpy as np

from pnlssdec import (BoucWenParams, LmOptions, MultisineSpec, PnlssModel,
                      SimConfig, SweptSineSpec, TrainOptions, estimate_bla,
                      fit_linear_model, linear_rms_error, make_benchmark_datasets,
                      monomial_count, output_error_db, train_pnlss)

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

bla = estimate_bla(data["train"])
linear = fit_linear_model(bla, order=3)

init = PnlssModel.from_linear(linear, state_degrees=(2, 3))
print(f"model: order 3, degrees (2, 3) in the state equation -> "
      f"{init.nonlinear_parameter_count} nonlinear coefficients")
print(f"(state+output blocks together would be {monomial_count(3, 3)})")

model, report = train_pnlss(init, data["train"][0], data["validation"],
                            TrainOptions(lm=LmOptions(max_iter=100)))
print(f"training: {len(report.iterations) - 1} iterations, status "
      f"{report.status}, selected iterate {report.selected_iteration}")
print(f"training rms {report.train_rms_db:.2f} dB, "
      f"validation rms {report.validation_rms_db:.2f} dB")

print(f"{'model':<8} {'multisine test':>15} {'swept-sine test':>16}")
print(f"{'linear':<8} {linear_rms_error(linear, data['test_multisine']):>12.2f} dB"
      f" {linear_rms_error(linear, data['test_sweptsine']):>13.2f} dB")
print(f"{'pnlss':<8} {output_error_db(model, data['test_multisine']):>12.2f} dB"
      f" {output_error_db(model, data['test_sweptsine']):>13.2f} dB")

model.save(os.path.join(OUT, "pnlss_model.json"))
report.to_csv(os.path.join(OUT, "pnlss_training_log.csv"))
print(f"wrote {OUT}/pnlss_model.json")
