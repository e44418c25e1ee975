"""Nonlinear state-space identification of a hysteretic benchmark with
polynomial decoupling for parameter reduction.

Typical flow: generate benchmark data (:mod:`pnlssdec.boucwen`), estimate
the best linear approximation and a linear model (:mod:`pnlssdec.linid`),
train the full polynomial model (:mod:`pnlssdec.pnlss`), then decouple and
re-optimize (:mod:`pnlssdec.decouple`).  :mod:`pnlssdec.cli` wires the
stages into reproducible pipeline commands.
"""

from .boucwen import (BoucWenParams, SimConfig, linearized_model,
                      make_benchmark_datasets, natural_frequency)
from .decouple import (CpdFactors, DecoupledModel, JacobianTensor,
                       assemble_decoupled, build_jacobian_tensor,
                       check_uniqueness, cpd, estimate_rank, fit_branches,
                       sweep_and_select, train_decoupled)
from .errors import (DivergenceError, NewtonConvergenceError, OrderTooHighError,
                     SimulationError)
from .levmarq import LmOptions
from .linid import (FrfEstimate, LinearModel, estimate_bla, fit_linear_model,
                    linear_rms_error, output_error_db, simulate_record)
from .pnlss import (MonomialBasis, PnlssModel, TrainOptions, TrainReport,
                    evaluate_basis, monomial_count, simulate_pnlss, train_pnlss)
from .signals import (Dataset, MultisineSpec, Signal, SweptSineSpec,
                      generate_multisine, generate_swept_sine, rms, rms_db)

__version__ = "0.1.0"

__all__ = [
    "BoucWenParams", "SimConfig", "linearized_model", "make_benchmark_datasets",
    "natural_frequency",
    "CpdFactors", "DecoupledModel", "JacobianTensor", "assemble_decoupled",
    "build_jacobian_tensor", "check_uniqueness", "cpd", "estimate_rank",
    "fit_branches", "sweep_and_select", "train_decoupled",
    "DivergenceError", "NewtonConvergenceError", "OrderTooHighError",
    "SimulationError",
    "LmOptions",
    "FrfEstimate", "LinearModel", "estimate_bla", "fit_linear_model",
    "linear_rms_error", "output_error_db", "simulate_record",
    "MonomialBasis", "PnlssModel", "TrainOptions", "TrainReport",
    "evaluate_basis", "monomial_count", "simulate_pnlss", "train_pnlss",
    "Dataset", "MultisineSpec", "Signal", "SweptSineSpec",
    "generate_multisine", "generate_swept_sine", "rms", "rms_db",
    "__version__",
]
