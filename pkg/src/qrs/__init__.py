"""qrs: quasi-random sampling, discrepancy measures, and resampled collocation
for physics-informed network training."""

from ._kernels import BACKEND
from .autodiff_net import (
    LossParts,
    MlpParams,
    flatten_params,
    forward,
    init_params,
    load_checkpoint,
    loss_and_grad,
    save_checkpoint,
    unflatten_params,
    value_and_laplacian,
    value_grad_laplacian,
)
from .discrepancy import (
    DiscrepancyReport,
    SubsampleBoundParams,
    fit_qmc_rate,
    koksma_bound,
    local_discrepancy,
    star_discrepancy_1d,
    star_discrepancy_nd,
    subsample_discrepancy_bound,
)
from .lowdisc import (
    GeneratorSpec,
    PointSet,
    SobolDirectionTable,
    build_sobol_table,
    generate,
    halton,
    radical_inverse,
    scale_to_box,
    sobol,
    uniform_random,
    write_csv,
)
from .pde_problems import (
    BoundaryBatch,
    PdeProblem,
    allen_cahn_problem,
    poisson_problem,
    residual,
    sample_boundary,
    sine_gordon_problem,
    standard_normals,
)
from .pool_sampler import (
    CoverageResult,
    Pool,
    RadConfig,
    coverage_probability,
    draw_rad_batch,
    draw_uniform_batch,
    expected_missed_fraction,
    rad_weights,
    simulate_coverage,
)
from .quadrature import (
    ConvergenceCurve,
    Integrand,
    convergence_study,
    estimate,
    f_exp,
    f_sin,
    fit_loglog_slope,
)
from .trainer import (
    ComparisonTable,
    TrainConfig,
    TrainDiverged,
    TrainReport,
    compare_samplers,
    evaluate_rel_l2,
    parse_sampler,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundaryBatch",
    "ComparisonTable",
    "ConvergenceCurve",
    "CoverageResult",
    "DiscrepancyReport",
    "GeneratorSpec",
    "Integrand",
    "LossParts",
    "MlpParams",
    "PdeProblem",
    "PointSet",
    "Pool",
    "RadConfig",
    "SobolDirectionTable",
    "SubsampleBoundParams",
    "TrainConfig",
    "TrainDiverged",
    "TrainReport",
    "allen_cahn_problem",
    "build_sobol_table",
    "compare_samplers",
    "convergence_study",
    "coverage_probability",
    "draw_rad_batch",
    "draw_uniform_batch",
    "estimate",
    "evaluate_rel_l2",
    "expected_missed_fraction",
    "f_exp",
    "f_sin",
    "fit_loglog_slope",
    "fit_qmc_rate",
    "flatten_params",
    "forward",
    "generate",
    "halton",
    "init_params",
    "koksma_bound",
    "load_checkpoint",
    "local_discrepancy",
    "loss_and_grad",
    "parse_sampler",
    "poisson_problem",
    "rad_weights",
    "radical_inverse",
    "residual",
    "sample_boundary",
    "save_checkpoint",
    "scale_to_box",
    "simulate_coverage",
    "sine_gordon_problem",
    "sobol",
    "standard_normals",
    "star_discrepancy_1d",
    "star_discrepancy_nd",
    "subsample_discrepancy_bound",
    "train",
    "uniform_random",
    "unflatten_params",
    "value_and_laplacian",
    "value_grad_laplacian",
    "write_csv",
    "__version__",
]
