"""oscint: FLOP-budgeted integration of oscillatory 1D functions.

Newton-Cotes quadrature rules with an exact operation-count model, six
parametric integrand families (including a Rayleigh-Plesset bubble
trajectory), deterministic dataset generation against a trapezoid
surrogate truth, a from-scratch feed-forward network integrator, and a
benchmark harness that compares the two approaches at equal accuracy.
"""

from .bessel import bessel_j0
from .config import ExperimentConfig, load_config
from .dataset import (
    Dataset,
    Sample,
    SplitDataset,
    build_dataset,
    read_csv,
    split,
    surrogate_truth,
    truth_refinement_check,
    with_n_in,
    write_csv,
)
from .integrands import (
    IntegrandFamily,
    eval_family,
    family_scale,
    most_oscillatory_params,
    param_space,
    sample_params,
)
from .metrics import (
    AlphaResult,
    Method,
    MethodCurve,
    alpha,
    alpha_vs_oscillatoriness,
    best_quadrature_flops,
    flops_at_accuracy,
    normalized_mse,
)
from .mlp import (
    Architecture,
    FlopMode,
    MlpNetwork,
    TrainConfig,
    TrainReport,
    forward,
    gradient,
    init,
    load,
    memory_bytes,
    nn_flops,
    save,
    train,
)
from .quadrature import (
    Grid,
    QuadratureRule,
    empirical_order,
    flop_cost,
    integrate,
    make_grid,
)
from .rayleigh_plesset import RpConfig, RpTrajectory, rp_solve

__version__ = "0.1.0"
