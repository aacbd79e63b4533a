"""bnlab: a numerical laboratory for norm-minimal deep networks.

Core surfaces:
  * ``bnlab.linalg`` - Jacobi SVD and spectral functionals;
  * ``bnlab.net`` - leaky-ReLU networks, gradients, tangent-kernel quantities;
  * ``bnlab.repcost`` - depth costs of linear maps and constructive builders;
  * ``bnlab.train`` - GD/SGD with ridge and training traces;
  * ``bnlab.diag`` - structural certificates and spectra reports;
  * ``bnlab.experiments`` - data generators and the two experiment pipelines.
"""

from .errors import (
    BnlabError,
    ConstructionError,
    ConvergenceError,
    DivergenceError,
    InputError,
    OracleError,
    PreconditionError,
    ResourceError,
    ScopeError,
)
from .linalg import (
    SvdResult,
    k_det,
    nearest_partial_isometry,
    numerical_rank,
    pinv,
    pseudo_det,
    pseudo_log_gram,
    schatten_pow,
    singular_values,
    svd,
)
from .net import (
    ForwardCache,
    NetParams,
    balancedness_residual,
    forward,
    grad,
    jacobian,
    load_net,
    mse_cost,
    ntk_bilinear_2nd_derivative,
    ntk_gram,
    ntk_trace,
    partial_jacobian,
    save_net,
)
from .repcost import (
    NormAccount,
    RepCostBreakdown,
    counterexample_network,
    counterexample_squared_norm,
    cp_interpolation_network,
    linear_repcost_exact,
    linear_repcost_expansion,
    linear_repcost_gd_oracle,
    norm_account,
    optimal_linear_factorization,
)
from .train import TrainConfig, TrainTrace, init, train_sweep
from .train import train as train_net
from .diag import (
    Certificate,
    SpectralReport,
    cor5_certificate,
    layer_spectra,
    lip_curvature_gap,
    prop6_certificate,
    r1_lower_bound,
    standard_certificates,
    thm3_certificate,
    thm4_certificate,
)
from .experiments import (
    DepthSweepConfig,
    SymmetryConfig,
    gen_rank2,
    gen_symmetry,
    run_depth_sweep,
    run_symmetry,
)

__version__ = "0.1.0"
