"""Neural tangent kernels for smooth, binary and surrogate-gradient networks."""

__version__ = "0.1.0"

from .activations import (
    ActivationSpec,
    SurrogateSpec,
    make_erf_m,
    make_sign,
    parse_activation,
    parse_surrogate,
    surrogate_erf_deriv,
    surrogate_rect,
    surrogate_sech2,
)
from .analytic_kernels import (
    KIND_CROSS_NNGP,
    KIND_NNGP,
    KIND_NNGP_DOT,
    KIND_NTK,
    KIND_SG_NTK,
    KIND_SURROGATE_SIGMA,
    MODE_CLOSED,
    MODE_QUAD,
    MODE_SIGN,
    AnalyticGram,
    Divergent,
    KernelSpec,
    erf_spec,
    is_divergent,
    kernel_matrix,
    kernel_value,
    sign_spec,
    singular_exponent,
)
from .empirical_kernels import (
    empirical_generalized_ntk,
    empirical_ntk,
    kernel_gram,
    quasi_jacobian,
)
from .experiments import (
    Dataset,
    ExperimentReport,
    make_sphere_dataset,
    run_fig1,
    run_fig2,
    run_fig3,
    run_train_ensemble,
    target_polynomial,
    validate,
    write_report,
)
from .gp_regression import (
    GPPosterior,
    check_learning_rate,
    eta_critical,
    gp_posterior,
    gram_spectrum,
    nw_classify,
    posterior_cov,
    posterior_mean,
    posterior_std,
)
from .network import Network, NetworkConfig, ensemble_statistics, forward, forward_batch, init
from .training import (
    TrainConfig,
    TrainTrace,
    init_ensemble,
    kernel_drift,
    train,
    train_ensemble,
)
