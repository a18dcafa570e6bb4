"""Stochastic integration with respect to Gaussian fields via chaos expansion."""

from .basis import BasisFamily, QuadratureRule, inner_product, quad_singular
from .chaos import (
    ChaosExpansion,
    HValuedChaos,
    chaos_eval,
    malliavin_derivative,
    truncate_expansion,
    wick_exp_first_chaos,
    wick_product,
    xi_alpha_eval,
)
from .errors import (
    ChaosFieldError,
    ConfigurationError,
    DimensionError,
    DomainError,
    InvalidCovarianceError,
    UnsupportedKernelError,
)
from .hermite import hermite, hermite_table
from .integrals import (
    AdmissibilityReport,
    admissibility_diagnostic,
    brownian_path_integrand,
    field_ito_integral,
    ito_integral,
    localize_integrand,
    malliavin_trace,
    strat_integral,
    strat_via_trace,
)
from .kernels import (
    CovarianceFunction,
    KernelSpec,
    StepFunction,
    brownian_covariance,
    brownian_kernel,
    covariance_from_kernel,
    fbm_c_h,
    fbm_covariance,
    fbm_k1,
    fbm_kernel,
    fbm_kernel_dt,
    fbm_kernel_spec,
    grid_kernel_from_csv,
    hr_gram,
    k1_empirical,
    k_mk,
    kstar_apply,
    kstar_apply_step,
    m_tilde,
    op_norm_bound,
    op_norm_estimate,
)
from .mc import (
    SampleBatch,
    discrete_ito,
    discrete_strat,
    mc_compare,
    sample_batch,
    synthesize_path,
    synthesize_paths,
)
from .multiindex import MultiIndex, Truncation, enumerate_multiindices, index_map
from .sde import (
    PropagatorSolution,
    sample_wick_exponential,
    solve_closed_form,
    solve_picard,
)

__version__ = "0.1.0"
