"""Two-groups decompositions of the Gaussian signal-plus-noise model.

``Y = X + Z`` with ``Z ~ N(0, 1)`` and ``X`` drawn from a finite mixture of
atoms and continuous components. The package computes exact posterior rates
(``lnsr``, ``clar``, ``lfsr``), the two-groups decompositions they come from,
sparse-limit thresholds, and data-driven estimates under the zero density
assumption.
"""

from .distributions import (
    Dataset,
    Kind,
    SignalComponent,
    SignalDistribution,
    atoms,
    cauchy,
    dirac_cauchy,
    integrate,
    laplace,
    make_rng,
    marginal_cdf,
    marginal_density,
    non_null_proportion,
    normal,
    null_prior,
    point_mass,
    sample,
    single,
    sparsity_rate,
    student_t,
    three_point,
)
from .errors import (
    ClarityError,
    CompatibilityError,
    DegenerateError,
    DomainError,
    NonConvergence,
    NoRoot,
    SymmetryError,
    UnstableDenominatorWarning,
)
from .estimation import LfdrEstimate, Method, estimate_on_grid, sinc_clar_estimate, zda_lfdr_estimate
from .posterior import (
    CompatibilityReport,
    PosteriorCurves,
    activity_joint_density,
    activity_prob_given_x,
    asymmetric_active_model,
    asymmetric_consistency_check,
    clar,
    compatibility_check,
    compatible_three_point,
    exp_posterior_mean,
    lfsr,
    lnsr,
    posterior_curves,
    pvalue_density,
    sech_posterior_mean,
    sign_error_prob,
    solve_compatible_atom,
    weighted_sech,
)
from .quadrature import IntegrationConfig
from .simulate import (
    ExperimentConfig,
    ExperimentResult,
    emit_decomposition_figures,
    run_estimator_experiment,
    run_perturbation_demo,
)
from .sparse_limit import (
    ExceedanceFamily,
    SparseFamilyProbe,
    I0_cauchy_slab,
    J_alpha,
    delta_regular_variation,
    delta_threshold,
    exceedance_integral,
    gamma_alpha,
    sparse_rate_asymptotic,
    threshold_convergence_probe,
)
from .twogroups import (
    HInterval,
    TwoGroupsDecomposition,
    f1_from_eta,
    generic_model,
    h_interval,
    inactive_active_model,
    null_nonnull_model,
    zda_holds,
)

__version__ = "0.1.0"
