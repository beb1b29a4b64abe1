"""Postprocessed IMEX integrators for sampling invariant measures of stiff SDEs and SPDEs."""

from ._core import (
    Chain,
    Method,
    Scheme,
    SchemeCoefficients,
    SemilinearSystem,
    SpectralProblem,
    Stepper,
    chain_invariant,
    check_conditions,
    check_postprocessed_error_bound,
    convergence_order_study,
    coupled_compare,
    exact_invariant,
    global_order_fit,
    l_stability_verdict,
    list_suites,
    moment_ratio,
    postprocessed_error_bound,
    postprocessed_moment_ratio,
    postprocessed_moment_ratio_closed_form,
    regularity_profile,
    run_experiment,
    run_trajectory,
    solve_family,
    step_new_spde,
    time_average,
    trace_distance,
    version,
)

__version__ = version()
