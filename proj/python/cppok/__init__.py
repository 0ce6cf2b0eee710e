"""Order-k compound Poisson processes with random clocks.

Thin Python surface over the C++ core: counting distribution and moments,
dispersion classification, jump-decomposition weights, subordinator and
first-passage sampling, time-changed process formulas, fitting/comparison
statistics, and the config-driven simulation pipeline.
"""

from ._core import (  # noqa: F401
    ClockKind,
    DispersionReport,
    JumpLaw,
    LevyMeasureWeights,
    MtssParams,
    OrderKParams,
    PowerLawFit,
    TimeChangedSpec,
    TwoSampleResult,
    __version__,
    classify_dependence,
    config_hash,
    dirac_jump,
    discrete_jump,
    dispersion,
    exponential_jump,
    fit_power_law,
    ks_critical_value,
    laplace_exponent,
    levy_weights,
    marginal_cdf,
    mean,
    mtss_mean,
    mtss_variance,
    pgf,
    pok_pmf,
    pok_pmf_enum,
    run_verify_suite,
    sample_compound_path,
    sample_counting_path,
    sample_inverse,
    sample_subordinator,
    sample_z1,
    sample_z2,
    simulation_report,
    two_sample_ks,
    two_sample_pmf_test,
    variance,
    verify_suite_names,
    z1_cov,
    z1_dispersion,
    z1_lrd_exponent,
    z1_mean,
    z1_variance,
    z2_asymptotics,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
