"""Strategic researcher behavior simulation and incentive-compatible critical values."""

from ._iccv import (  # noqa: F401
    BehaviorModel,
    BoundsRow,
    BoundsTable,
    CalibStudy,
    CostSchedule,
    GeneralSpec,
    GridSpec,
    ICCVResult,
    Incentives,
    InconsistentSummaryError,
    InsufficientDataError,
    MatchedPairsStudy,
    MvnPrior,
    NoThresholdError,
    NotPositiveDefiniteError,
    PosteriorScalar,
    Prior,
    RandomStream,
    SdBounds,
    SearchFailureError,
    SingularPriorError,
    SizeEstimate,
    Tail,
    Trajectory,
    UnsupportedError,
    baseline_threshold,
    calibrate_prior,
    classical_quantile,
    continue_decision,
    continue_probability,
    cost_ratio_bounds_table,
    elicitation_bounds,
    estimate_power,
    estimate_size,
    find_iccv,
    load_studies_file,
    matched_pairs_sd_bounds,
    mean_num_studies,
    n_max_increasing_cost,
    next_latent,
    posterior_general,
    posterior_scalar,
    published_cost_ratio_bounds,
    rejection_prob,
    rejection_prob_quadrature,
    sample_mvn,
    sample_std_normal,
    simulate_trajectory,
    size_closed_form_iid,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_quantile,
    subjective_mixture,
)

__all__ = [name for name in dir() if not name.startswith("_")]
