from stablesim.diagnostics.selfsim import ExponentFit, default_selfsim_times, estimate_selfsim_exponent
from stablesim.diagnostics.stationarity import (
    StationarityResult, ks_critical_value, pinned_ensemble,
    stationarity_distance, stationarity_times,
)
from stablesim.diagnostics.mixing import (
    MixingCurve, TailConstants, bound_vanishing_sequence, fit_tail_constants,
    mixing_bound, mixing_bound_at, mixing_curve, mixing_measure,
    mixing_measure_binned, validate_tail_constants,
)
from stablesim.diagnostics.conservativity import (
    ConservativityCurve, check_probes_on_grid, conservativity_sum, growth_exponent,
)
from stablesim.diagnostics.extremes import (
    ExtremeValueCurve, extreme_value_stat, iid_noise_control, median_stderr,
)
from stablesim.diagnostics.reductions import (
    CovarianceComparison, IncrementCharCheck, covariance_oracle,
    gaussian_covariance_check, levy_increment_check,
)
from stablesim.diagnostics.classification import FlowClassification, classify_flow
