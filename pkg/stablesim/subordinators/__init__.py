from stablesim.subordinators.spec import SubordinatorSpec, subordinator_violations
from stablesim.subordinators.ensemble import (
    SubordinatorEnsemble, RecurrenceReport, generate_ensemble, recurrence_check,
)
from stablesim.subordinators.fbm import fbm_covariance, sample_fbm_ensemble
from stablesim.subordinators.levy import sample_levy_ensemble
from stablesim.subordinators.local_time import LocalTimeField, compute_local_time
