from stablesim.engine.kernels import Kernel, evaluate_kernel, kernel_matrix, step_geometry
from stablesim.engine.integral import (
    ProcessSample, NoiseSample, integrate_field, sample_matrix,
    simulate_process, simulate_noise, truncation_ledger,
)
from stablesim.engine.feasibility import FeasibilityReport, feasibility_check
