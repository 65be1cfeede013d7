from stablesim.sampling.stable import (
    StableSpec, SeededRng, StableNoiseField,
    standard_sas, sample_sas, cell_scale, combine_scales,
    sas_char_function, fit_scale_from_ecf, sample_noise_field, coarsen_field,
)
