from stablesim.oracle.char_functional import (
    LinearForm, CharFunctionalEstimate, EmpiricalCharEstimate,
    PANEL_HORIZON, PANEL_RESOLUTION,
    default_form_panel, panel_on_grid, form_times, exponent_integral, discretized_exponent,
    empirical_char, empirical_char_matrix, paired_char_change, char_zscore, char_difference_zscore,
)
