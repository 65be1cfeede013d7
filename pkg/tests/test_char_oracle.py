import numpy as np
import pytest
from hypothesis import given, strategies as st

from stablesim.engine import Kernel, sample_matrix, simulate_process
from stablesim.errors import InsufficientReplicatesError, ParameterError
from stablesim.grids import SpatialGrid, TimeGrid
from stablesim.oracle import (
    CharFunctionalEstimate, EmpiricalCharEstimate, LinearForm, PANEL_HORIZON, PANEL_RESOLUTION,
    char_difference_zscore, char_zscore, default_form_panel, discretized_exponent, empirical_char,
    empirical_char_matrix, exponent_integral, form_times, paired_char_change, panel_on_grid,
)
from stablesim.sampling import StableSpec
from stablesim.subordinators import compute_local_time


class TestLinearForm:
    def test_lengths_must_match(self):
        with pytest.raises(ParameterError):
            LinearForm((1.0, 2.0), (1.0,), (0.0,))
        with pytest.raises(ParameterError):
            LinearForm((), (), ())

    def test_negative_times_rejected(self):
        with pytest.raises(ParameterError):
            LinearForm((1.0,), (-1.0,), (0.0,))

    def test_transformations(self):
        form = LinearForm((1.0, -1.0), (1.0, 2.0), (0.0, 1.0))
        assert form.scaled(2.0).t == (2.0, 4.0)
        assert form.shifted(0.5).s == (0.5, 1.5)
        assert form.with_thetas(3.0).thetas == (3.0, -3.0)
        assert form.times == [0.0, 1.0, 2.0]

    def test_default_panel_fits_small_grids(self):
        panel = default_form_panel()
        assert len(panel) == 10
        assert all(len(form.thetas) <= 3 for form in panel)
        assert max(max(form.t + form.s) for form in panel) <= 3.0
        assert max(form_times(panel)) == PANEL_HORIZON
        assert min(np.diff(form_times(panel))) == PANEL_RESOLUTION

    def test_panel_on_an_aligned_grid_is_unchanged(self, small_grid):
        assert panel_on_grid(small_grid) == default_form_panel()

    @pytest.mark.parametrize('n_steps', [17, 30, 100])
    def test_panel_moves_onto_a_non_aligned_grid(self, n_steps):
        grid = TimeGrid(4.0, n_steps)
        panel = panel_on_grid(grid)
        times = form_times(panel)
        assert all(grid.contains(t) for t in times)
        assert len(times) == len(form_times(default_form_panel()))
        assert panel[0].t == (grid.snap(1.0),)
        assert all(abs(a - b) <= grid.dt / 2 + 1e-12
                   for a, b in zip(times, form_times(default_form_panel())))

    def test_snap_clamps_to_the_grid(self):
        grid = TimeGrid(4.0, 30)
        assert grid.snap(1.05) == pytest.approx(8 * 4.0 / 30)
        assert grid.snap(-1.0) == 0.0
        assert grid.snap(9.0) == 4.0


class TestExponent:
    @given(st.floats(min_value=-3.0, max_value=3.0), st.floats(min_value=0.0, max_value=4.0),
           st.floats(min_value=0.3, max_value=2.0))
    def test_levy_exponent_is_exact(self, theta, t, alpha):
        grid = SpatialGrid.from_half_width(4.0, 8)
        estimate = exponent_integral(LinearForm.single(theta, t), Kernel.levy(), None, grid, StableSpec(alpha))
        assert estimate.exponent == pytest.approx(t * abs(theta) ** alpha, rel=1e-9, abs=1e-12)
        assert estimate.stderr == 0.0

    def test_single_indicator_form_is_mean_absolute_value(self, fbm_ensemble, wide_window, spec):
        form = LinearForm.single(2.0, 3.0)
        estimate = exponent_integral(form, Kernel.indicator(), fbm_ensemble, wide_window, spec)
        expected = 2.0 ** 1.5 * np.mean(np.abs(fbm_ensemble.at(3.0)))
        assert estimate.exponent == pytest.approx(expected)
        assert estimate.stderr > 0

    def test_sign_kernel_gives_same_exponent_for_increments_of_one_path_value(
            self, fbm_ensemble, wide_window, spec):
        form = LinearForm((1.0,), (2.0,), (0.0,))
        plain = exponent_integral(form, Kernel.indicator(), fbm_ensemble, wide_window, spec)
        signed = exponent_integral(form, Kernel.signed_indicator(), fbm_ensemble, wide_window, spec)
        assert plain.exponent == pytest.approx(signed.exponent)

    def test_exponent_is_homogeneous_in_theta(self, fbm_ensemble, wide_window, spec):
        form = default_form_panel()[8]
        base = exponent_integral(form, Kernel.indicator(), fbm_ensemble, wide_window, spec)
        doubled = exponent_integral(form.with_thetas(2.0), Kernel.indicator(), fbm_ensemble, wide_window, spec)
        assert doubled.exponent == pytest.approx(2.0 ** 1.5 * base.exponent)

    def test_two_time_form_by_hand(self, small_grid, spec):
        from stablesim.subordinators import SubordinatorEnsemble, SubordinatorSpec

        paths = np.zeros((2, small_grid.n_steps + 1))
        paths[0, small_grid.index_of(1.0)] = 1.0
        paths[0, small_grid.index_of(2.0)] = 3.0
        paths[1, small_grid.index_of(1.0)] = -2.0
        paths[1, small_grid.index_of(2.0)] = 1.0
        ensemble = SubordinatorEnsemble(SubordinatorSpec.fbm(0.5), small_grid, paths, 0)
        grid = SpatialGrid.from_half_width(5.0, 10)
        form = LinearForm((1.0, 1.0), (1.0, 2.0), (0.0, 0.0))
        estimate = exponent_integral(form, Kernel.indicator(), ensemble, grid, spec)
        # path 0: [0,1] carries 2, (1,3] carries 1; path 1: [-2,0) and (0,1] carry 1
        path0 = 1.0 * 2.0 ** 1.5 + 2.0
        path1 = 2.0 + 1.0
        assert estimate.exponent == pytest.approx(0.5 * (path0 + path1))

    def test_window_clips_the_integral(self, fbm_ensemble, spec):
        narrow = SpatialGrid.from_half_width(0.5, 10)
        estimate = exponent_integral(LinearForm.single(1.0, 4.0), Kernel.indicator(), fbm_ensemble, narrow, spec)
        expected = np.mean(np.minimum(np.abs(fbm_ensemble.at(4.0)), 0.5))
        assert estimate.exponent == pytest.approx(expected)

    def test_local_time_exponent(self, fbm_ensemble, wide_window, spec):
        field = compute_local_time(fbm_ensemble, wide_window, [1.0, 2.0])
        form = LinearForm((1.0,), (2.0,), (1.0,))
        estimate = exponent_integral(form, Kernel.from_local_time(field), fbm_ensemble, wide_window, spec)
        per_path = wide_window.dx * np.sum(np.abs(field.at(2.0) - field.at(1.0)) ** 1.5, axis=1)
        assert estimate.exponent == pytest.approx(per_path.mean())

    def test_discretized_exponent_converges_under_refinement(self, fbm_ensemble, spec):
        coarse = SpatialGrid.from_half_width(12.0, 24)
        fine = coarse.refined().refined().refined()
        form = default_form_panel()[3]
        exact = exponent_integral(form, Kernel.indicator(), fbm_ensemble, fine, spec).exponent
        coarse_gap = abs(discretized_exponent(form, Kernel.indicator(), fbm_ensemble, coarse, spec).exponent - exact)
        fine_gap = abs(discretized_exponent(form, Kernel.indicator(), fbm_ensemble, fine, spec).exponent - exact)
        assert fine_gap < 0.5 * coarse_gap

    def test_oracle_value_is_exp_of_minus_exponent(self):
        assert CharFunctionalEstimate(0.5, 0.01).value == pytest.approx(np.exp(-0.5))


class TestEmpirical:
    def test_requires_enough_replicates(self):
        with pytest.raises(InsufficientReplicatesError):
            empirical_char_matrix([0.0, 1.0], np.zeros((10, 2)), LinearForm.single(1.0, 1.0))

    def test_unsimulated_time_rejected(self):
        with pytest.raises(ParameterError):
            empirical_char_matrix([0.0, 1.0], np.zeros((200, 2)), LinearForm.single(1.0, 2.0))

    def test_degenerate_sample_has_unit_value(self):
        estimate = empirical_char_matrix([0.0, 1.0], np.zeros((200, 2)), LinearForm.single(1.0, 1.0))
        assert estimate.value == 1.0
        assert estimate.stderr == 0.0

    def test_zscore_of_exact_match_is_zero(self):
        empirical = EmpiricalCharEstimate(complex(np.exp(-0.3)), 0.0, 0.0, 100)
        assert char_zscore(empirical, CharFunctionalEstimate(0.3, 0.0)) == 0.0
        assert char_difference_zscore(empirical, empirical) == 0.0

    def test_zscore_without_error_and_with_gap_is_infinite(self):
        empirical = EmpiricalCharEstimate(complex(0.5), 0.0, 0.0, 100)
        assert char_zscore(empirical, CharFunctionalEstimate(0.1, 0.0)) == float('inf')

    def test_paired_change_of_identical_samples_is_zero(self):
        values = np.column_stack([np.zeros(50), np.linspace(-2.0, 2.0, 50)])
        change, stderr = paired_char_change([0.0, 1.0], values, values, LinearForm.single(1.0, 1.0))
        assert change == 0.0 and stderr == 0.0

    def test_paired_stderr_is_below_the_unpaired_one(self):
        generator = np.random.default_rng(3)
        y = generator.standard_normal(2000)
        first = np.column_stack([np.zeros_like(y), y])
        second = np.column_stack([np.zeros_like(y), y + 0.05 * generator.standard_normal(2000)])
        form = LinearForm.single(1.0, 1.0)
        change, stderr = paired_char_change([0.0, 1.0], first, second, form)
        unpaired = empirical_char_matrix([0.0, 1.0], second, form).stderr
        assert stderr < unpaired / 5
        assert change < 3 * stderr + 0.002

    def test_paired_samples_must_match(self):
        with pytest.raises(ParameterError):
            paired_char_change([0.0, 1.0], np.zeros((5, 2)), np.zeros((6, 2)), LinearForm.single(1.0, 1.0))

    def test_levy_process_matches_its_characteristic_functional(self, rng):
        spec = StableSpec(1.3)
        grid = SpatialGrid.from_half_width(3.0, 60)
        times = [0.0, 0.5, 1.0, 2.0, 3.0]
        samples = simulate_process(Kernel.levy(), None, grid, times, spec, rng, 1500)
        for form in (LinearForm.single(1.0, 1.0), LinearForm((1.0, -1.0), (1.0, 3.0), (0.0, 2.0)),
                     LinearForm((0.5, 0.5, 0.5), (0.5, 1.0, 3.0), (0.0, 0.0, 2.0))):
            oracle = exponent_integral(form, Kernel.levy(), None, grid, spec)
            empirical = empirical_char(samples, form)
            assert char_zscore(empirical, oracle) < 4.0

    @pytest.mark.slow
    def test_indicator_process_matches_its_characteristic_functional(self, fbm_ensemble, wide_window, spec, rng):
        times = sorted({t for form in default_form_panel() for t in form.times})
        times_out, values = sample_matrix(simulate_process(
            Kernel.indicator(), fbm_ensemble, wide_window, times, spec, rng, 800))
        zscores = []
        for form in default_form_panel():
            oracle = exponent_integral(form, Kernel.indicator(), fbm_ensemble, wide_window, spec)
            zscores.append(char_zscore(empirical_char_matrix(times_out, values, form), oracle))
        assert max(zscores) < 4.0
