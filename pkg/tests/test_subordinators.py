import logging

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stablesim.errors import DimensionMismatchError, GridError, MemoryBudgetError, ParameterError
from stablesim.grids import SpatialGrid, TimeGrid
from stablesim.sampling import SeededRng
from stablesim.subordinators import (
    SubordinatorEnsemble, SubordinatorSpec, compute_local_time, fbm_covariance,
    generate_ensemble, recurrence_check, sample_fbm_ensemble, sample_levy_ensemble,
)
from stablesim.subordinators.fbm import circulant_eigenvalues


class TestSpec:
    def test_beta_outside_range_cites_constraint(self):
        with pytest.raises(ParameterError) as excinfo:
            SubordinatorSpec.levy(0.9)
        assert '(1,2]' in str(excinfo.value)

    @pytest.mark.parametrize('hurst', [0.0, 1.0, 1.2])
    def test_hurst_outside_open_unit_interval(self, hurst):
        with pytest.raises(ParameterError):
            SubordinatorSpec.fbm(hurst)

    def test_all_violations_collected(self):
        with pytest.raises(ParameterError) as excinfo:
            SubordinatorSpec.levy(3.0, sigma=-1.0)
        assert len(excinfo.value.violations) == 2

    def test_exponents(self):
        assert SubordinatorSpec.fbm(0.3).self_similarity_exponent == 0.3
        assert SubordinatorSpec.levy(1.6).self_similarity_exponent == pytest.approx(1 / 1.6)
        assert SubordinatorSpec.levy(1.6).tail_index == 1.6


class TestFbm:
    @pytest.mark.parametrize('hurst', [0.3, 0.5, 0.7])
    def test_marginal_variance_circulant(self, hurst):
        grid = TimeGrid(2.0, 128)
        ensemble = sample_fbm_ensemble(SubordinatorSpec.fbm(hurst), grid, 4000, SeededRng(10))
        assert ensemble.method == 'circulant'
        for t in (0.5, 1.0, 2.0):
            assert np.var(ensemble.at(t)) == pytest.approx(t ** (2 * hurst), rel=0.08)

    def test_dense_grids_use_cholesky(self):
        grid = TimeGrid(1.0, 16)
        ensemble = sample_fbm_ensemble(SubordinatorSpec.fbm(0.6), grid, 3000, SeededRng(11))
        assert ensemble.method == 'cholesky'
        cov = np.cov(ensemble.at(0.5), ensemble.at(1.0))[0, 1]
        assert cov == pytest.approx(fbm_covariance(0.5, 1.0, 0.6), abs=0.07)

    def test_covariance_between_times(self):
        grid = TimeGrid(4.0, 256)
        ensemble = sample_fbm_ensemble(SubordinatorSpec.fbm(0.3), grid, 5000, SeededRng(12))
        cov = np.cov(ensemble.at(1.0), ensemble.at(3.0))[0, 1]
        assert cov == pytest.approx(fbm_covariance(1.0, 3.0, 0.3), abs=0.09)

    def test_paths_start_at_zero_and_are_read_only(self, fbm_ensemble):
        assert np.all(fbm_ensemble.paths[:, 0] == 0.0)
        with pytest.raises(ValueError):
            fbm_ensemble.paths[0, 1] = 1.0

    def test_sigma_scales_paths(self):
        grid = TimeGrid(1.0, 100)
        unit = sample_fbm_ensemble(SubordinatorSpec.fbm(0.5), grid, 10, SeededRng(13))
        scaled = sample_fbm_ensemble(SubordinatorSpec.fbm(0.5, sigma=2.0), grid, 10, SeededRng(13))
        np.testing.assert_allclose(scaled.paths, 2.0 * unit.paths)

    def test_leading_paths_do_not_depend_on_path_count(self):
        grid = TimeGrid(1.0, 100)
        spec = SubordinatorSpec.fbm(0.4)
        few = sample_fbm_ensemble(spec, grid, 5, SeededRng(14))
        many = sample_fbm_ensemble(spec, grid, 50, SeededRng(14))
        np.testing.assert_allclose(few.paths, many.paths[:5])

    def test_wrong_kind_rejected(self, small_grid, rng):
        with pytest.raises(ParameterError):
            sample_fbm_ensemble(SubordinatorSpec.levy(1.5), small_grid, 5, rng)

    @given(st.floats(min_value=0.05, max_value=0.95), st.integers(min_value=2, max_value=300))
    def test_circulant_embedding_is_nonnegative(self, hurst, n):
        eigenvalues = circulant_eigenvalues(hurst, n)
        assert eigenvalues.min() >= -1e-8 * eigenvalues.max()

    @given(st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=0.0, max_value=10.0),
           st.floats(min_value=0.0, max_value=10.0))
    def test_covariance_symmetric_with_power_diagonal(self, hurst, s, t):
        assert fbm_covariance(s, t, hurst) == pytest.approx(fbm_covariance(t, s, hurst))
        assert fbm_covariance(t, t, hurst) == pytest.approx(t ** (2 * hurst))


class TestLevy:
    def test_unit_time_characteristic_function(self):
        grid = TimeGrid(2.0, 20)
        ensemble = sample_levy_ensemble(SubordinatorSpec.levy(1.5), grid, 20000, SeededRng(20))
        for t in (1.0, 2.0):
            cosines = np.cos(ensemble.at(t))
            stderr = np.std(cosines) / np.sqrt(cosines.size)
            assert abs(np.mean(cosines) - np.exp(-t)) < 5 * stderr

    def test_dispatch_by_kind(self, small_grid, rng):
        levy = generate_ensemble(SubordinatorSpec.levy(1.8), small_grid, 5, rng)
        fbm = generate_ensemble(SubordinatorSpec.fbm(0.5), small_grid, 5, rng)
        assert levy.method == 'increments'
        assert fbm.method in ('circulant', 'cholesky')

    def test_path_count_validated(self, small_grid, rng):
        with pytest.raises(ParameterError):
            generate_ensemble(SubordinatorSpec.levy(1.8), small_grid, 0, rng)


class TestEnsemble:
    def test_shape_checked_against_grid(self, small_grid):
        with pytest.raises(DimensionMismatchError):
            SubordinatorEnsemble(SubordinatorSpec.fbm(0.5), small_grid, np.zeros((3, 5)), 1)

    def test_off_grid_time_rejected(self, fbm_ensemble):
        with pytest.raises(GridError):
            fbm_ensemble.at(0.3)

    def test_truncated_mass(self, small_grid):
        paths = np.tile(np.linspace(0.0, 4.0, small_grid.n_steps + 1), (2, 1))
        paths[1] *= -1
        ensemble = SubordinatorEnsemble(SubordinatorSpec.fbm(0.5), small_grid, paths, 1)
        assert ensemble.truncated_mass(4.0, 3.0) == pytest.approx(1.0)
        assert ensemble.truncated_mass(2.0, 3.0) == 0.0

    def test_recurrence_fractions(self, small_grid):
        paths = np.zeros((4, small_grid.n_steps + 1))
        paths[0, 5] = 2.0
        paths[1, 5] = -2.0
        paths[2, 3], paths[2, 7] = 1.5, -1.5
        ensemble = SubordinatorEnsemble(SubordinatorSpec.fbm(0.5), small_grid, paths, 1)
        report = recurrence_check(ensemble, 1.0)
        assert report.frac_exceed_up == 0.5
        assert report.frac_exceed_down == 0.5
        assert report.asymmetry == 0.0
        with pytest.raises(ParameterError):
            recurrence_check(ensemble, -1.0)

    @pytest.mark.slow
    def test_brownian_paths_are_recurrent_on_long_horizons(self):
        grid = TimeGrid(100.0, 2000)
        ensemble = generate_ensemble(SubordinatorSpec.fbm(0.5), grid, 500, SeededRng(21))
        report = recurrence_check(ensemble, 0.5)
        assert min(report.frac_exceed_up, report.frac_exceed_down) > 0.9


class TestLocalTime:
    def test_occupation_conserves_time(self, fbm_ensemble, wide_window):
        field = compute_local_time(fbm_ensemble, wide_window, [1.0, 2.5, 4.0])
        for t in (1.0, 2.5, 4.0):
            np.testing.assert_allclose(field.occupation(t), t, rtol=1e-10)

    def test_time_zero_is_empty(self, fbm_ensemble, wide_window):
        field = compute_local_time(fbm_ensemble, wide_window, [0.0, 1.0])
        assert np.all(field.at(0.0) == 0.0)

    def test_local_time_is_nondecreasing_in_t(self, fbm_ensemble, wide_window):
        field = compute_local_time(fbm_ensemble, wide_window, [1.0, 2.0])
        assert np.all(field.at(2.0) >= field.at(1.0) - 1e-12)

    def test_constant_path_deposits_in_its_cell(self, small_grid):
        paths = np.full((1, small_grid.n_steps + 1), 0.35)
        ensemble = SubordinatorEnsemble(SubordinatorSpec.fbm(0.5), small_grid, paths, 1)
        x_grid = SpatialGrid.from_half_width(1.0, 10)
        field = compute_local_time(ensemble, x_grid, [4.0])
        cell = int(x_grid.locate(0.35))
        assert field.at(4.0)[0, cell] * x_grid.dx == pytest.approx(4.0)

    def test_narrow_window_records_and_warns_truncation(self, fbm_ensemble, caplog):
        narrow = SpatialGrid.from_half_width(0.2, 4)
        with caplog.at_level(logging.WARNING, logger='stablesim'):
            field = compute_local_time(fbm_ensemble, narrow, [4.0])
        lost = field.truncated[:, 0]
        np.testing.assert_allclose(field.occupation(4.0) + lost, 4.0, rtol=1e-10)
        assert lost.mean() > 0
        assert 'outside' in caplog.text

    def test_unretained_time_raises(self, fbm_ensemble, wide_window):
        field = compute_local_time(fbm_ensemble, wide_window, [1.0])
        with pytest.raises(KeyError):
            field.at(2.0)

    def test_budget(self, fbm_ensemble, wide_window):
        with pytest.raises(MemoryBudgetError):
            compute_local_time(fbm_ensemble, wide_window, max_entries=1000)
