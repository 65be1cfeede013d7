import numpy as np
import pytest
from hypothesis import given, strategies as st

from stablesim.engine import (
    Kernel, evaluate_kernel, feasibility_check, integrate_field, kernel_matrix,
    sample_matrix, simulate_noise, simulate_process, truncation_ledger,
)
from stablesim.errors import DimensionMismatchError, ParameterError
from stablesim.grids import SpatialGrid
from stablesim.models import KernelVariant, ProcessKind
from stablesim.sampling import StableSpec, sample_noise_field
from stablesim.subordinators import SubordinatorSpec, compute_local_time


def brute_force(kernel, ensemble, grid, field, t):
    return float(np.sum(kernel_matrix(kernel, ensemble, grid, t) * field.values))


class TestKernels:
    def test_indicator_rows_integrate_to_path_value(self, fbm_ensemble, wide_window):
        rows = kernel_matrix(Kernel.indicator(), fbm_ensemble, wide_window, 2.0)
        np.testing.assert_allclose(rows.sum(axis=1) * wide_window.dx, np.abs(fbm_ensemble.at(2.0)))

    def test_signed_indicator_carries_sign(self, fbm_ensemble, wide_window):
        plain = kernel_matrix(Kernel.indicator(), fbm_ensemble, wide_window, 1.0)
        signed = kernel_matrix(Kernel.signed_indicator(), fbm_ensemble, wide_window, 1.0)
        np.testing.assert_allclose(signed, np.sign(fbm_ensemble.at(1.0))[:, None] * plain)

    def test_levy_kernel_ignores_paths(self):
        grid = SpatialGrid.from_half_width(4.0, 8)
        rows = kernel_matrix(Kernel.levy(), None, grid, 2.5)
        assert rows.shape == (1, grid.n_cells)
        assert rows.sum() * grid.dx == pytest.approx(2.5)

    def test_evaluate_kernel_matches_matrix(self, fbm_ensemble, wide_window):
        rows = kernel_matrix(Kernel.indicator(), fbm_ensemble, wide_window, 3.0)
        for path in (0, 7, 150):
            for cell in (0, 200, 239, 240, 479):
                value = evaluate_kernel(Kernel.indicator(), fbm_ensemble, path, 3.0, cell, wide_window)
                assert value == pytest.approx(rows[path, cell])

    def test_evaluate_kernel_rejects_outside_cell(self, fbm_ensemble, wide_window):
        with pytest.raises(ParameterError):
            evaluate_kernel(Kernel.indicator(), fbm_ensemble, 0, 1.0, wide_window.n_cells, wide_window)

    def test_local_time_kernel_needs_field(self):
        with pytest.raises(ParameterError):
            Kernel(KernelVariant.LOCAL_TIME)

    @given(st.floats(min_value=-5.0, max_value=5.0), st.floats(min_value=-5.0, max_value=5.0))
    def test_coverage_of_interval_sums_to_its_length(self, a, b):
        grid = SpatialGrid.from_half_width(6.0, 60)
        lo, hi = min(a, b), max(a, b)
        covered = grid.coverage([lo], [hi]).sum() * grid.dx
        assert covered == pytest.approx(hi - lo, abs=1e-9)


class TestIntegrate:
    @pytest.mark.parametrize('kernel', [Kernel.indicator(), Kernel.signed_indicator()])
    def test_fast_integral_equals_brute_force(self, kernel, fbm_ensemble, wide_window, spec, rng):
        field = sample_noise_field(wide_window, fbm_ensemble.n_paths, spec, rng)
        times = [0.0, 0.5, 2.0, 4.0]
        fast = integrate_field(kernel, fbm_ensemble, wide_window, field, times)
        slow = [brute_force(kernel, fbm_ensemble, wide_window, field, t) for t in times]
        np.testing.assert_allclose(fast, slow, rtol=1e-9, atol=1e-12)
        assert fast[0] == 0.0

    def test_levy_integral_equals_brute_force(self, spec, rng):
        grid = SpatialGrid.from_half_width(5.0, 50)
        field = sample_noise_field(grid, 1, spec, rng)
        times = [1.0, 2.35, 5.0]
        fast = integrate_field(Kernel.levy(), None, grid, field, times)
        slow = [brute_force(Kernel.levy(), None, grid, field, t) for t in times]
        np.testing.assert_allclose(fast, slow, rtol=1e-9)

    def test_local_time_integral_is_field_contraction(self, fbm_ensemble, wide_window, spec, rng):
        local_time = compute_local_time(fbm_ensemble, wide_window, [1.0, 3.0])
        kernel = Kernel.from_local_time(local_time)
        field = sample_noise_field(wide_window, fbm_ensemble.n_paths, spec, rng)
        values = integrate_field(kernel, fbm_ensemble, wide_window, field, [1.0, 3.0])
        assert values[1] == pytest.approx(np.sum(local_time.at(3.0) * field.values))


class TestSimulate:
    def test_results_do_not_depend_on_thread_count(self, fbm_ensemble, wide_window, spec, rng):
        times = [0.25, 1.0, 4.0]
        one = simulate_process(Kernel.indicator(), fbm_ensemble, wide_window, times, spec, rng, 12)
        many = simulate_process(Kernel.indicator(), fbm_ensemble, wide_window, times, spec, rng, 12,
                                threads=4)
        np.testing.assert_array_equal(sample_matrix(one)[1], sample_matrix(many)[1])
        assert [s.replicate_id for s in many] == list(range(12))

    def test_replicates_are_independent_draws(self, fbm_ensemble, wide_window, spec, rng):
        samples = simulate_process(Kernel.indicator(), fbm_ensemble, wide_window, [2.0], spec, rng, 3)
        assert len({s.values[0] for s in samples}) == 3

    def test_field_source_is_used(self, fbm_ensemble, wide_window, spec, rng):
        served = []

        def source(r):
            served.append(r)
            return sample_noise_field(wide_window, fbm_ensemble.n_paths, spec, rng.substream(r))

        direct = simulate_process(Kernel.indicator(), fbm_ensemble, wide_window, [1.0], spec, rng, 4)
        cached = simulate_process(Kernel.indicator(), fbm_ensemble, wide_window, [1.0], spec, rng, 4,
                                  field_source=source)
        assert served == [0, 1, 2, 3]
        np.testing.assert_array_equal(sample_matrix(direct)[1], sample_matrix(cached)[1])

    def test_field_source_shape_checked(self, fbm_ensemble, wide_window, spec, rng):
        def wrong(r):
            return sample_noise_field(wide_window, 3, spec, rng.substream(r))

        with pytest.raises(DimensionMismatchError):
            simulate_process(Kernel.indicator(), fbm_ensemble, wide_window, [1.0], spec, rng, 1,
                             field_source=wrong)

    def test_gaussian_variance_matches_control_measure(self, fbm_ensemble, wide_window, rng):
        gaussian = StableSpec(2.0)
        samples = simulate_process(Kernel.indicator(), fbm_ensemble, wide_window, [2.0], gaussian, rng, 2000)
        _, values = sample_matrix(samples)
        expected = 2.0 * np.mean(np.abs(fbm_ensemble.at(2.0)))
        assert np.var(values[:, 0]) == pytest.approx(expected, rel=0.1)

    def test_levy_route_needs_wide_window(self, spec, rng):
        grid = SpatialGrid.from_half_width(2.0, 10)
        with pytest.raises(DimensionMismatchError):
            simulate_process(Kernel.levy(), None, grid, [3.0], spec, rng, 1)

    def test_step_kernel_needs_ensemble(self, wide_window, spec, rng):
        with pytest.raises(ParameterError):
            simulate_process(Kernel.indicator(), None, wide_window, [1.0], spec, rng, 1)

    def test_replicate_count_validated(self, fbm_ensemble, wide_window, spec, rng):
        with pytest.raises(ParameterError):
            simulate_process(Kernel.indicator(), fbm_ensemble, wide_window, [1.0], spec, rng, 0)

    def test_local_time_field_must_match_ensemble(self, fbm_ensemble, wide_window, spec, rng):
        other = fbm_ensemble.head(10)
        kernel = Kernel.from_local_time(compute_local_time(other, wide_window, [1.0]))
        with pytest.raises(DimensionMismatchError):
            simulate_process(kernel, fbm_ensemble, wide_window, [1.0], spec, rng, 1)


class TestNoise:
    def test_noise_is_unit_increments(self, spec, rng):
        from stablesim.grids import lattice_grid
        from stablesim.subordinators import generate_ensemble

        ensemble = generate_ensemble(SubordinatorSpec.fbm(0.5), lattice_grid(6), 50, rng.stream(3))
        grid = SpatialGrid.from_half_width(10.0, 100)
        noise = simulate_noise(ensemble, grid, 6, spec, rng, 3)
        processes = simulate_process(Kernel.indicator(), ensemble, grid, np.arange(7.0), spec, rng, 3)
        assert noise[0].values.shape == (6,)
        np.testing.assert_allclose(noise[1].values, np.diff(processes[1].values))

    def test_noise_rejects_local_time_kernel(self, fbm_ensemble, wide_window, spec, rng):
        kernel = Kernel.from_local_time(compute_local_time(fbm_ensemble, wide_window, [1.0]))
        with pytest.raises(ParameterError):
            simulate_noise(fbm_ensemble, wide_window, 2, spec, rng, 1, kernel=kernel)


class TestLedger:
    def test_levy_route_has_no_truncation(self, wide_window):
        assert truncation_ledger(None, wide_window, [1.0, 2.0]) == {1.0: 0.0, 2.0: 0.0}

    def test_wide_window_has_no_truncation(self, fbm_ensemble, wide_window):
        assert all(v == 0.0 for v in truncation_ledger(fbm_ensemble, wide_window, [1.0, 4.0]).values())


class TestFeasibility:
    def test_indicator_exponent(self):
        report = feasibility_check(StableSpec(1.5), SubordinatorSpec.fbm(0.5))
        assert report.H == pytest.approx(1 / 3)
        assert (report.lower, report.upper) == (0.0, pytest.approx(2 / 3))
        assert report.range_ok

    def test_local_time_exponent(self):
        report = feasibility_check(StableSpec(1.5), SubordinatorSpec.fbm(0.5), ProcessKind.LTFSM)
        assert report.H == pytest.approx(1 - 0.5 + 0.5 / 1.5)
        assert report.lower == pytest.approx(2 / 3) and report.upper == 1.0
        assert report.range_ok

    def test_local_time_range_below_alpha_one(self):
        report = feasibility_check(StableSpec(0.8), SubordinatorSpec.fbm(0.5), ProcessKind.LTFSM)
        assert (report.lower, report.upper) == (1.0, pytest.approx(1.25))
        assert report.range_ok

    def test_levy_route(self):
        report = feasibility_check(StableSpec(1.2), None, ProcessKind.LEVY)
        assert report.process is ProcessKind.LEVY
        assert report.H == pytest.approx(1 / 1.2)

    def test_gaussian_regimes(self):
        ifsm = feasibility_check(StableSpec(2.0), SubordinatorSpec.fbm(0.5))
        ltfsm = feasibility_check(StableSpec(2.0), SubordinatorSpec.fbm(0.5), ProcessKind.LTFSM)
        assert ifsm.H == 0.25 and 'H < 1/2' in ifsm.regime
        assert ltfsm.H == 0.75 and 'H > 1/2' in ltfsm.regime

    @given(st.floats(min_value=0.05, max_value=2.0), st.floats(min_value=0.05, max_value=0.95))
    def test_indicator_exponent_always_feasible(self, alpha, hurst):
        report = feasibility_check(StableSpec(alpha), SubordinatorSpec.fbm(hurst))
        assert report.range_ok
        assert report.as_dict()['H'] == pytest.approx(hurst / alpha)
