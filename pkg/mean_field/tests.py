import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq
from rest_framework import status

from conftest import REFERENCE_TC, MaterialFactory
from .brillouin import (
    brillouin,
    brillouin_s32_closed_form,
    log_partition,
    spin_projections,
)
from .constants import CONSTANTS, PhysicalConstants
from .exceptions import ConvergenceError, DomainError, NotBracketedError
from .materials import MaterialModel, critical_temperature, effective_field, lambda_from_exchange
from .solver import SOLVER_TOLERANCE, SelfConsistentResult, solve_converged, solve_self_consistent
from .sweeps import find_critical_field, hysteresis_width, sweep_temperature
from .thermodynamics import (
    coexistence_temperature,
    first_order_threshold,
    free_energy,
    free_energy_gradient,
    hysteresis_limits,
)


JUMP = 0.1


def reduced_grid(steps, t_c=REFERENCE_TC):
    return 2.0 * t_c * np.arange(1, steps + 1) / steps


def gradient_floor(model):
    scale = model.moment_scale
    return (model.mean_field_parameter + 3.0 * abs(model.lambda_prime) * scale ** 2) * scale


# --- Brillouin machinery ---

class TestBrillouin:
    def test_reference_values(self):
        assert brillouin(1.5, 0.0) == 0.0
        assert brillouin(1.5, 50.0) == pytest.approx(1.0, abs=1e-12)
        assert brillouin(1.5, 0.1) == pytest.approx(0.083098, abs=1e-6)

    def test_matches_direct_boltzmann_sum(self):
        projections = np.array([1.5, 0.5, -0.5, -1.5])
        weights = np.exp(0.1 * projections)
        expected = weights @ projections / weights.sum() / 1.5
        assert brillouin(1.5, 0.1) == pytest.approx(expected, abs=1e-15)

    def test_odd_increasing_and_bounded(self, rng):
        spins = rng.integers(1, 8, size=1000) / 2.0
        ys = rng.uniform(-30.0, 30.0, size=1000)
        for spin, y in zip(spins, ys):
            value = brillouin(spin, y)
            assert -1.0 < value < 1.0 or abs(y) > 20
            assert abs(value) <= 1.0
            assert brillouin(spin, -y) == pytest.approx(-value, abs=1e-15)
            assert brillouin(spin, y + 1e-3) >= value
            if abs(y) < 5:
                assert brillouin(spin, y + 1e-3) > value

    def test_closed_form_identity_on_large_sample(self, rng):
        ys = rng.uniform(-30.0, 30.0, size=100_000)
        start = time.perf_counter()
        exact = brillouin(1.5, ys)
        closed = brillouin_s32_closed_form(ys)
        elapsed = time.perf_counter() - start
        assert np.max(np.abs(exact - closed)) < 1e-12
        assert elapsed < 1.0

    def test_closed_form_with_series_guard(self):
        ys = np.geomspace(1e-6, 30.0, 2000)
        assert np.max(np.abs(brillouin(1.5, ys) - brillouin_s32_closed_form(ys))) < 1e-12
        assert brillouin_s32_closed_form(0.0) == 0.0

    @pytest.mark.parametrize('spin', [0.5, 1.0, 1.5, 2.0, 3.5])
    def test_small_argument_slope(self, spin):
        assert brillouin(spin, 1e-4) / 1e-4 == pytest.approx((spin + 1.0) / 3.0, abs=1e-6)

    def test_log_partition_is_overflow_safe(self):
        value = log_partition(1.5, 2000.0)
        assert math.isfinite(value)
        assert value == pytest.approx(3000.0, rel=1e-12)
        assert log_partition(1.5, 0.0) == pytest.approx(math.log(4.0))

    @pytest.mark.parametrize('bad', [float('nan'), float('inf'), -float('inf')])
    def test_non_finite_argument_is_rejected(self, bad):
        with pytest.raises(DomainError):
            brillouin(1.5, bad)

    @pytest.mark.parametrize('spin', [0.0, -0.5, 0.7, float('nan')])
    def test_invalid_spin_is_rejected(self, spin):
        with pytest.raises(DomainError):
            spin_projections(spin)


# --- Material model ---

class TestMaterialModel:
    def test_constants_are_codata_and_frozen(self):
        assert CONSTANTS.mu_B == 9.2740100783e-24
        assert CONSTANTS.k_B == 1.380649e-23
        with pytest.raises(Exception):
            CONSTANTS.mu_B = 1.0
        with pytest.raises(AssertionError):
            PhysicalConstants(mu_B=-1.0)

    def test_lambda_is_linear_in_exchange(self):
        one = MaterialModel(j_ex=1e-22)
        two = MaterialModel(j_ex=2e-22)
        assert lambda_from_exchange(two) == pytest.approx(2 * lambda_from_exchange(one), rel=1e-15)

    def test_lambda_direct_substitution(self):
        model = MaterialModel(g=2.0, z=6, j_ex=CONSTANTS.k_B)
        assert lambda_from_exchange(model) == pytest.approx(3 * CONSTANTS.k_B / CONSTANTS.mu_B ** 2, rel=1e-12)

    def test_calibrated_exchange_gives_83_kelvin(self):
        model = MaterialModel(g=2.0, z=6, spin=1.5, j_ex=83.0 * CONSTANTS.k_B / 15.0)
        assert critical_temperature(model) == pytest.approx(83.0, rel=1e-12)
        calibrated = MaterialModel.from_critical_temperature(83.0)
        assert calibrated.j_ex == pytest.approx(83.0 * CONSTANTS.k_B / 15.0, rel=1e-12)

    def test_critical_temperature_is_linear_in_lambda(self):
        base = MaterialModel(lam=1e24)
        doubled = MaterialModel(lam=2e24)
        assert critical_temperature(doubled) == pytest.approx(2 * critical_temperature(base), rel=1e-15)

    def test_spin_half_critical_temperature(self):
        model = MaterialModel(spin=0.5, g=2.0, lam=1e24)
        assert critical_temperature(model) == pytest.approx(CONSTANTS.mu_B ** 2 * 1e24 / CONSTANTS.k_B, rel=1e-12)

    def test_non_positive_lambda_has_no_ordering(self):
        with pytest.raises(DomainError):
            critical_temperature(MaterialModel(lam=0.0))
        with pytest.raises(DomainError):
            critical_temperature(MaterialModel(lam=-1e24))

    def test_g_equal_one_is_degenerate_not_an_error(self, caplog):
        model = MaterialModel(g=1.0, j_ex=1e-22)
        assert lambda_from_exchange(model) == 0.0
        assert 'Degenerate' in caplog.text

    def test_exactly_one_coupling(self):
        with pytest.raises(DomainError):
            MaterialModel()
        with pytest.raises(DomainError):
            MaterialModel(j_ex=1e-22, lam=1e24)

    def test_effective_field(self, second_order, first_order):
        assert effective_field(second_order, 0.0, 6.0) == 6.0
        M = 0.4 * second_order.moment_scale
        assert effective_field(second_order, M, 1.0) == pytest.approx(1.0 + second_order.mean_field_parameter * M)
        assert effective_field(first_order, -M, 0.0) == pytest.approx(-effective_field(first_order, M, 0.0))

    def test_reduced_ratio_round_trip(self, first_order):
        assert first_order.lambda_prime_ratio == pytest.approx(1.0, rel=1e-12)
        assert first_order.is_first_order_model


# --- Self-consistent solver ---

class TestSolver:
    @pytest.mark.parametrize('m_init', [-1.0, -0.3, 0.0, 0.5, 1.0])
    def test_paramagnetic_above_tc(self, second_order, m_init):
        result = solve_self_consistent(second_order, 2 * REFERENCE_TC, 0.0, m_init)
        assert result.converged
        assert result.m == 0.0

    def test_saturation_at_zero_temperature(self, second_order):
        result = solve_self_consistent(second_order, 0.0, 0.0, 0.5)
        assert result.m == 1.0
        assert result.method == 'saturation'
        assert solve_self_consistent(second_order, 0.0, 0.0, -0.5).m == -1.0
        assert solve_self_consistent(second_order, 0.0, 0.0, 0.0).m == 0.0
        assert solve_self_consistent(second_order, 1e-3 * REFERENCE_TC, 0.0, 0.5).m == pytest.approx(1.0, abs=1e-12)

    def test_half_tc_against_bisection_oracle(self, second_order):
        t = 0.5
        oracle = brentq(lambda m: m - brillouin_s32_closed_form(1.2 * m / t), 0.5, 1.0, xtol=1e-15)
        result = solve_self_consistent(second_order, t * REFERENCE_TC, 0.0, 0.5)
        assert result.m == pytest.approx(oracle, abs=1e-10)
        assert result.m == pytest.approx(0.917, abs=1e-3)
        assert result.M == pytest.approx(result.m * second_order.moment_scale)
        assert result.B_eff == pytest.approx(second_order.mean_field_parameter * result.M)

    def test_converged_results_satisfy_fixed_point(self, second_order, first_order, rng):
        for model in (second_order, first_order):
            for _ in range(60):
                T = rng.uniform(0.05, 3.0) * REFERENCE_TC
                B0 = rng.uniform(-10.0, 10.0)
                result = solve_self_consistent(model, T, B0, rng.uniform(-1.0, 1.0))
                assert result.converged
                assert result.residual < SOLVER_TOLERANCE
                assert abs(result.m) <= 1.0
                y = model.g * CONSTANTS.mu_B * result.B_eff / (CONSTANTS.k_B * T)
                assert abs(result.m - brillouin(model.spin, y)) < 1e-9

    def test_slow_contraction_falls_back_to_bisection(self, second_order):
        result = solve_self_consistent(second_order, 0.999 * REFERENCE_TC, 0.0, 1.0)
        assert result.method == 'bisection'
        assert result.converged
        assert result.m == pytest.approx(1.56 * math.sqrt(0.001), rel=0.1)

    def test_invalid_inputs(self, second_order):
        with pytest.raises(DomainError):
            solve_self_consistent(second_order, -1.0, 0.0, 0.5)
        with pytest.raises(DomainError):
            solve_self_consistent(second_order, 10.0, 0.0, 1.5)
        with pytest.raises(DomainError):
            solve_self_consistent(second_order, float('nan'), 0.0, 0.5)

    def test_result_serializes(self, second_order):
        data = solve_self_consistent(second_order, 40.0, 1.0, 1.0).as_dict()
        assert set(data) == {'m', 'M', 'B_eff', 'residual', 'iterations', 'converged', 'method'}

    def test_solve_converged_raises_on_unconverged_result(self, second_order, monkeypatch):
        assert solve_converged(second_order, 40.0, 0.0).converged
        stuck = SelfConsistentResult(m=0.5, M=0.0, B_eff=0.0, residual=1e-4, iterations=10_000, converged=False)
        monkeypatch.setattr('mean_field.solver.solve_self_consistent', lambda *args: stuck)
        with pytest.raises(ConvergenceError) as excinfo:
            solve_converged(second_order, 40.0, 0.0)
        assert excinfo.value.temperature == 40.0
        assert excinfo.value.residual == 1e-4


# --- Free energy and metastability ---

class TestFreeEnergy:
    def test_gradient_matches_central_differences(self, second_order, first_order, rng):
        for index in range(100):
            model = second_order if index % 2 else first_order
            scale = model.moment_scale
            T = rng.uniform(0.1, 3.0) * REFERENCE_TC
            B0 = rng.uniform(-10.0, 10.0)
            M = rng.uniform(-1.0, 1.0) * scale
            step = 1e-6 * scale
            numeric = (free_energy(model, T, B0, M + step) - free_energy(model, T, B0, M - step)) / (2 * step)
            analytic = free_energy_gradient(model, T, B0, M)
            assert abs(numeric - analytic) <= 1e-6 * max(abs(analytic), gradient_floor(model))

    def test_stationary_at_self_consistent_solution(self, second_order, first_order):
        for model in (second_order, first_order):
            for t, B0 in ((0.5, 0.0), (0.9, 2.0), (1.5, 6.0)):
                T = t * REFERENCE_TC
                result = solve_self_consistent(model, T, B0, 1.0)
                assert abs(free_energy_gradient(model, T, B0, result.M)) < 1e-6 * gradient_floor(model)

    def test_paramagnet_minimizes_free_energy_above_tc(self, second_order):
        T = 1.5 * REFERENCE_TC
        scale = second_order.moment_scale
        grid = np.concatenate([np.linspace(-1.0, -0.01, 50), np.linspace(0.01, 1.0, 50)]) * scale
        assert np.all(free_energy(second_order, T, 0.0, 0.0) < free_energy(second_order, T, 0.0, grid))

    def test_zero_temperature_is_rejected(self, second_order):
        with pytest.raises(DomainError):
            free_energy(second_order, 0.0, 0.0, 0.0)

    def test_first_order_threshold(self):
        assert first_order_threshold(1.5) == pytest.approx(0.408, abs=1e-3)
        assert first_order_threshold(0.5) == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_no_window_for_continuous_transitions(self, second_order):
        assert hysteresis_limits(second_order) is None
        weak = MaterialModel.from_critical_temperature(REFERENCE_TC, lambda_prime_ratio=1e-2)
        assert hysteresis_limits(weak) is None
        assert coexistence_temperature(second_order) is None

    def test_window_for_first_order_model(self, first_order):
        supercool, superheat = hysteresis_limits(first_order)
        assert supercool == pytest.approx(REFERENCE_TC, rel=1e-9)
        assert superheat == pytest.approx(1.145 * REFERENCE_TC, rel=0.02)

    def test_window_closes_at_large_field(self, first_order):
        assert hysteresis_limits(first_order, 500.0) is None

    def test_coexistence_inside_window(self, first_order):
        supercool, superheat = hysteresis_limits(first_order)
        T = coexistence_temperature(first_order)
        assert supercool < T < superheat
        ordered = solve_self_consistent(first_order, T, 0.0, 1.0)
        disordered = solve_self_consistent(first_order, T, 0.0, 0.0)
        assert ordered.m > 0.5 and disordered.m == 0.0
        gap = free_energy(first_order, T, 0.0, ordered.M) - free_energy(first_order, T, 0.0, disordered.M)
        assert abs(gap) < 1e-9 * CONSTANTS.k_B * T


# --- Sweeps ---

class TestSweeps:
    def test_second_order_has_no_hysteresis(self, second_order):
        grid = reduced_grid(300)
        start = time.perf_counter()
        up = sweep_temperature(second_order, grid, 0.0, 'up')
        down = sweep_temperature(second_order, grid, 0.0, 'down')
        assert time.perf_counter() - start < 10.0

        t_up, m_up = up.ascending()
        t_down, m_down = down.ascending()
        np.testing.assert_array_equal(t_up, grid)
        np.testing.assert_array_equal(t_down, grid)
        assert np.max(np.abs(m_up - m_down)) < 1e-8
        assert not up.transitions and not down.transitions
        assert hysteresis_width(up, down) == 0.0

        above = grid > REFERENCE_TC * (1 + 1e-12)
        assert np.all(m_up[above] == 0.0)
        assert np.all(m_up[grid < REFERENCE_TC] > 0.0)
        assert np.all(np.diff(m_up) <= 1e-12)
        assert m_up[0] == pytest.approx(1.0, abs=1e-10)

    def test_negative_field_sweeps_agree(self, second_order):
        grid = reduced_grid(300)
        up = sweep_temperature(second_order, grid, -6.0, 'up')
        down = sweep_temperature(second_order, grid, -6.0, 'down')
        _, m_up = up.ascending()
        _, m_down = down.ascending()
        assert not up.transitions and not down.transitions
        assert np.max(np.abs(m_up - m_down)) < 1e-8
        assert np.all(m_up < 0.0)
        assert m_up[0] == pytest.approx(-1.0, abs=1e-6)

    def test_ordered_solution_vanishes_exactly_at_tc(self, second_order):
        # 10^4-point grid on (0, 2 T_c]: point 5000 sits on T_c
        T = 2.0 * REFERENCE_TC * np.arange(1, 10_001) / 10_000
        assert solve_self_consistent(second_order, T[4998], 0.0, 1.0).m > 0.0
        assert solve_self_consistent(second_order, T[5000], 0.0, 1.0).m == 0.0
        for index in range(0, 10_000, 500):
            m = solve_self_consistent(second_order, T[index], 0.0, 1.0).m
            assert (m > 0.0) == (T[index] < REFERENCE_TC)

    def test_positive_field_curve_is_smooth_with_tail(self, second_order):
        grid = reduced_grid(300)
        up = sweep_temperature(second_order, grid, 6.0, 'up')
        down = sweep_temperature(second_order, grid, 6.0, 'down')
        _, m_up = up.ascending()
        _, m_down = down.ascending()
        assert not up.transitions
        assert np.all(m_up > 0.0)
        assert np.max(np.abs(np.diff(m_up))) < JUMP
        assert np.max(np.abs(m_up - m_down)) < 1e-8

    def test_first_order_hysteresis_at_zero_field(self, first_order):
        grid = REFERENCE_TC * np.linspace(0.8, 1.4, 121)
        step = grid[1] - grid[0]
        up = sweep_temperature(first_order, grid, 0.0, 'up')
        down = sweep_temperature(first_order, grid, 0.0, 'down')
        assert up.transitions and down.transitions
        assert up.transitions[0].delta_m < -JUMP
        assert down.transitions[0].delta_m > JUMP
        assert up.transitions[0].T_jump != down.transitions[0].T_jump
        assert hysteresis_width(up, down) > 0.0

        supercool, superheat = hysteresis_limits(first_order)
        assert abs(up.transitions[0].T_jump - superheat) <= step
        assert abs(down.transitions[0].T_jump - supercool) <= step

        for sweep in (up, down):
            _, m = sweep.ascending()
            assert np.all(np.diff(m) <= 1e-12)
            for point in sweep.points:
                gradient = free_energy_gradient(first_order, point.T, 0.0, point.result.M)
                assert abs(gradient) < 1e-6 * gradient_floor(first_order)

    def test_branch_tags(self, first_order):
        grid = REFERENCE_TC * np.linspace(0.9, 1.2, 7)
        up = sweep_temperature(first_order, grid, 0.0, 'up')
        assert up.points[0].branch_tag == 'reseeded'
        assert all(point.branch_tag == 'continued' for point in up.points[1:])
        down = sweep_temperature(first_order, grid, 0.0, 'down')
        # the paramagnetic branch is re-perturbed at every zero-field cooling step
        assert down.points[1].branch_tag == 'reseeded'
        assert down.temperatures[0] == grid[-1]

    def test_weak_cubic_term_stays_continuous(self):
        weak = MaterialModel.from_critical_temperature(REFERENCE_TC, lambda_prime_ratio=1e-2)
        assert first_order_threshold(1.5) > 1e-2
        grid = REFERENCE_TC * np.linspace(0.8, 1.2, 81)
        up = sweep_temperature(weak, grid, 0.0, 'up')
        down = sweep_temperature(weak, grid, 0.0, 'down')
        assert not up.transitions and not down.transitions
        assert np.max(np.abs(up.ascending()[1] - down.ascending()[1])) < 1e-8

    def test_no_jump_far_above_critical_field(self, first_order):
        assert hysteresis_limits(first_order, 60.0) is None
        grid = REFERENCE_TC * np.linspace(0.8, 1.6, 81)
        up = sweep_temperature(first_order, grid, 60.0, 'up')
        down = sweep_temperature(first_order, grid, 60.0, 'down')
        assert not up.transitions and not down.transitions
        assert np.max(np.abs(up.ascending()[1] - down.ascending()[1])) < 1e-8

    def test_grid_and_direction_validation(self, second_order):
        with pytest.raises(DomainError):
            sweep_temperature(second_order, [10.0, 5.0], 0.0, 'up')
        with pytest.raises(DomainError):
            sweep_temperature(second_order, [5.0, 5.0], 0.0, 'up')
        with pytest.raises(DomainError):
            sweep_temperature(second_order, [5.0, 10.0], 0.0, 'sideways')

    def test_unconverged_point_aborts_with_temperature(self, second_order, monkeypatch):
        def stuck(model, T, B0, m_init=1.0):
            return SelfConsistentResult(m=0.5, M=0.0, B_eff=0.0, residual=1e-3, iterations=10_000, converged=False)

        monkeypatch.setattr('mean_field.solver.solve_self_consistent', stuck)
        with pytest.raises(ConvergenceError) as excinfo:
            sweep_temperature(second_order, [30.0, 40.0], 0.0, 'up')
        assert excinfo.value.temperature == 30.0
        assert excinfo.value.exit_code == 2


class TestCriticalField:
    T_GRID = REFERENCE_TC * np.linspace(0.8, 1.5, 71)
    B_GRID = np.arange(0.0, 30.0, 1.5)

    def test_second_order_returns_first_grid_field(self, second_order):
        assert find_critical_field(second_order, self.T_GRID, [2.0, 1.0, 3.0]) == 1.0

    def test_first_order_critical_field_is_finite_and_monotone(self, first_order):
        b_c = find_critical_field(first_order, self.T_GRID, self.B_GRID)
        assert 0.0 < b_c < 30.0
        weaker = MaterialModel.from_critical_temperature(REFERENCE_TC, lambda_prime_ratio=0.8)
        assert find_critical_field(weaker, self.T_GRID, self.B_GRID) <= b_c

    def test_not_bracketed(self, first_order):
        with pytest.raises(NotBracketedError):
            find_critical_field(first_order, self.T_GRID, [0.0])


# --- REST API ---

@pytest.mark.django_db
class TestMaterialAPI:
    def test_requires_authentication(self):
        from rest_framework.test import APIClient
        response = APIClient().get('/api/materials/')
        assert response.status_code in (status.HTTP_401_UNAUTHORIZED, status.HTTP_403_FORBIDDEN)

    def test_create_and_derive(self, api_client):
        response = api_client.post('/api/materials/', {
            'name': 'calibrated',
            'target_critical_temperature': 83.0,
        }, format='json')
        assert response.status_code == status.HTTP_201_CREATED
        assert response.data['critical_temperature'] == pytest.approx(83.0, rel=1e-12)
        assert response.data['is_first_order'] is False

    def test_create_rejects_two_couplings(self, api_client):
        response = api_client.post('/api/materials/', {
            'name': 'ambiguous',
            'exchange_energy': 1e-22,
            'mean_field_parameter': 1e24,
        }, format='json')
        assert response.status_code == status.HTTP_400_BAD_REQUEST
        assert 'coupling' in response.data

    def test_list_and_search(self, api_client):
        MaterialFactory(name='gadolinium-like')
        MaterialFactory(name='manganite-like')
        response = api_client.get('/api/materials/', {'search': 'gadolinium'})
        assert response.status_code == status.HTTP_200_OK
        assert [row['name'] for row in response.data['results']] == ['gadolinium-like']

    def test_summary_reports_window_for_first_order(self, api_client):
        first = MaterialFactory(lambda_prime_ratio=1.0)
        second = MaterialFactory()
        data = api_client.get(f'/api/materials/{first.id}/summary/').data
        assert data['critical_temperature_K'] == pytest.approx(83.0)
        assert data['hysteresis']['supercool_K'] < data['hysteresis']['coexistence_K'] < data['hysteresis']['superheat_K']
        assert api_client.get(f'/api/materials/{second.id}/summary/').data['hysteresis'] is None

    def test_solve_action(self, api_client):
        material = MaterialFactory()
        response = api_client.post(f'/api/materials/{material.id}/solve/', {
            'temperature': 41.5, 'b0': 0.0, 'm_init': 0.5,
        }, format='json')
        assert response.status_code == status.HTTP_200_OK
        assert response.data['m'] == pytest.approx(0.917, abs=1e-3)
        assert response.data['converged'] is True

    def test_solve_rejects_negative_temperature(self, api_client):
        material = MaterialFactory()
        response = api_client.post(f'/api/materials/{material.id}/solve/', {'temperature': -1}, format='json')
        assert response.status_code == status.HTTP_400_BAD_REQUEST

    def test_unknown_material_is_404(self, api_client):
        assert api_client.get('/api/materials/9999/summary/').status_code == status.HTTP_404_NOT_FOUND
