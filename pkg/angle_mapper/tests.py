import numpy as np
import pytest

from conftest import REFERENCE_TC
from mean_field.exceptions import ConvergenceError, DomainError
from mean_field.solver import solve_self_consistent
from mean_field.thermodynamics import hysteresis_limits
from quantum_state.rotations import apply_rotations, populations_from_angles
from quantum_state.states import DensityMatrix, PseudoPureState, PulseAngles, thermal_density_matrix
from quantum_state.metrics import trace_distance, zero_coherences
from .exceptions import CertificationError, NotRepresentableError, RefinementFailedError
from .mapper import (
    CERTIFICATION_THRESHOLD,
    AngleMapEntry,
    build_angle_table,
    certify_entry,
    invert_populations,
    refine_numeric,
    target_state,
    written_distance,
)

BOLTZMANN_Y01 = np.array([0.28866, 0.26118, 0.23633, 0.21384])
BOLTZMANN_EXACT = np.exp(0.1 * np.array([1.5, 0.5, -0.5, -1.5]))
BOLTZMANN_EXACT /= BOLTZMANN_EXACT.sum()


def forward(angles, epsilon=1e-5):
    written = apply_rotations(PseudoPureState.ground(epsilon), angles)
    return zero_coherences(written.rho1)


class TestTargetState:
    def test_far_above_tc_is_maximally_mixed(self, second_order):
        target = target_state(second_order, 3.0 * REFERENCE_TC, 0.0)
        np.testing.assert_allclose(target.populations, 0.25, atol=1e-12)

    def test_zero_temperature_is_ground_state(self, second_order):
        target = target_state(second_order, 0.0, 0.0, branch_seed=1.0)
        np.testing.assert_allclose(target.populations, [1.0, 0.0, 0.0, 0.0], atol=1e-15)

    def test_half_tc_matches_boltzmann_oracle(self, second_order):
        target = target_state(second_order, 0.5 * REFERENCE_TC, 0.0)
        m = solve_self_consistent(second_order, 0.5 * REFERENCE_TC, 0.0, 0.5).m
        assert m == pytest.approx(0.917, abs=1e-3)
        y = 1.2 * m / 0.5
        weights = np.exp(y * np.array([1.5, 0.5, -0.5, -1.5]))
        np.testing.assert_allclose(target.populations, weights / weights.sum(), atol=1e-10)
        assert target.is_diagonal()

    def test_negative_seed_follows_reversed_branch(self, second_order):
        target = target_state(second_order, 0.5 * REFERENCE_TC, 0.0, branch_seed=-1.0)
        assert target.populations[3] > target.populations[0]

    def test_solver_failure_propagates(self, second_order, monkeypatch):
        from mean_field.solver import SelfConsistentResult
        stuck = SelfConsistentResult(m=0.3, M=0.0, B_eff=0.0, residual=1e-3, iterations=10_000, converged=False)
        monkeypatch.setattr('mean_field.solver.solve_self_consistent', lambda *args: stuck)
        with pytest.raises(ConvergenceError):
            target_state(second_order, 40.0, 0.0)


class TestInversion:
    def test_ground_state_needs_no_pulses(self):
        angles = invert_populations([1.0, 0.0, 0.0, 0.0])
        np.testing.assert_allclose(angles.as_array(), 0.0, atol=1e-15)

    def test_uniform_populations_give_quarter_turns(self):
        angles = invert_populations([0.25] * 4)
        np.testing.assert_allclose(angles.as_array(), [np.pi / 2, 0.0, np.pi / 2, 0.0], atol=1e-15)

    def test_boltzmann_cosines(self):
        angles = invert_populations(BOLTZMANN_EXACT)
        c_a = 2 * (BOLTZMANN_Y01[0] + BOLTZMANN_Y01[1]) - 1
        c_b = 2 * (BOLTZMANN_Y01[0] + BOLTZMANN_Y01[2]) - 1
        assert c_a == pytest.approx(0.09968, abs=1e-5)
        assert c_b == pytest.approx(0.04998, abs=1e-5)
        assert np.cos(angles.theta_x_A) == pytest.approx(c_a, abs=1e-4)
        assert np.cos(angles.theta_x_B) == pytest.approx(c_b, abs=1e-4)
        np.testing.assert_allclose(populations_from_angles(angles), BOLTZMANN_EXACT, atol=1e-12)

    def test_round_trip_on_representable_set(self, rng):
        for c_a, c_b in rng.uniform(-1.0, 1.0, size=(1000, 2)):
            angles = PulseAngles(np.arccos(c_a), 0.0, np.arccos(c_b), 0.0)
            recovered = invert_populations(populations_from_angles(angles))
            np.testing.assert_allclose(recovered.as_array(), angles.as_array(), atol=1e-9)

    def test_thermal_ladders_satisfy_product_condition(self, second_order, rng):
        for B_eff, T in zip(rng.uniform(-50.0, 50.0, 200), rng.uniform(0.5, 300.0, 200)):
            p = thermal_density_matrix(second_order, B_eff, T).populations
            assert abs(p[0] * p[3] - p[1] * p[2]) < 1e-12

    def test_correlated_populations_are_not_representable(self):
        with pytest.raises(NotRepresentableError) as excinfo:
            invert_populations([0.5, 0.0, 0.0, 0.5])
        assert excinfo.value.exit_code == 3
        assert isinstance(excinfo.value, ValueError)

    @pytest.mark.parametrize('populations', [
        [0.5, 0.5, 0.5],
        [0.6, 0.6, -0.1, -0.1],
        [0.2, 0.2, 0.2, 0.2],
        [np.nan, 0.5, 0.25, 0.25],
    ])
    def test_invalid_populations(self, populations):
        with pytest.raises(DomainError):
            invert_populations(populations)


class TestRefiner:
    def test_exact_start_returns_immediately(self):
        target = DensityMatrix.from_populations(BOLTZMANN_EXACT)
        start = invert_populations(BOLTZMANN_EXACT)
        refined = refine_numeric(start, target)
        np.testing.assert_allclose(refined.as_array(), start.as_array(), atol=1e-14)
        assert refined.trace_distance < 1e-12

    def test_perturbed_start_converges(self):
        target = DensityMatrix.from_populations(BOLTZMANN_EXACT)
        optimum = invert_populations(BOLTZMANN_EXACT).as_array()
        start = PulseAngles.from_array(optimum + np.array([0.3, 0.3, -0.3, 0.3]))
        assert written_distance(start, target) > CERTIFICATION_THRESHOLD

        refined = refine_numeric(start, target)
        assert refined.trace_distance < CERTIFICATION_THRESHOLD
        assert written_distance(refined, target) == pytest.approx(refined.trace_distance, abs=1e-15)

    def test_maximally_mixed_from_zero_angles(self):
        target = DensityMatrix.maximally_mixed()
        refined = refine_numeric(PulseAngles(0.0, 0.0, 0.0, 0.0), target)
        assert refined.trace_distance < CERTIFICATION_THRESHOLD
        theta = refined.as_array()
        # only cos θx cos θy per qubit is observable; both must vanish
        assert abs(np.cos(theta[0]) * np.cos(theta[1])) < 4 * CERTIFICATION_THRESHOLD
        assert abs(np.cos(theta[2]) * np.cos(theta[3])) < 4 * CERTIFICATION_THRESHOLD
        np.testing.assert_allclose(populations_from_angles(refined), 0.25, atol=2e-3)

    def test_unreachable_target_fails_with_best_distance(self):
        target = DensityMatrix.from_populations([0.5, 0.0, 0.0, 0.5])
        with pytest.raises(RefinementFailedError) as excinfo:
            refine_numeric(PulseAngles(np.pi / 2, 0.0, np.pi / 2, 0.0), target)
        assert excinfo.value.best_distance > 0.1
        assert isinstance(excinfo.value.angles, PulseAngles)

    def test_coherent_target_is_rejected(self):
        with pytest.raises(DomainError):
            refine_numeric(PulseAngles(0.0, 0.0, 0.0, 0.0), DensityMatrix(np.full((4, 4), 0.25)))

    def test_refiner_is_deterministic(self):
        target = DensityMatrix.from_populations(BOLTZMANN_EXACT)
        start = PulseAngles(0.2, 0.4, 0.6, 0.8)
        assert refine_numeric(start, target).as_array().tolist() == refine_numeric(start, target).as_array().tolist()


class TestAngleTable:
    def test_second_order_table_is_certified_and_monotone(self, second_order):
        grid = 2.0 * REFERENCE_TC * np.arange(1, 61) / 60
        table = build_angle_table(second_order, grid, 0.0, 'up')

        assert [entry.T for entry in table] == pytest.approx(grid.tolist())
        assert all(entry.method == 'analytic' for entry in table)
        assert all(entry.achieved_D < 1e-10 for entry in table)

        c_a = np.array([np.cos(entry.angles.theta_x_A) for entry in table])
        assert np.all(np.diff(c_a) <= 1e-12)

    def test_high_temperature_angles_are_quarter_turns(self, second_order):
        grid = REFERENCE_TC * np.array([1.5, 1.8, 2.0])
        for entry in build_angle_table(second_order, grid, 0.0):
            np.testing.assert_allclose(entry.angles.as_array(), [np.pi / 2, 0.0, np.pi / 2, 0.0], atol=1e-12)

    def test_entries_reproduce_targets_when_forward_simulated(self, second_order):
        grid = REFERENCE_TC * np.linspace(0.05, 1.6, 25)
        for entry in build_angle_table(second_order, grid, 6.0, 'down'):
            target = thermal_density_matrix(second_order, entry.B_eff, entry.T)
            assert trace_distance(forward(entry.angles), target) < 1e-10
            assert entry.branch == 'down'

    def test_first_order_tables_differ_only_inside_hysteresis_window(self, first_order):
        grid = REFERENCE_TC * np.linspace(0.8, 1.3, 51)
        step = grid[1] - grid[0]
        up = build_angle_table(first_order, grid, 0.0, 'up')
        down = sorted(build_angle_table(first_order, grid, 0.0, 'down'), key=lambda entry: entry.T)
        supercool, superheat = hysteresis_limits(first_order)

        differing = []
        for heated, cooled in zip(up, down):
            assert heated.T == cooled.T
            if np.max(np.abs(heated.angles.as_array() - cooled.angles.as_array())) > 1e-6:
                differing.append(heated.T)
        assert differing
        assert min(differing) >= supercool - step
        assert max(differing) <= superheat + step
        assert all(entry.achieved_D < CERTIFICATION_THRESHOLD for entry in up + down)

    def test_record_layout(self, second_order):
        entry = build_angle_table(second_order, [0.5 * REFERENCE_TC], 0.0)[0]
        record = entry.as_record()
        assert list(record) == [
            'B0_T', 'T_K', 'branch', 'm', 'B_eff',
            'theta_xA', 'theta_yA', 'theta_xB', 'theta_yB', 'trace_distance', 'method',
        ]
        assert record['trace_distance'] == entry.achieved_D

    def test_numeric_fallback_is_recorded(self, second_order, monkeypatch):
        def refuse(populations):
            raise NotRepresentableError("forced")
        monkeypatch.setattr('angle_mapper.mapper.invert_populations', refuse)
        result = solve_self_consistent(second_order, 0.9 * REFERENCE_TC, 0.0)
        entry = certify_entry(second_order, 0.9 * REFERENCE_TC, 0.0, result)
        assert isinstance(entry, AngleMapEntry)
        assert entry.method == 'numeric'
        assert entry.achieved_D < CERTIFICATION_THRESHOLD

    def test_uncertifiable_point_aborts_with_temperature(self, second_order, monkeypatch):
        def fail(initial, target):
            raise RefinementFailedError("stuck", best_distance=0.02)
        monkeypatch.setattr('angle_mapper.mapper.refine_numeric', fail)
        monkeypatch.setattr('angle_mapper.mapper.written_distance', lambda angles, target: 0.5)
        with pytest.raises(CertificationError) as excinfo:
            build_angle_table(second_order, [40.0, 50.0], 0.0)
        assert excinfo.value.temperature == 40.0
        assert excinfo.value.best_distance == 0.02
        assert excinfo.value.exit_code == 3
