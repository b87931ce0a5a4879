import numpy as np
import pytest

from mean_field.brillouin import brillouin
from mean_field.constants import CONSTANTS
from mean_field.exceptions import DomainError
from mean_field.materials import MaterialModel
from .linalg import jacobi_eigh
from .metrics import magnetization_readout, trace_distance, zero_coherences
from .rotations import apply_rotations, populations_from_angles, pulse_unitary, rotation_operator
from .states import (
    DensityMatrix,
    PseudoPureState,
    PulseAngles,
    thermal_density_matrix,
)

BOLTZMANN_Y01 = np.array([0.28866, 0.26118, 0.23633, 0.21384])


def random_hermitian(rng, size=4):
    raw = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    return 0.5 * (raw + raw.conj().T)


def random_density(rng):
    raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    positive = raw @ raw.conj().T
    return DensityMatrix(positive / np.trace(positive).real)


def random_angles(rng):
    return PulseAngles(*rng.uniform(0.0, np.pi, size=4))


def field_for_argument(model, y, T):
    return y * CONSTANTS.k_B * T / (model.g * CONSTANTS.mu_B)


def assert_valid_density(matrix):
    entries = matrix.entries
    assert np.max(np.abs(entries - entries.conj().T)) < 1e-12
    assert abs(np.trace(entries) - 1.0) < 1e-12
    eigenvalues, _ = jacobi_eigh(entries)
    assert eigenvalues.min() > -1e-12


# --- Jacobi eigen-solver ---

class TestJacobi:
    def test_reconstructs_random_hermitian_matrices(self, rng):
        for _ in range(500):
            matrix = random_hermitian(rng)
            eigenvalues, vectors = jacobi_eigh(matrix)
            assert np.all(np.diff(eigenvalues) >= 0)
            assert np.max(np.abs(vectors @ vectors.conj().T - np.eye(4))) < 1e-12
            assert np.max(np.abs(vectors @ np.diag(eigenvalues) @ vectors.conj().T - matrix)) < 1e-11
            np.testing.assert_allclose(eigenvalues, np.linalg.eigvalsh(matrix), atol=1e-11)

    def test_degenerate_spectrum(self):
        eigenvalues, vectors = jacobi_eigh(np.eye(4) / 4)
        np.testing.assert_allclose(eigenvalues, 0.25)
        np.testing.assert_allclose(vectors, np.eye(4))

    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError):
            jacobi_eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(DomainError):
            jacobi_eigh(np.ones((3, 4)))


# --- State types ---

class TestStates:
    def test_density_matrix_invariants_are_enforced(self):
        with pytest.raises(DomainError):
            DensityMatrix(np.eye(4))
        with pytest.raises(DomainError):
            DensityMatrix(np.diag([1.2, -0.2, 0.0, 0.0]))
        with pytest.raises(DomainError):
            DensityMatrix(np.eye(3) / 3)
        skewed = np.eye(4) / 4
        skewed = skewed.astype(complex)
        skewed[0, 1] = 0.1j
        with pytest.raises(DomainError):
            DensityMatrix(skewed)

    def test_entries_are_read_only(self):
        rho = DensityMatrix.maximally_mixed()
        with pytest.raises(ValueError):
            rho.entries[0, 0] = 1.0

    def test_pseudo_pure_state(self):
        state = PseudoPureState.ground(1e-5)
        full = state.full_matrix()
        assert_valid_density(full)
        expected = (1 - 1e-5) / 4 + np.array([1e-5, 0.0, 0.0, 0.0])
        np.testing.assert_allclose(full.populations, expected, atol=1e-15)
        with pytest.raises(DomainError):
            PseudoPureState(0.0, DensityMatrix.maximally_mixed())
        with pytest.raises(DomainError):
            PseudoPureState(1.5, DensityMatrix.maximally_mixed())

    def test_pulse_angles_range_and_folding(self):
        with pytest.raises(DomainError):
            PulseAngles(-0.5, 0.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            PulseAngles(np.nan, 0.0, 0.0, 0.0)
        folded = PulseAngles.from_array([-0.5, 4.0, 2 * np.pi, 0.3])
        np.testing.assert_allclose(folded.as_array(), [0.5, 2 * np.pi - 4.0, 0.0, 0.3], atol=1e-12)
        np.testing.assert_allclose(
            populations_from_angles(folded), populations_from_angles([-0.5, 4.0, 2 * np.pi, 0.3]), atol=1e-15
        )


class TestThermalState:
    def test_boltzmann_populations_at_y01(self, second_order):
        T = 50.0
        rho = thermal_density_matrix(second_order, field_for_argument(second_order, 0.1, T), T)
        np.testing.assert_allclose(rho.populations, BOLTZMANN_Y01, atol=1e-5)
        assert rho.is_diagonal()

    def test_limits(self, second_order):
        ground = thermal_density_matrix(second_order, 2.0, 0.0)
        np.testing.assert_array_equal(ground.populations, [1, 0, 0, 0])
        np.testing.assert_array_equal(thermal_density_matrix(second_order, -2.0, 0.0).populations, [0, 0, 0, 1])
        hot = thermal_density_matrix(second_order, 5.0, 1e9)
        np.testing.assert_allclose(hot.populations, 0.25, atol=1e-8)
        np.testing.assert_array_equal(thermal_density_matrix(second_order, 0.0, 10.0).populations, 0.25)

    def test_overflow_safe(self, second_order):
        rho = thermal_density_matrix(second_order, 1e6, 1e-3)
        np.testing.assert_allclose(rho.populations, [1, 0, 0, 0], atol=1e-15)

    def test_domain(self, second_order):
        with pytest.raises(DomainError):
            thermal_density_matrix(second_order, 1.0, -1.0)
        with pytest.raises(DomainError):
            thermal_density_matrix(MaterialModel(spin=0.5, lam=1e24), 1.0, 1.0)

    def test_equal_spacing_product_identity(self, second_order, rng):
        for _ in range(200):
            T = rng.uniform(0.5, 300.0)
            p = thermal_density_matrix(second_order, rng.uniform(-50.0, 50.0), T).populations
            assert abs(p[0] * p[3] - p[1] * p[2]) < 1e-12


# --- Rotations ---

class TestRotations:
    @pytest.mark.parametrize('axis', ['x', 'y'])
    @pytest.mark.parametrize('qubit', ['A', 'B'])
    def test_unitary_and_inverse(self, axis, qubit, rng):
        np.testing.assert_allclose(rotation_operator(axis, qubit, 0.0), np.eye(4), atol=1e-15)
        for theta in rng.uniform(-2 * np.pi, 2 * np.pi, size=125):
            forward = rotation_operator(axis, qubit, theta)
            assert np.max(np.abs(forward @ forward.conj().T - np.eye(4))) < 1e-12
            backward = rotation_operator(axis, qubit, -theta)
            assert np.max(np.abs(forward @ backward - np.eye(4))) < 1e-12

    def test_composite_unitary(self, rng):
        for _ in range(500):
            unitary = pulse_unitary(rng.uniform(-np.pi, np.pi, size=4))
            assert np.max(np.abs(unitary @ unitary.conj().T - np.eye(4))) < 1e-12

    def test_pi_pulse_on_a_transfers_population(self):
        rotation = rotation_operator('x', 'A', np.pi)
        ground = DensityMatrix.basis_projector('00').entries
        rotated = rotation @ ground @ rotation.conj().T
        np.testing.assert_allclose(rotated, DensityMatrix.basis_projector('10').entries, atol=1e-15)

    def test_invalid_axis_or_qubit(self):
        with pytest.raises(DomainError):
            rotation_operator('z', 'A', 0.1)
        with pytest.raises(DomainError):
            rotation_operator('x', 'C', 0.1)

    def test_apply_rotations(self, rng):
        state = PseudoPureState.ground(1e-5)
        unchanged = apply_rotations(state, PulseAngles(0.0, 0.0, 0.0, 0.0))
        np.testing.assert_allclose(unchanged.rho1.entries, state.rho1.entries, atol=1e-15)

        for _ in range(100):
            mixed = PseudoPureState(1e-5, random_density(rng))
            rotated = apply_rotations(mixed, random_angles(rng))
            assert_valid_density(rotated.rho1)
            assert rotated.epsilon == mixed.epsilon
            np.testing.assert_allclose(
                jacobi_eigh(rotated.rho1.entries)[0], jacobi_eigh(mixed.rho1.entries)[0], atol=1e-10
            )

    def test_closed_form_matches_matrix_simulation(self, rng):
        ground = PseudoPureState.ground(1e-5)
        for _ in range(1000):
            angles = random_angles(rng)
            simulated = apply_rotations(ground, angles).rho1.populations
            assert np.max(np.abs(simulated - populations_from_angles(angles))) < 1e-12

    def test_closed_form_examples(self):
        np.testing.assert_array_equal(populations_from_angles([0, 0, 0, 0]), [1, 0, 0, 0])
        np.testing.assert_allclose(populations_from_angles([np.pi / 2, 0, 0, 0]), [0.5, 0, 0.5, 0], atol=1e-16)

    def test_closed_form_properties(self, rng):
        for _ in range(500):
            theta = rng.uniform(-np.pi, np.pi, size=4)
            p = populations_from_angles(theta)
            assert np.all(p >= 0)
            assert abs(p.sum() - 1.0) < 1e-15
            assert abs(p[0] * p[3] - p[1] * p[2]) < 1e-15
            np.testing.assert_allclose(populations_from_angles(-theta), p, atol=1e-15)
            swapped = theta[[1, 0, 3, 2]]
            np.testing.assert_allclose(populations_from_angles(swapped), p, atol=1e-15)


# --- Metrics ---

class TestMetrics:
    def test_zero_coherences(self, rng):
        diagonal = DensityMatrix.from_populations([0.4, 0.3, 0.2, 0.1])
        np.testing.assert_array_equal(zero_coherences(diagonal).entries, diagonal.entries)

        coherent = DensityMatrix(np.full((4, 4), 0.25))
        np.testing.assert_allclose(zero_coherences(coherent).entries, np.eye(4) / 4)

        for _ in range(100):
            rho = random_density(rng)
            cancelled = zero_coherences(rho)
            assert abs(np.trace(cancelled.entries) - 1.0) < 1e-12
            for index in range(4):
                projector = np.zeros((4, 4))
                projector[index, index] = 1.0
                commutator = projector @ cancelled.entries - cancelled.entries @ projector
                assert np.max(np.abs(commutator)) == 0.0

    def test_trace_distance_examples(self):
        rho = DensityMatrix.from_populations([0.4, 0.3, 0.2, 0.1])
        assert trace_distance(rho, rho) == 0.0
        assert trace_distance(DensityMatrix.basis_projector('00'), DensityMatrix.basis_projector('11')) == pytest.approx(1.0, abs=1e-15)
        sigma = DensityMatrix.from_populations([0.1, 0.2, 0.3, 0.4])
        # |0.3| + |0.1| + |0.1| + |0.3|, halved
        assert trace_distance(rho, sigma) == pytest.approx(0.4, abs=1e-15)

    def test_trace_distance_equals_half_l1_on_diagonals(self, rng):
        for _ in range(500):
            p = rng.dirichlet(np.ones(4))
            q = rng.dirichlet(np.ones(4))
            distance = trace_distance(DensityMatrix.from_populations(p), DensityMatrix.from_populations(q))
            assert abs(distance - 0.5 * np.abs(p - q).sum()) < 1e-12

    def test_metric_axioms(self, rng):
        for _ in range(500):
            a, b, c = random_density(rng), random_density(rng), random_density(rng)
            ab, ba = trace_distance(a, b), trace_distance(b, a)
            assert 0.0 <= ab <= 1.0 + 1e-12
            assert abs(ab - ba) < 1e-12
            assert trace_distance(a, a) < 1e-10
            assert ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-10

    def test_readout_examples(self, second_order):
        scale = second_order.g * CONSTANTS.mu_B
        assert magnetization_readout(DensityMatrix.basis_projector('00'), second_order) == pytest.approx(1.5 * scale)
        assert magnetization_readout(DensityMatrix.maximally_mixed(), second_order) == 0.0
        expected = 1.5 * 0.28866 + 0.5 * 0.26118 - 0.5 * 0.23633 - 1.5 * 0.21384
        assert magnetization_readout(np.diag(BOLTZMANN_Y01), second_order) == pytest.approx(expected * scale, rel=1e-12)
        assert expected == pytest.approx(0.124656, abs=2e-6)

    def test_readout_matches_brillouin(self, second_order, rng):
        for _ in range(200):
            T = rng.uniform(1.0, 300.0)
            B = rng.uniform(-60.0, 60.0)
            rho = thermal_density_matrix(second_order, B, T)
            y = second_order.g * CONSTANTS.mu_B * B / (CONSTANTS.k_B * T)
            expected = second_order.moment_scale * brillouin(1.5, y)
            assert abs(magnetization_readout(rho, second_order) - expected) < 1e-12 * second_order.moment_scale
