import io
import json

import numpy as np
import pandas as pd
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError
from rest_framework import status
from rest_framework.exceptions import ValidationError
from rest_framework.test import APIClient

from angle_mapper.exceptions import CertificationError
from angle_mapper.mapper import CERTIFICATION_THRESHOLD, written_distance
from conftest import REFERENCE_TC, ExperimentRunFactory, UserFactory
from mean_field.brillouin import brillouin
from mean_field.constants import CONSTANTS
from mean_field.exceptions import ConvergenceError, DomainError
from mean_field.materials import MaterialModel, critical_temperature
from quantum_state.states import PulseAngles, thermal_density_matrix
from .config import RunConfig, parse_config
from .exceptions import RoundTripError
from .models import ExperimentRun
from .pipelines import (
    CURVE_COLUMNS,
    ROUND_TRIP_TOLERANCE,
    read_back,
    roundtrip_magnetization,
    run_first_order,
    run_second_order,
)
from .tasks import run_experiment_task
from .writers import format_for_path, render, write_atomic

HYSTERESIS_GRID = REFERENCE_TC * np.linspace(0.8, 1.3, 51)


def reduced_grid(steps, t_max=2.0):
    return REFERENCE_TC * t_max * np.arange(1, steps + 1) / steps


def emulate(*args):
    out = io.StringIO()
    call_command('emulate', *[str(arg) for arg in args], stdout=out, stderr=io.StringIO())
    return out.getvalue()


# --- Round trip ---

class TestRoundTrip:
    def test_paramagnet_reads_zero(self, second_order):
        point = roundtrip_magnetization(second_order, 2.0 * REFERENCE_TC, 0.0)
        assert point.M_mean_field == 0.0
        assert point.M_nmr == pytest.approx(0.0, abs=1e-9 * second_order.moment_scale)

    def test_zero_temperature_reads_saturation(self, second_order):
        point = roundtrip_magnetization(second_order, 0.0, 0.0)
        saturation = second_order.g * CONSTANTS.mu_B * 1.5
        assert point.M_mean_field == pytest.approx(saturation, rel=1e-15)
        assert point.M_nmr == pytest.approx(saturation, rel=1e-9)
        assert point.trace_distance == 0.0

    def test_half_tc(self, second_order):
        point = roundtrip_magnetization(second_order, 0.5 * REFERENCE_TC, 0.0)
        assert point.m == pytest.approx(0.917, abs=1e-3)
        assert point.M_nmr == pytest.approx(second_order.moment_scale * point.m, rel=1e-7)
        assert point.discrepancy < ROUND_TRIP_TOLERANCE
        assert point.t_reduced == pytest.approx(0.5)
        assert point.branch == 'single'

    def test_readout_does_not_depend_on_epsilon(self, second_order):
        angles = roundtrip_magnetization(second_order, 0.7 * REFERENCE_TC, 2.0).angles
        pure = read_back(second_order, angles, epsilon=1.0)
        for epsilon in (1e-5, 1e-9, 1e-11, 1e-13):
            assert read_back(second_order, angles, epsilon=epsilon) == pure

    @pytest.mark.parametrize('epsilon', [1.0, 1e-5, 1e-9, 1e-11, 1e-13])
    def test_round_trip_holds_for_tiny_polarization(self, second_order, epsilon):
        point = roundtrip_magnetization(second_order, 0.5 * REFERENCE_TC, 0.0, epsilon=epsilon)
        reference = roundtrip_magnetization(second_order, 0.5 * REFERENCE_TC, 0.0)
        assert point.discrepancy < ROUND_TRIP_TOLERANCE
        assert point.M_nmr == reference.M_nmr

    def test_disagreeing_readout_is_an_error(self, second_order, monkeypatch):
        monkeypatch.setattr('experiments.pipelines.read_back', lambda *args: 0.0)
        with pytest.raises(RoundTripError) as excinfo:
            roundtrip_magnetization(second_order, 0.5 * REFERENCE_TC, 0.0)
        assert excinfo.value.temperature == 0.5 * REFERENCE_TC
        assert excinfo.value.discrepancy == pytest.approx(0.917, abs=1e-3)
        assert excinfo.value.exit_code == 3


# --- Second-order experiment ---

class TestSecondOrderExperiment:
    def test_zero_and_six_tesla_curves(self, second_order):
        grid = np.concatenate([[0.0], reduced_grid(60)])
        curves = run_second_order(second_order, grid, [0.0, 6.0])
        assert list(curves) == [0.0, 6.0]

        zero_field = curves[0.0]
        assert zero_field[0].M_mean_field == pytest.approx(second_order.moment_scale, rel=1e-15)
        assert zero_field[0].M_nmr == pytest.approx(second_order.moment_scale, rel=1e-9)
        for point in zero_field:
            if point.t_reduced > 1.0:
                assert point.M_mean_field == 0.0
                assert point.M_nmr == pytest.approx(0.0, abs=1e-9 * second_order.moment_scale)
        assert np.all(np.diff([point.m for point in zero_field]) <= 0.0)

        tail = curves[6.0][-1]
        assert tail.t_reduced == pytest.approx(2.0)
        assert tail.m > 0.0
        y = second_order.g * CONSTANTS.mu_B * tail.B_eff / (CONSTANTS.k_B * tail.T)
        assert tail.M_mean_field == pytest.approx(second_order.moment_scale * brillouin(1.5, y), rel=1e-9)

        for points in curves.values():
            assert all(point.discrepancy < ROUND_TRIP_TOLERANCE for point in points)
            assert all(point.trace_distance < 1e-10 for point in points)

    def test_records_follow_column_order(self, second_order):
        point = run_second_order(second_order, reduced_grid(4), [6.0])[6.0][0]
        record = point.as_record()
        assert tuple(record) == CURVE_COLUMNS
        assert record['B0_T'] == 6.0
        assert record['branch'] == 'single'

    def test_first_order_model_is_rejected(self, first_order):
        with pytest.raises(DomainError):
            run_second_order(first_order, reduced_grid(4), [0.0])


# --- First-order experiment ---

class TestFirstOrderExperiment:
    def test_hysteresis_at_zero_field_and_none_far_above(self, first_order):
        zero_field, strong_field = run_first_order(first_order, HYSTERESIS_GRID, [0.0, 30.0])

        assert zero_field.transitions_up and zero_field.transitions_down
        assert zero_field.transitions_up[0].T_jump != zero_field.transitions_down[0].T_jump
        assert zero_field.width > 0.0
        assert zero_field.has_hysteresis

        assert not strong_field.has_hysteresis
        assert strong_field.width == 0.0
        heated = {point.T: point.m for point in strong_field.up}
        for point in strong_field.down:
            assert point.m == pytest.approx(heated[point.T], abs=1e-8)

        for curves in (zero_field, strong_field):
            records = curves.records()
            assert len(records) == 2 * len(HYSTERESIS_GRID)
            assert {record['branch'] for record in records} == {'up', 'down'}
            assert all(record['discrepancy'] < ROUND_TRIP_TOLERANCE for record in records)
            assert all(record['trace_distance'] < CERTIFICATION_THRESHOLD for record in records)

    def test_branches_are_in_traversal_order(self, first_order):
        curves = run_first_order(first_order, HYSTERESIS_GRID[::10], [0.0])[0]
        assert [point.T for point in curves.up] == pytest.approx(HYSTERESIS_GRID[::10].tolist())
        assert [point.T for point in curves.down] == pytest.approx(HYSTERESIS_GRID[::10][::-1].tolist())

    def test_weak_cubic_term_warns(self, caplog):
        weak = MaterialModel.from_critical_temperature(REFERENCE_TC, lambda_prime_ratio=1e-2)
        curves = run_first_order(weak, HYSTERESIS_GRID[::5], [0.0])[0]
        assert not curves.has_hysteresis
        assert 'below the first-order threshold' in caplog.text

    def test_second_order_model_is_rejected(self, second_order):
        with pytest.raises(DomainError):
            run_first_order(second_order, reduced_grid(4), [0.0])


# --- Configuration ---

class TestRunConfig:
    def test_defaults_give_second_order_model(self):
        config = parse_config('curve')
        assert (config.spin, config.g, config.z) == (1.5, 2.0, 6)
        assert config.steps == 300
        assert config.epsilon == 1e-5
        assert config.format == 'csv'
        model = config.material_model()
        assert not model.is_first_order_model
        assert critical_temperature(model) == pytest.approx(83.0, rel=1e-12)

    def test_first_order_runs_default_to_percent_ratio(self):
        config = parse_config('hysteresis')
        assert config.lambda_prime_ratio == 1e-2
        assert config.material_model().lambda_prime_ratio == pytest.approx(1e-2, rel=1e-12)

    def test_ratio_flag_switches_to_first_order(self):
        config = parse_config('angle-table', overrides={'lambda_prime_ratio': 0.01})
        assert config.material_model().is_first_order_model

    def test_exchange_in_kelvin(self):
        config = parse_config('roundtrip', overrides={'j_ex_kelvin': 83.0 / 15.0})
        assert critical_temperature(config.material_model()) == pytest.approx(83.0, rel=1e-12)

    @pytest.mark.parametrize('overrides, field, message', [
        ({'j_ex': 1e-22, 'lam': 1e24}, 'coupling', 'at most one'),
        ({'j_ex': 1e-22, 'j_ex_kelvin': 5.0}, 'j_ex_kelvin', 'Contradictory units'),
        ({'steps': 1}, 'steps', ''),
        ({'steps': 10**9}, 'steps', ''),
        ({'t_min': 2.5}, 't_min', 'below t_max'),
        ({'epsilon': 0.0}, 'epsilon', ''),
        ({'spin': 1.0}, 'spin', 'spin 3/2'),
        ({'lambda_prime_ratio': 0.5}, 'lambda_prime_ratio', 'hysteresis'),
        ({'temperature_scale': 3}, 'temperature_scale', 'Unknown'),
    ])
    def test_invalid_configs_name_the_field(self, overrides, field, message):
        with pytest.raises(ValidationError) as excinfo:
            parse_config('curve', overrides=overrides)
        assert field in excinfo.value.detail
        assert message in str(excinfo.value.detail[field])

    def test_hysteresis_needs_a_cubic_term(self):
        with pytest.raises(ValidationError) as excinfo:
            parse_config('hysteresis', overrides={'lambda_prime_ratio': 0.0})
        assert 'lambda_prime_ratio' in excinfo.value.detail

    def test_flags_override_config_file(self, tmp_path):
        path = tmp_path / 'run.json'
        path.write_text(json.dumps({'steps': 50, 't_c': 60.0, 'b0': [0.0, 6.0]}))
        config = parse_config('curve', config_file=path, overrides={'steps': 20, 't_c': None})
        assert config.steps == 20
        assert config.t_c == 60.0
        assert config.b0 == (0.0, 6.0)

    def test_broken_and_missing_config_files(self, tmp_path):
        broken = tmp_path / 'broken.json'
        broken.write_text('{"steps": ')
        with pytest.raises(ValidationError) as excinfo:
            parse_config('curve', config_file=broken)
        assert 'config' in excinfo.value.detail
        with pytest.raises(OSError):
            parse_config('curve', config_file=tmp_path / 'absent.json')

    def test_temperature_grids(self):
        reduced = parse_config('curve').temperature_grid()
        assert reduced.size == 300
        assert reduced[0] == pytest.approx(2.0 * REFERENCE_TC / 300)
        assert reduced[-1] == pytest.approx(2.0 * REFERENCE_TC)

        kelvin = parse_config('curve', overrides={'units': 'kelvin', 't_min': 10.0, 't_max': 100.0, 'steps': 10})
        np.testing.assert_allclose(kelvin.temperature_grid(), np.linspace(10.0, 100.0, 10))

    def test_kelvin_grid_defaults_to_twice_tc(self):
        config = parse_config('curve', overrides={'units': 'kelvin', 't_min': 10.0, 'steps': 5})
        assert config.t_max is None
        np.testing.assert_allclose(config.temperature_grid(), np.linspace(10.0, 2.0 * REFERENCE_TC, 5))
        ends = parse_config('curve', overrides={'units': 'kelvin', 'steps': 4}).temperature_grid()
        assert ends[-1] == pytest.approx(2.0 * REFERENCE_TC)
        with pytest.raises(DomainError):
            parse_config('curve', overrides={'units': 'kelvin', 't_min': 200.0}).temperature_grid()

    def test_parameters_round_trip(self):
        config = parse_config('angle-table', overrides={'b0': [0.0, 6.0], 'directions': ['down'], 'steps': 12})
        assert isinstance(config, RunConfig)
        assert parse_config('angle-table', overrides=config.as_parameters()) == config


# --- Writers ---

class TestWriters:
    def test_csv_is_lossless(self, rng):
        values = np.concatenate([rng.normal(size=50) * 10.0 ** rng.integers(-30, 30, size=50), [1 / 3, 0.1 + 0.2, 5e-324]])
        records = [{'branch': 'up', 'value': float(value)} for value in values]
        frame = pd.read_csv(io.BytesIO(render(records, 'csv')), float_precision='round_trip')
        assert list(frame.columns) == ['branch', 'value']
        assert frame['value'].tolist() == values.tolist()

    def test_json_is_lossless(self, rng):
        values = rng.normal(size=50) * 1e-23
        records = [{'M_si': float(value)} for value in values]
        parsed = json.loads(render(records, 'json'))
        assert [record['M_si'] for record in parsed] == values.tolist()

    def test_columns_fix_the_order(self):
        content = render([{'b': 1.0, 'a': 2.0}], 'csv', columns=('a', 'b')).decode()
        assert content.splitlines()[0] == 'a,b'

    def test_excel_is_a_workbook(self):
        content = render([{'T_K': 1.0}], 'excel')
        assert content[:2] == b'PK'

    def test_atomic_write_replaces_and_leaves_no_temporaries(self, tmp_path):
        target = tmp_path / 'out.csv'
        write_atomic(target, b'first\n')
        write_atomic(target, b'second\n')
        assert target.read_bytes() == b'second\n'
        assert [path.name for path in tmp_path.iterdir()] == ['out.csv']

    def test_missing_directory_is_an_io_error(self, tmp_path):
        with pytest.raises(OSError):
            write_atomic(tmp_path / 'missing' / 'out.csv', b'x')

    @pytest.mark.parametrize('path, expected', [
        ('fig1.csv', 'csv'), ('fig2.JSON', 'json'), ('table.xlsx', 'excel'), ('data.txt', 'csv'),
    ])
    def test_format_from_suffix(self, path, expected):
        assert format_for_path(path, 'csv') == expected


# --- emulate command ---

class TestEmulateCommand:
    def test_curve_to_stdout(self):
        content = emulate('curve', '--b0', 0, '--b0', 6, '--steps', 20)
        frame = pd.read_csv(io.StringIO(content), float_precision='round_trip')
        assert tuple(frame.columns) == CURVE_COLUMNS
        assert len(frame) == 40
        assert sorted(frame['B0_T'].unique()) == [0.0, 6.0]
        assert (frame['discrepancy'] < ROUND_TRIP_TOLERANCE).all()
        above = frame[(frame['B0_T'] == 0.0) & (frame['t_reduced'] > 1.0)]
        assert (above['M_si'] == 0.0).all()

    def test_hysteresis_json_file(self, tmp_path):
        target = tmp_path / 'fig2.json'
        emulate('hysteresis', '--lambda-prime-ratio', 1.0, '--t-min', 0.8, '--t-max', 1.3, '--steps', 26, '--out', target)
        records = json.loads(target.read_text())
        assert len(records) == 52
        assert [record['branch'] for record in records[:26]] == ['up'] * 26
        assert [record['branch'] for record in records[26:]] == ['down'] * 26

    def test_angle_table_reproduces_targets_after_reading_back(self, tmp_path):
        target = tmp_path / 'angles.csv'
        emulate('angle-table', '--steps', 30, '--b0', 0, '--b0', 6, '--out', target)
        frame = pd.read_csv(target, float_precision='round_trip')
        assert len(frame) == 2 * 2 * 30
        model = MaterialModel.from_critical_temperature(REFERENCE_TC)
        for row in frame.itertuples():
            angles = PulseAngles(row.theta_xA, row.theta_yA, row.theta_xB, row.theta_yB)
            state = thermal_density_matrix(model, row.B_eff, row.T_K)
            assert written_distance(angles, state) < CERTIFICATION_THRESHOLD

    def test_identical_configs_give_identical_bytes(self, tmp_path):
        first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
        emulate('hysteresis', '--lambda-prime-ratio', 1.0, '--t-min', 0.9, '--t-max', 1.2, '--steps', 16, '--out', first)
        emulate('hysteresis', '--lambda-prime-ratio', 1.0, '--t-min', 0.9, '--t-max', 1.2, '--steps', 16, '--out', second)
        assert first.read_bytes() == second.read_bytes()

    def test_brillouin_table(self):
        records = json.loads(emulate('brillouin', '--y-max', 5, '--steps', 11, '--format', 'json'))
        assert len(records) == 11
        for record in records:
            assert record['B_S'] == pytest.approx(record['B_closed_form'], abs=1e-12)

    def test_critical_field(self):
        records = json.loads(emulate(
            'critical-field', '--lambda-prime-ratio', 1.0, '--t-min', 0.8, '--t-max', 1.5, '--steps', 36,
            '--b-max', 30, '--b-steps', 21, '--format', 'json',
        ))
        assert len(records) == 1
        assert 0.0 < records[0]['B_c_T'] <= 30.0
        assert records[0]['resolution_T'] == pytest.approx(1.5)
        assert records[0]['supercool_K'] < records[0]['superheat_K']

    def test_roundtrip_temperatures(self):
        records = json.loads(emulate('roundtrip', '--temperature', 0, '--temperature', 41.5, '--format', 'json'))
        assert [record['T_K'] for record in records] == [0.0, 41.5]
        assert records[0]['m'] == 1.0

    def test_config_file(self, tmp_path):
        path = tmp_path / 'run.json'
        path.write_text(json.dumps({'temperatures': [41.5], 'b0': [1.0], 'format': 'json'}))
        records = json.loads(emulate('roundtrip', '--config', path))
        assert records[0]['B0_T'] == 1.0

    def test_suffix_conflicting_with_config_format_warns(self, tmp_path):
        path = tmp_path / 'run.json'
        path.write_text(json.dumps({'temperatures': [41.5], 'format': 'json'}))
        target = tmp_path / 'out.csv'
        errors = io.StringIO()
        call_command('emulate', 'roundtrip', '--config', str(path), '--out', str(target),
                     stdout=io.StringIO(), stderr=errors)
        assert 'warning' in errors.getvalue()
        assert "format 'json'" in errors.getvalue()
        assert pd.read_csv(target)['T_K'].tolist() == [41.5]

    def test_explicit_format_flag_silences_the_warning(self, tmp_path):
        path = tmp_path / 'run.json'
        path.write_text(json.dumps({'temperatures': [41.5], 'format': 'json'}))
        target = tmp_path / 'out.csv'
        errors = io.StringIO()
        call_command('emulate', 'roundtrip', '--config', str(path), '--out', str(target), '--format', 'json',
                     stdout=io.StringIO(), stderr=errors)
        assert 'warning' not in errors.getvalue()
        assert json.loads(target.read_text())[0]['T_K'] == 41.5

    def test_tiny_epsilon_round_trip_succeeds(self):
        records = json.loads(emulate('roundtrip', '--temperature', 41.5, '--epsilon', 1e-13, '--format', 'json'))
        assert records[0]['discrepancy'] < ROUND_TRIP_TOLERANCE

    def test_output_directory_override(self, settings, tmp_path):
        settings.FERRO_EMULATOR = {**settings.FERRO_EMULATOR, 'OUTPUT_DIR': str(tmp_path)}
        emulate('roundtrip', '--temperature', 41.5, '--out', 'relative.csv')
        assert (tmp_path / 'relative.csv').exists()

    def test_conflicting_couplings_exit_1(self):
        with pytest.raises(CommandError) as excinfo:
            emulate('curve', '--j-ex', 1e-22, '--lambda', 1e24)
        assert excinfo.value.returncode == 1
        assert 'coupling' in str(excinfo.value)

    def test_non_convergence_exits_2(self, monkeypatch):
        def stuck(*args, **kwargs):
            raise ConvergenceError("no fixed point", temperature=12.0)
        monkeypatch.setattr('experiments.runner.run_second_order', stuck)
        with pytest.raises(CommandError) as excinfo:
            emulate('curve', '--steps', 4)
        assert excinfo.value.returncode == 2

    def test_unbracketed_critical_field_exits_2(self):
        with pytest.raises(CommandError) as excinfo:
            emulate('critical-field', '--lambda-prime-ratio', 1.0, '--t-min', 0.8, '--t-max', 1.5,
                    '--steps', 36, '--b-max', 0.5, '--b-steps', 2)
        assert excinfo.value.returncode == 2

    def test_certification_failure_exits_3(self, monkeypatch):
        def uncertifiable(*args, **kwargs):
            raise CertificationError("cannot write", temperature=30.0, best_distance=0.01)
        monkeypatch.setattr('experiments.runner.build_angle_table', uncertifiable)
        with pytest.raises(CommandError) as excinfo:
            emulate('angle-table', '--steps', 4)
        assert excinfo.value.returncode == 3

    def test_unwritable_output_exits_4(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            emulate('roundtrip', '--temperature', 41.5, '--out', tmp_path / 'missing' / 'out.csv')
        assert excinfo.value.returncode == 4

    def test_excel_needs_a_file(self):
        with pytest.raises(CommandError) as excinfo:
            emulate('roundtrip', '--temperature', 41.5, '--format', 'excel')
        assert excinfo.value.returncode == 1


# --- REST API and Celery task ---

@pytest.mark.django_db
class TestExperimentAPI:
    def test_requires_authentication(self):
        response = APIClient().get('/api/experiments/runs/')
        assert response.status_code in (status.HTTP_401_UNAUTHORIZED, status.HTTP_403_FORBIDDEN)

    def test_run_completes_and_downloads(self, api_client, eager_celery, media_root):
        response = api_client.post('/api/experiments/runs/', {
            'kind': 'roundtrip',
            'format': 'json',
            'parameters': {'temperatures': [0.0, 41.5]},
        }, format='json')
        assert response.status_code == status.HTTP_202_ACCEPTED
        run_id = response.data['run_id']

        state = api_client.get(f'/api/experiments/runs/{run_id}/status/').data
        assert state['status'] == 'completed'
        assert state['record_count'] == 2
        assert state['download_url'] == f'/api/experiments/runs/{run_id}/download/'

        download = api_client.get(state['download_url'])
        assert download.status_code == status.HTTP_200_OK
        assert download['Content-Type'] == 'application/json'
        records = json.loads(b''.join(download.streaming_content))
        assert [record['T_K'] for record in records] == [0.0, 41.5]

        stored = ExperimentRun.objects.get(id=run_id).parameters
        assert stored['temperatures'] == [0.0, 41.5]
        assert stored['steps'] == 300
        assert stored['epsilon'] == 1e-5

    def test_invalid_parameters_are_rejected(self, api_client):
        response = api_client.post('/api/experiments/runs/', {
            'kind': 'curve',
            'parameters': {'j_ex': 1e-22, 'lam': 1e24},
        }, format='json')
        assert response.status_code == status.HTTP_400_BAD_REQUEST
        assert 'coupling' in response.data['parameters']
        assert not ExperimentRun.objects.exists()

    def test_output_path_is_not_accepted(self, api_client):
        response = api_client.post('/api/experiments/runs/', {
            'kind': 'roundtrip',
            'parameters': {'output': '/etc/passwd'},
        }, format='json')
        assert response.status_code == status.HTTP_400_BAD_REQUEST

    def test_failure_is_recorded_on_the_run(self, api_client, eager_celery, media_root, monkeypatch):
        def stuck(*args, **kwargs):
            raise ConvergenceError("no fixed point", temperature=41.5)
        monkeypatch.setattr('experiments.runner.roundtrip_magnetization', stuck)

        response = api_client.post('/api/experiments/runs/', {
            'kind': 'roundtrip',
            'parameters': {'temperatures': [41.5]},
        }, format='json')
        run = ExperimentRun.objects.get(id=response.data['run_id'])
        assert run.status == 'failed'
        assert run.exit_code == 2
        assert 'no fixed point' in run.error_message
        assert api_client.get(f'/api/experiments/runs/{run.id}/download/').status_code == status.HTTP_404_NOT_FOUND

    def test_unexpected_error_does_not_leave_the_run_running(self, media_root, monkeypatch):
        def exhausted(config):
            raise MemoryError("grid too large")
        monkeypatch.setattr('experiments.tasks.execute', exhausted)

        run = ExperimentRunFactory()
        message = run_experiment_task(run.id)
        run.refresh_from_db()
        assert run.status == 'failed'
        assert run.exit_code == 1
        assert 'MemoryError' in run.error_message
        assert run.finished_at is not None
        assert message.startswith('Failed')

    def test_users_see_only_their_runs(self, api_client, user):
        own = ExperimentRunFactory(requested_by=user)
        ExperimentRunFactory(requested_by=UserFactory())
        response = api_client.get('/api/experiments/runs/')
        assert [row['id'] for row in response.data['results']] == [own.id]

    def test_staff_see_every_run(self, api_client, user):
        user.is_staff = True
        user.save()
        ExperimentRunFactory(requested_by=user)
        ExperimentRunFactory(requested_by=UserFactory())
        assert api_client.get('/api/experiments/runs/').data['count'] == 2
