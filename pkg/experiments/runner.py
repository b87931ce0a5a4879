"""
One entry point per run kind, shared by the ``emulate`` command and the
Celery task. Every runner returns flat records ready for the writers.
"""
import logging

import numpy as np

from angle_mapper.mapper import build_angle_table
from mean_field.brillouin import brillouin, brillouin_s32_closed_form
from mean_field.materials import critical_temperature
from mean_field.sweeps import find_critical_field
from mean_field.thermodynamics import hysteresis_limits

from .pipelines import CURVE_COLUMNS, roundtrip_magnetization, run_first_order, run_second_order

logger = logging.getLogger(__name__)

ANGLE_TABLE_COLUMNS = (
    'B0_T', 'T_K', 'branch', 'm', 'B_eff',
    'theta_xA', 'theta_yA', 'theta_xB', 'theta_yB', 'trace_distance', 'method',
)


def _brillouin_records(config):
    records = []
    for y in np.linspace(0.0, config.y_max, config.steps):
        record = {'S': config.spin, 'y': float(y), 'B_S': brillouin(config.spin, y)}
        if config.spin == 1.5:
            record['B_closed_form'] = brillouin_s32_closed_form(y)
        records.append(record)
    return records


def _curve_records(config):
    model = config.material_model()
    curves = run_second_order(model, config.temperature_grid(model), config.b0, config.epsilon)
    return [point.as_record() for points in curves.values() for point in points]


def _hysteresis_records(config):
    model = config.material_model()
    records = []
    for curves in run_first_order(model, config.temperature_grid(model), config.b0, config.epsilon):
        records.extend(curves.records())
    return records


def _critical_field_records(config):
    model = config.material_model()
    fields = config.field_grid()
    B_c = find_critical_field(model, config.temperature_grid(model), fields)
    limits = hysteresis_limits(model, 0.0)
    return [{
        'lambda_prime_ratio': model.lambda_prime_ratio,
        'T_c_K': critical_temperature(model),
        'supercool_K': limits[0] if limits else None,
        'superheat_K': limits[1] if limits else None,
        'B_c_T': B_c,
        'resolution_T': float(fields[1] - fields[0]),
    }]


def _angle_table_records(config):
    model = config.material_model()
    grid = config.temperature_grid(model)
    records = []
    for B0 in config.b0:
        for direction in config.directions:
            records.extend(entry.as_record() for entry in build_angle_table(model, grid, B0, direction))
    return records


def _roundtrip_records(config):
    model = config.material_model()
    temperatures = config.temperatures or tuple(config.temperature_grid(model))
    return [
        roundtrip_magnetization(model, float(T), B0, config.branch_seed, config.epsilon).as_record()
        for B0 in config.b0
        for T in temperatures
    ]


RUNNERS = {
    'brillouin': (_brillouin_records, None),
    'curve': (_curve_records, CURVE_COLUMNS),
    'hysteresis': (_hysteresis_records, CURVE_COLUMNS),
    'critical-field': (_critical_field_records, None),
    'angle-table': (_angle_table_records, ANGLE_TABLE_COLUMNS),
    'roundtrip': (_roundtrip_records, CURVE_COLUMNS),
}


def execute(config):
    """Records for ``config.kind`` plus the column order to write them in."""
    runner, columns = RUNNERS[config.kind]
    logger.info(f"Running {config.kind}")
    records = runner(config)
    logger.info(f"{config.kind} produced {len(records)} records")
    return records, columns
