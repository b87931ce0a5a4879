"""
Run configuration shared by the ``emulate`` command and the REST API.

A JSON config file and command-line flags are merged (flags win) and
validated by RunConfigSerializer into a frozen RunConfig.
"""
import json
import logging
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from rest_framework import serializers

from mean_field.constants import CONSTANTS
from mean_field.exceptions import DomainError
from mean_field.materials import MaterialModel, critical_temperature

logger = logging.getLogger(__name__)

KINDS = ('brillouin', 'curve', 'hysteresis', 'critical-field', 'angle-table', 'roundtrip')
FIRST_ORDER_KINDS = ('hysteresis', 'critical-field')
REGISTER_KINDS = ('curve', 'hysteresis', 'angle-table', 'roundtrip')
FORMATS = ('csv', 'json', 'excel')
COUPLING_KEYS = ('j_ex', 'j_ex_kelvin', 'lam', 't_c')

DEFAULT_CRITICAL_TEMPERATURE = 83.0
DEFAULT_FIRST_ORDER_RATIO = 1e-2
DEFAULT_REDUCED_T_MAX = 2.0
MAX_STEPS = 100_000


def _emulator_setting(key):
    return lambda: settings.FERRO_EMULATOR[key]


@dataclass(frozen=True)
class RunConfig:
    kind: str
    spin: float = 1.5
    g: float = 2.0
    z: int = 6
    j_ex: float | None = None
    j_ex_kelvin: float | None = None
    lam: float | None = None
    t_c: float | None = None
    lambda_prime_ratio: float = 0.0
    b0: tuple = (0.0,)
    t_min: float | None = None
    t_max: float | None = None
    steps: int = 300
    units: str = 'reduced'
    directions: tuple = ('up', 'down')
    epsilon: float = 1e-5
    temperatures: tuple = field(default_factory=tuple)
    branch_seed: float = 1.0
    b_max: float = 30.0
    b_steps: int = 31
    y_max: float = 10.0
    output: str | None = None
    format: str = 'csv'

    def material_model(self):
        """The ferromagnet this run emulates, from whichever coupling was given."""
        if self.j_ex is not None:
            model = MaterialModel(spin=self.spin, g=self.g, z=self.z, j_ex=self.j_ex)
        elif self.j_ex_kelvin is not None:
            model = MaterialModel(spin=self.spin, g=self.g, z=self.z, j_ex=self.j_ex_kelvin * CONSTANTS.k_B)
        elif self.lam is not None:
            model = MaterialModel(spin=self.spin, g=self.g, z=self.z, lam=self.lam)
        else:
            return MaterialModel.from_critical_temperature(
                self.t_c if self.t_c is not None else DEFAULT_CRITICAL_TEMPERATURE,
                spin=self.spin,
                g=self.g,
                z=self.z,
                lambda_prime_ratio=self.lambda_prime_ratio,
            )
        return model.with_lambda_prime_ratio(self.lambda_prime_ratio)

    def temperature_grid(self, model=None):
        """
        Kelvin grid of ``steps`` points evenly spread over (0, t_max], or over
        [t_min, t_max] when t_min is given. Without t_max the grid ends at 2 T_c
        in either unit system.
        """
        t_c = critical_temperature(model or self.material_model())
        scale = t_c if self.units == 'reduced' else 1.0
        upper = self.t_max * scale if self.t_max is not None else DEFAULT_REDUCED_T_MAX * t_c
        if self.t_min is None:
            return upper * np.arange(1, self.steps + 1) / self.steps
        lower = self.t_min * scale
        if not lower < upper:
            raise DomainError(f"t_min={lower} K must lie below the grid end {upper} K")
        return np.linspace(lower, upper, self.steps)

    def field_grid(self):
        return np.linspace(0.0, self.b_max, self.b_steps)

    def as_parameters(self):
        """JSON-safe dict that parse_config turns back into this config."""
        values = {name: getattr(self, name) for name in self.__dataclass_fields__ if name != 'kind'}
        for name in ('b0', 'directions', 'temperatures'):
            values[name] = list(values[name])
        return values


class RunConfigSerializer(serializers.Serializer):
    """
    Validates a merged run configuration.
    Every error is keyed by the offending field.
    """
    kind = serializers.ChoiceField(choices=KINDS)

    # Material
    spin = serializers.FloatField(default=1.5, min_value=0.5)
    g = serializers.FloatField(default=2.0)
    z = serializers.IntegerField(default=6, min_value=1)
    j_ex = serializers.FloatField(required=False, allow_null=True)
    j_ex_kelvin = serializers.FloatField(required=False, allow_null=True)
    lam = serializers.FloatField(required=False, allow_null=True)
    t_c = serializers.FloatField(required=False, allow_null=True)
    lambda_prime_ratio = serializers.FloatField(required=False, allow_null=True, min_value=0.0)

    # Grids
    b0 = serializers.ListField(child=serializers.FloatField(), required=False, allow_empty=False)
    t_min = serializers.FloatField(required=False, allow_null=True, min_value=0.0)
    t_max = serializers.FloatField(required=False, allow_null=True)
    steps = serializers.IntegerField(default=_emulator_setting('DEFAULT_STEPS'), min_value=2, max_value=MAX_STEPS)
    units = serializers.ChoiceField(choices=('reduced', 'kelvin'), default='reduced')
    directions = serializers.ListField(
        child=serializers.ChoiceField(choices=('up', 'down')), required=False, allow_empty=False
    )
    temperatures = serializers.ListField(child=serializers.FloatField(min_value=0.0), required=False)
    branch_seed = serializers.FloatField(default=1.0, min_value=-1.0, max_value=1.0)
    b_max = serializers.FloatField(default=30.0, min_value=0.0)
    b_steps = serializers.IntegerField(default=31, min_value=2, max_value=MAX_STEPS)
    y_max = serializers.FloatField(default=10.0)

    # Output
    epsilon = serializers.FloatField(default=_emulator_setting('EPSILON'))
    output = serializers.CharField(required=False, allow_null=True, allow_blank=False)
    format = serializers.ChoiceField(choices=FORMATS, default=_emulator_setting('DEFAULT_FORMAT'))

    def to_internal_value(self, data):
        unknown = sorted(set(data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({key: "Unknown configuration key." for key in unknown})
        return super().to_internal_value(data)

    def validate_g(self, value):
        if not value > 0:
            raise serializers.ValidationError("Landé factor must be positive.")
        return value

    def validate_spin(self, value):
        if 2 * value != int(2 * value):
            raise serializers.ValidationError("Spin must be a half-integer.")
        return value

    def validate_epsilon(self, value):
        if not 0.0 < value <= 1.0:
            raise serializers.ValidationError("Epsilon must lie in (0, 1].")
        return value

    def validate_y_max(self, value):
        if not value > 0:
            raise serializers.ValidationError("y_max must be positive.")
        return value

    def validate(self, data):
        given = [key for key in COUPLING_KEYS if data.get(key) is not None]
        if 'j_ex' in given and 'j_ex_kelvin' in given:
            raise serializers.ValidationError(
                {'j_ex_kelvin': "Contradictory units: give the exchange energy in joule or in kelvin, not both."}
            )
        if len(given) > 1:
            raise serializers.ValidationError({'coupling': f"Give at most one of {', '.join(given)}."})
        for key in ('lam', 't_c'):
            if data.get(key) is not None and not data[key] > 0:
                raise serializers.ValidationError({key: "Must be positive."})

        t_min, t_max = data.get('t_min'), data.get('t_max')
        if t_max is not None and not t_max > 0:
            raise serializers.ValidationError({'t_max': "Must be positive."})
        if t_max is None and data['units'] == 'reduced':
            t_max = DEFAULT_REDUCED_T_MAX
        if t_min is not None and t_max is not None and not t_min < t_max:
            raise serializers.ValidationError({'t_min': "Must be below t_max."})

        if data.get('lambda_prime_ratio') is None:
            data['lambda_prime_ratio'] = DEFAULT_FIRST_ORDER_RATIO if data['kind'] in FIRST_ORDER_KINDS else 0.0
        if data['kind'] in FIRST_ORDER_KINDS and data['lambda_prime_ratio'] == 0.0:
            raise serializers.ValidationError(
                {'lambda_prime_ratio': f"The {data['kind']} run needs a first-order model (ratio > 0)."}
            )
        if data['kind'] in REGISTER_KINDS and data['spin'] != 1.5:
            raise serializers.ValidationError({'spin': "The four-level register holds a spin 3/2 ladder only."})
        if data['kind'] == 'curve' and data['lambda_prime_ratio'] != 0.0:
            raise serializers.ValidationError(
                {'lambda_prime_ratio': "The curve run emulates the second-order model; use hysteresis instead."}
            )
        return data


def load_config_file(path):
    """JSON object from ``path``; OSError propagates as an I/O failure."""
    with open(path, encoding='utf-8') as handle:
        try:
            content = json.load(handle)
        except json.JSONDecodeError as exc:
            raise serializers.ValidationError({'config': f"Invalid JSON: {exc}"})
    if not isinstance(content, dict):
        raise serializers.ValidationError({'config': "The config file must hold a JSON object."})
    return content


def parse_config(kind, config_file=None, overrides=None):
    """
    Merge a JSON config file with flag overrides (None means "not given") and
    validate. Raises rest_framework ValidationError on invalid input.
    """
    data = load_config_file(config_file) if config_file else {}
    data.update({key: value for key, value in (overrides or {}).items() if value is not None})
    data['kind'] = kind

    serializer = RunConfigSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    values = dict(serializer.validated_data)
    for name in ('b0', 'directions', 'temperatures'):
        if name in values:
            values[name] = tuple(values[name])
    config = RunConfig(**values)
    logger.debug(f"Parsed {kind} config: {config}")
    return config
