from rest_framework import serializers

from .exceptions import DomainError
from .materials import critical_temperature
from .models import Material

COUPLING_FIELDS = ('exchange_energy', 'mean_field_parameter', 'target_critical_temperature')


class MaterialSerializer(serializers.ModelSerializer):
    """
    Serializer for Material presets.
    Adds the derived λ and T_c so a client never recomputes them.
    """
    lambda_si = serializers.SerializerMethodField()
    critical_temperature = serializers.SerializerMethodField()
    is_first_order = serializers.SerializerMethodField()

    class Meta:
        model = Material
        fields = [
            'id',
            'name',
            'spin',
            'lande_g',
            'neighbors',
            'exchange_energy',
            'mean_field_parameter',
            'target_critical_temperature',
            'lambda_prime_ratio',
            'lambda_si',
            'critical_temperature',
            'is_first_order',
            'created_at',
        ]
        read_only_fields = ['id', 'created_at']

    def get_lambda_si(self, obj) -> float:
        return obj.to_model().mean_field_parameter

    def get_critical_temperature(self, obj) -> float | None:
        try:
            return critical_temperature(obj.to_model())
        except DomainError:
            return None

    def get_is_first_order(self, obj) -> bool:
        return obj.lambda_prime_ratio != 0.0

    def validate(self, data):
        # merge with the stored row so partial updates are checked as a whole
        merged = {}
        if self.instance is not None:
            merged = {name: getattr(self.instance, name) for name in COUPLING_FIELDS}
            merged.update(spin=self.instance.spin, lande_g=self.instance.lande_g,
                          neighbors=self.instance.neighbors,
                          lambda_prime_ratio=self.instance.lambda_prime_ratio)
        merged.update(data)

        given = [name for name in COUPLING_FIELDS if merged.get(name) is not None]
        if len(given) != 1:
            raise serializers.ValidationError(
                {'coupling': f"exactly one of {', '.join(COUPLING_FIELDS)} is required, got {given or 'none'}"}
            )

        candidate = Material(**{key: value for key, value in merged.items() if key != 'name'})
        try:
            candidate.to_model()
        except DomainError as exc:
            raise serializers.ValidationError({given[0]: str(exc)})
        return data


class SolveRequestSerializer(serializers.Serializer):
    """
    Serializer to validate a single self-consistent solve request.
    """
    temperature = serializers.FloatField(min_value=0.0)
    b0 = serializers.FloatField(default=0.0)
    m_init = serializers.FloatField(default=1.0, min_value=-1.0, max_value=1.0)
