from rest_framework import serializers

from .config import parse_config
from .models import ExperimentRun


class ExperimentRunSerializer(serializers.ModelSerializer):
    """Serializer for ExperimentRun records; everything is written by the task."""
    requested_by = serializers.StringRelatedField()

    class Meta:
        model = ExperimentRun
        fields = '__all__'
        read_only_fields = [field.name for field in ExperimentRun._meta.fields]


class ExperimentRequestSerializer(serializers.Serializer):
    """
    Serializer to validate a run request.
    ``parameters`` holds the same keys as a config file for the ``emulate`` command.
    """
    kind = serializers.ChoiceField(choices=ExperimentRun.KIND_CHOICES)
    format = serializers.ChoiceField(choices=ExperimentRun.FORMAT_CHOICES, required=False)
    parameters = serializers.DictField(required=False, default=dict)

    def validate(self, data):
        parameters = dict(data.get('parameters', {}))
        if 'output' in parameters:
            raise serializers.ValidationError({'parameters': {'output': "Output paths are chosen by the server."}})
        if 'format' in data:
            parameters['format'] = data['format']
        try:
            config = parse_config(data['kind'], overrides=parameters)
        except serializers.ValidationError as exc:
            raise serializers.ValidationError({'parameters': exc.detail})
        data['config'] = config
        return data
