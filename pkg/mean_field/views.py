import logging

from django_filters.rest_framework import DjangoFilterBackend
from drf_spectacular.utils import extend_schema, OpenApiTypes
from rest_framework import filters, status, viewsets
from rest_framework.decorators import action
from rest_framework.response import Response

from .exceptions import EmulationError
from .materials import critical_temperature
from .models import Material
from .serializers import MaterialSerializer, SolveRequestSerializer
from .solver import solve_self_consistent
from .thermodynamics import coexistence_temperature, first_order_threshold, hysteresis_limits

logger = logging.getLogger(__name__)


class MaterialViewSet(viewsets.ModelViewSet):
    """
    CRUD for material presets.
    Supports a thermodynamic summary and single-point solves.
    """
    queryset = Material.objects.all()
    serializer_class = MaterialSerializer
    filter_backends = [DjangoFilterBackend, filters.SearchFilter, filters.OrderingFilter]
    filterset_fields = ['spin', 'neighbors']
    search_fields = ['name']
    ordering_fields = ['name', 'created_at']

    def perform_create(self, serializer):
        material = serializer.save()
        logger.info(f"Material preset created: {material.name} by user {self.request.user.username}")

    @extend_schema(responses={200: OpenApiTypes.OBJECT})
    @action(detail=True, methods=['get'])
    def summary(self, request, pk=None):
        material = self.get_object()
        model = material.to_model()
        threshold = first_order_threshold(model.spin)
        try:
            t_c = critical_temperature(model)

            # 1. Hysteresis window at zero field, if the transition is first order
            limits = hysteresis_limits(model, 0.0)
            window = None
            if limits is not None:
                window = {
                    'supercool_K': limits[0],
                    'superheat_K': limits[1],
                    'coexistence_K': coexistence_temperature(model, 0.0),
                }
        except EmulationError as exc:
            return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)

        # 2. Warn when the cubic term is too weak to make the transition discontinuous
        if model.is_first_order_model and model.lambda_prime_ratio <= threshold:
            logger.warning(
                f"Material {material.name}: λ'/λ = {model.lambda_prime_ratio} is below the first-order threshold {threshold:.4f}"
            )

        return Response({
            'material_id': material.id,
            'lambda_si': model.mean_field_parameter,
            'critical_temperature_K': t_c,
            'lambda_prime_ratio': model.lambda_prime_ratio,
            'first_order_threshold': threshold,
            'hysteresis': window,
        })

    @extend_schema(request=SolveRequestSerializer, responses={200: OpenApiTypes.OBJECT})
    @action(detail=True, methods=['post'])
    def solve(self, request, pk=None):
        material = self.get_object()
        serializer = SolveRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)

        data = serializer.validated_data
        try:
            result = solve_self_consistent(material.to_model(), data['temperature'], data['b0'], data['m_init'])
        except EmulationError as exc:
            return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)

        logger.info(f"Solved {material.name} at T={data['temperature']} K, B0={data['b0']} T: m={result.m:.6f}")
        return Response({'material_id': material.id, **data, **result.as_dict()})
