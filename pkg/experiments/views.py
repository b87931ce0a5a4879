import logging
import os

from django.http import FileResponse
from drf_spectacular.utils import extend_schema, OpenApiTypes
from rest_framework import filters, mixins, status, viewsets
from rest_framework.decorators import action
from rest_framework.response import Response

from .models import ExperimentRun
from .serializers import ExperimentRequestSerializer, ExperimentRunSerializer
from .tasks import run_experiment_task
from .writers import CONTENT_TYPES

logger = logging.getLogger(__name__)


class ExperimentRunViewSet(mixins.CreateModelMixin,
                           mixins.ListModelMixin,
                           mixins.RetrieveModelMixin,
                           viewsets.GenericViewSet):
    """
    Request emulation runs and fetch their results.
    Runs execute asynchronously in Celery; staff see every run, others their own.
    """
    serializer_class = ExperimentRunSerializer
    filter_backends = [filters.OrderingFilter]
    ordering_fields = ['created_at', 'kind', 'status']

    def get_queryset(self):
        user = self.request.user
        queryset = ExperimentRun.objects.all()
        if not user.is_staff:
            queryset = queryset.filter(requested_by=user)

        kind = self.request.query_params.get('kind')
        if kind:
            queryset = queryset.filter(kind=kind)
        return queryset

    @extend_schema(request=ExperimentRequestSerializer, responses={202: OpenApiTypes.OBJECT})
    def create(self, request, *args, **kwargs):
        serializer = ExperimentRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)

        config = serializer.validated_data['config']
        run = ExperimentRun.objects.create(
            kind=config.kind,
            parameters=config.as_parameters(),
            output_format=config.format,
            requested_by=request.user,
        )
        logger.info(f"Experiment run {run.id} ({run.kind}) requested by {request.user.username}")

        run_experiment_task.delay(run.id)

        return Response({
            'status': 'processing',
            'message': 'Experiment run started',
            'run_id': run.id,
        }, status=status.HTTP_202_ACCEPTED)

    @extend_schema(responses={200: OpenApiTypes.OBJECT})
    @action(detail=True, methods=['get'], url_path='status')
    def run_status(self, request, pk=None):
        run = self.get_object()
        is_ready = run.status == 'completed' and bool(run.output_file)
        return Response({
            'run_id': run.id,
            'kind': run.kind,
            'status': run.status,
            'record_count': run.record_count,
            'exit_code': run.exit_code,
            'error_message': run.error_message or None,
            'created_at': run.created_at,
            'download_url': f"/api/experiments/runs/{run.id}/download/" if is_ready else None,
        })

    @extend_schema(responses={(200, 'application/octet-stream'): OpenApiTypes.BINARY})
    @action(detail=True, methods=['get'])
    def download(self, request, pk=None):
        run = self.get_object()
        if not run.output_file or not os.path.exists(run.output_file.path):
            return Response({'error': 'File not ready or missing'}, status=status.HTTP_404_NOT_FOUND)

        response = FileResponse(open(run.output_file.path, 'rb'), content_type=CONTENT_TYPES[run.output_format])
        filename = os.path.basename(run.output_file.name)
        response['Content-Disposition'] = f'attachment; filename="{filename}"'
        return response
