import logging

from celery import shared_task
from django.core.files.base import ContentFile
from django.utils import timezone
from rest_framework.exceptions import ValidationError

from mean_field.exceptions import EmulationError

from .config import parse_config
from .models import ExperimentRun
from .runner import execute
from .writers import EXTENSIONS, render

logger = logging.getLogger(__name__)


@shared_task
def run_experiment_task(run_id):
    """
    Celery task that executes one ExperimentRun and stores the rendered
    output in its FileField. Failures are recorded on the run.
    """
    try:
        run = ExperimentRun.objects.get(id=run_id)
    except ExperimentRun.DoesNotExist:
        logger.error(f"Experiment run {run_id} does not exist")
        return f"Failed: run {run_id} not found"

    run.status = 'running'
    run.save(update_fields=['status'])

    try:
        config = parse_config(run.kind, overrides={**run.parameters, 'format': run.output_format})
        records, columns = execute(config)
        content = render(records, config.format, columns)

        file_name = f"{run.kind}_{run.id}_{timezone.now().strftime('%Y%m%d_%H%M%S')}.{EXTENSIONS[config.format]}"
        run.output_file.save(file_name, ContentFile(content), save=False)
        run.record_count = len(records)
        run.status = 'completed'
    except EmulationError as exc:
        _fail(run, exc, exc.exit_code)
    except ValidationError as exc:
        _fail(run, exc.detail, 1)
    except OSError as exc:
        _fail(run, exc, 4)
    except Exception as exc:
        logger.exception(f"Unexpected error in experiment run {run.id}")
        _fail(run, f"{type(exc).__name__}: {exc}", 1)

    run.finished_at = timezone.now()
    run.save()
    if run.status == 'completed':
        logger.info(f"Experiment run {run.id} ({run.kind}) completed with {run.record_count} records")
        return f"Run {run.id} completed."
    return f"Failed: {run.error_message}"


def _fail(run, error, exit_code):
    logger.error(f"Experiment run {run.id} ({run.kind}) failed with exit code {exit_code}: {error}")
    run.status = 'failed'
    run.error_message = str(error)
    run.exit_code = exit_code
