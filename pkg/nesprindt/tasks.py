"""
Celery tasks for background analysis runs.
"""
import logging

from celery import shared_task

logger = logging.getLogger(__name__)


@shared_task(bind=True)
def execute_analysis_run(self, run_id):
    """
    Execute a recorded AnalysisRun on a worker.

    Domain errors are stored on the run and not retried.
    """
    from .models import AnalysisRun
    from .services import process_analysis_run

    AnalysisRun.objects.filter(pk=run_id).update(task_id=self.request.id or '')
    result = process_analysis_run(run_id)
    if not result['success']:
        logger.warning(f"Background run {run_id} failed with exit code {result['exit_code']}: {result['error']}")
    return result
