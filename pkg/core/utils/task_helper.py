import logging
from django.conf import settings
from celery.exceptions import OperationalError

logger = logging.getLogger(__name__)


def run_task_safe(task_func, sync_func, *args, **kwargs):
    """
    Queue a task on Celery, falling back to running it in-process if
    Celery is disabled or the broker refuses the task.

    Args:
        task_func: The Celery task function (should have .delay method)
        sync_func: The standalone function to run if fallback is needed
        *args: Arguments for the task
        **kwargs: Keyword arguments for the task

    Returns:
        dict: {'queued': bool, 'task_id': str or None, 'result': sync result or None}
    """
    enable_celery = getattr(settings, 'ENABLE_CELERY', True)

    if enable_celery:
        try:
            result = task_func.delay(*args, **kwargs)
            logger.info(f"Task {task_func.__name__} queued via Celery: {result.id}")
            return {'queued': True, 'task_id': str(result.id), 'result': None}
        except (OperationalError, Exception) as e:
            logger.warning(f"Failed to queue task {task_func.__name__} via Celery: {e}. Running in-process.")
    else:
        logger.debug(f"Celery disabled. Running {sync_func.__name__} in-process.")

    # A command-line process exits before a daemon thread would finish,
    # so the fallback is synchronous.
    return {'queued': False, 'task_id': None, 'result': sync_func(*args, **kwargs)}
