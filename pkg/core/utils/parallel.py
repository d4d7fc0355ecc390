"""
Ordered parallel map used for repeated tree fitting.
"""
import logging

from django.conf import settings
from joblib import Parallel, delayed

logger = logging.getLogger(__name__)


def chunk_jobs(jobs, n_chunks):
    """Split a job list into at most n_chunks contiguous, order-preserving chunks."""
    jobs = list(jobs)
    if not jobs:
        return []
    n_chunks = max(1, min(n_chunks, len(jobs)))
    size, extra = divmod(len(jobs), n_chunks)
    chunks, start = [], 0
    for c in range(n_chunks):
        stop = start + size + (1 if c < extra else 0)
        chunks.append(jobs[start:stop])
        start = stop
    return chunks


def run_ordered(func, jobs, threads=1, backend=None):
    """
    Apply ``func`` to every job and return the results in job order.

    ``threads == 1`` runs in-process. Otherwise the jobs are split into one
    contiguous chunk per worker and dispatched through joblib; results are
    re-assembled by chunk position, so the output never depends on which
    worker finished first.
    """
    jobs = list(jobs)
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if threads == 1 or len(jobs) <= 1:
        return [func(job) for job in jobs]

    backend = backend or getattr(settings, 'NESPRINDT_PARALLEL_BACKEND', 'loky')
    chunks = chunk_jobs(jobs, threads)
    logger.debug(f"Dispatching {len(jobs)} jobs in {len(chunks)} chunks on {backend}")
    chunk_results = Parallel(n_jobs=threads, backend=backend)(
        delayed(_run_chunk)(func, chunk) for chunk in chunks
    )
    return [result for chunk in chunk_results for result in chunk]


def _run_chunk(func, chunk):
    return [func(job) for job in chunk]
