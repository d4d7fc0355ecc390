"""
Ledger of analysis runs started from the command line or a Celery worker.
"""
from django.db import models
from django.utils import timezone


class AnalysisRun(models.Model):
    """
    One recorded run or probe. Holds the merged configuration and input
    paths so a queued worker can execute it, and the result summary or
    error once it finishes.
    """
    KIND_CHOICES = [
        ('run', 'Nested Run'),
        ('probe', 'Heterogeneity Probe'),
    ]

    STATUS_CHOICES = [
        ('pending', 'Pending'),
        ('running', 'Running'),
        ('finished', 'Finished'),
        ('failed', 'Failed'),
    ]

    kind = models.CharField(max_length=20, choices=KIND_CHOICES, default='run')
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='pending')

    # Inputs
    data_path = models.CharField(max_length=1024)
    out_dir = models.CharField(max_length=1024)
    config = models.JSONField(default=dict, help_text='Merged configuration document')
    threads = models.PositiveIntegerField(default=1)

    # Outcome
    summary = models.JSONField(default=dict, blank=True)
    error_message = models.TextField(blank=True)
    exit_code = models.PositiveSmallIntegerField(null=True, blank=True)
    task_id = models.CharField(max_length=255, blank=True)

    # Timestamps
    created_at = models.DateTimeField(auto_now_add=True)
    started_at = models.DateTimeField(null=True, blank=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['status', 'created_at'], name='nesprindt_a_status_4c1e0b_idx'),
            models.Index(fields=['kind', 'status'], name='nesprindt_a_kind_8d2f6a_idx'),
        ]
        verbose_name = 'Analysis Run'
        verbose_name_plural = 'Analysis Runs'

    def __str__(self):
        return f"{self.get_kind_display()} #{self.pk} on {self.data_path} ({self.status})"

    def mark_running(self):
        self.status = 'running'
        self.started_at = timezone.now()
        self.save(update_fields=['status', 'started_at'])

    def mark_finished(self, summary):
        self.status = 'finished'
        self.summary = summary
        self.exit_code = 0
        self.finished_at = timezone.now()
        self.save(update_fields=['status', 'summary', 'exit_code', 'finished_at'])

    def mark_failed(self, error_message, exit_code):
        """Record the error and the exit status the command line reports for it."""
        self.status = 'failed'
        self.error_message = error_message
        self.exit_code = exit_code
        self.finished_at = timezone.now()
        self.save(update_fields=['status', 'error_message', 'exit_code', 'finished_at'])

    @property
    def duration(self):
        if self.started_at is None or self.finished_at is None:
            return None
        return (self.finished_at - self.started_at).total_seconds()
