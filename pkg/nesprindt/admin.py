"""
Admin configuration for the run ledger.
"""
from django.contrib import admin
from django.utils.html import format_html

from .models import AnalysisRun

STATUS_COLORS = {
    'pending': '#6c757d',
    'running': '#0d6efd',
    'finished': '#198754',
    'failed': '#dc3545',
}


@admin.register(AnalysisRun)
class AnalysisRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'kind', 'status_badge', 'data_path', 'threads', 'exit_code', 'created_at', 'finished_at']
    list_filter = ['kind', 'status', 'created_at']
    search_fields = ['data_path', 'out_dir', 'error_message', 'task_id']
    readonly_fields = ['created_at', 'started_at', 'finished_at', 'exit_code', 'task_id']

    fieldsets = (
        ('Run', {
            'fields': ('kind', 'status', 'threads', 'task_id')
        }),
        ('Inputs', {
            'fields': ('data_path', 'out_dir', 'config')
        }),
        ('Outcome', {
            'fields': ('summary', 'error_message', 'exit_code')
        }),
        ('Timing', {
            'fields': ('created_at', 'started_at', 'finished_at')
        }),
    )

    def status_badge(self, obj):
        return format_html(
            '<span style="color: white; background-color: {}; padding: 2px 8px; border-radius: 3px;">{}</span>',
            STATUS_COLORS.get(obj.status, '#6c757d'),
            obj.get_status_display(),
        )
    status_badge.short_description = 'Status'
