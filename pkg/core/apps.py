from django.apps import AppConfig


class CoreConfig(AppConfig):
    """Shared error types and task/parallel helpers used by every analysis app."""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'core'
    verbose_name = 'Analysis core'
