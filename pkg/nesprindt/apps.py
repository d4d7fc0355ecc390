from django.apps import AppConfig


class NesprindtConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'nesprindt'
    verbose_name = 'Nested Undersampling Runs'
