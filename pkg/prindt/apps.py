from django.apps import AppConfig


class PrindtConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'prindt'
    verbose_name = 'Repeated Undersampled Trees'
