from django.apps import AppConfig


class CtreeConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'ctree'
    verbose_name = 'Significance-Tested Trees'
