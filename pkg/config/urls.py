"""
URL configuration: the admin site for browsing the run ledger.
"""
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]

admin.site.site_header = 'NesPrInDT Admin'
admin.site.site_title = 'NesPrInDT Run Ledger'
admin.site.index_title = 'Analysis runs'
