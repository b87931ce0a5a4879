from django.contrib import admin
from .models import Material


@admin.register(Material)
class MaterialAdmin(admin.ModelAdmin):
    list_display = ('name', 'spin', 'lande_g', 'neighbors', 'lambda_prime_ratio', 'created_at')
    search_fields = ('name',)
    list_filter = ('spin', 'created_at')
