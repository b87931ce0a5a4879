from django.contrib import admin

from .models import ExperimentRun


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'kind', 'status', 'output_format', 'record_count', 'requested_by', 'created_at', 'finished_at')
    list_filter = ('kind', 'status', 'output_format', 'created_at')
    search_fields = ('requested_by__username', 'error_message')
    readonly_fields = ('created_at', 'finished_at', 'exit_code', 'error_message')
