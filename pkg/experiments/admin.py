from django.contrib import admin
from .models import SimulationRun


@admin.register(SimulationRun)
class SimulationRunAdmin(admin.ModelAdmin):
    list_display = ['command', 'seed', 'status', 'output_path', 'started_at', 'duration', 'code_version']
    list_filter = ['command', 'status', 'started_at']
    search_fields = ['output_path', 'error_message']
    readonly_fields = ['started_at', 'finished_at', 'duration']
    date_hierarchy = 'started_at'
