"""
Admin configuration for stored genome scans.
"""

from django.contrib import admin

from .models import ScanHit, ScanRun


class ScanHitInline(admin.TabularInline):
    model = ScanHit
    extra = 0
    fields = ('snp_id', 'chromosome', 'position', 'maf', 'statistic', 'p_value', 'status')
    readonly_fields = fields
    ordering = ('p_value',)
    max_num = 0
    show_change_link = True

    def get_queryset(self, request):
        return super().get_queryset(request).filter(status='ok')


@admin.register(ScanRun)
class ScanRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'name', 'status', 'snp_count', 'tested_count', 'min_p_value', 'created_at')
    list_filter = ('status', 'created_at')
    search_fields = ('name', 'curves_path', 'genotypes_path')
    readonly_fields = ('created_at', 'started_at', 'finished_at', 'snp_count', 'tested_count', 'min_p_value')
    date_hierarchy = 'created_at'
    inlines = [ScanHitInline]

    fieldsets = (
        ('Inputs', {
            'fields': ('name', 'curves_path', 'covariates_path', 'genotypes_path', 'snp_map_path', 'config')
        }),
        ('Outcome', {
            'fields': ('status', 'output_path', 'snp_count', 'tested_count', 'min_p_value', 'error_message')
        }),
        ('Timestamps', {
            'fields': ('created_at', 'started_at', 'finished_at')
        }),
    )


@admin.register(ScanHit)
class ScanHitAdmin(admin.ModelAdmin):
    """Admin interface for per-SNP scan records."""
    list_display = ('snp_id', 'run', 'chromosome', 'position', 'maf', 'statistic', 'p_value', 'status')
    list_filter = ('status', 'null_spectrum', 'chromosome')
    search_fields = ('snp_id',)
    readonly_fields = ('run',)
