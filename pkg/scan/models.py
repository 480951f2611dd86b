"""
Stored genome scans.

- ScanRun: one scan invocation (inputs, configuration, status, summary)
  Status flow: pending -> running -> done | failed
- ScanHit: one per-SNP record emitted by the run
"""

import math

from django.db import models

from .engine import STATUSES


class ScanRun(models.Model):
    """A genome scan over one curves/covariates/genotypes input set."""

    STATUS_CHOICES = [
        ('pending', 'Pending'),
        ('running', 'Running'),
        ('done', 'Done'),
        ('failed', 'Failed'),
    ]

    name = models.CharField(
        max_length=200,
        blank=True,
        verbose_name='Name',
        help_text='Optional label shown in the admin and the API',
    )
    curves_path = models.CharField(max_length=500, verbose_name='Curves File')
    covariates_path = models.CharField(max_length=500, verbose_name='Covariates File')
    genotypes_path = models.CharField(max_length=500, verbose_name='Dosage File')
    snp_map_path = models.CharField(max_length=500, verbose_name='SNP Map File')
    output_path = models.CharField(
        max_length=500,
        blank=True,
        verbose_name='Results File',
        help_text='Tab-delimited scan records written by the run',
    )
    config = models.JSONField(
        default=dict,
        blank=True,
        verbose_name='Configuration',
        help_text='ScanConfig fields (maf threshold, adjust columns, missing policy, ...)',
    )
    status = models.CharField(
        max_length=20,
        choices=STATUS_CHOICES,
        default='pending',
        verbose_name='Status',
    )
    snp_count = models.PositiveIntegerField(default=0, verbose_name='SNPs')
    tested_count = models.PositiveIntegerField(default=0, verbose_name='Tested SNPs')
    min_p_value = models.FloatField(null=True, blank=True, verbose_name='Smallest p-value')
    error_message = models.TextField(blank=True, verbose_name='Error')
    created_at = models.DateTimeField(auto_now_add=True)
    started_at = models.DateTimeField(null=True, blank=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        verbose_name = 'Scan Run'
        verbose_name_plural = 'Scan Runs'
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['status', 'created_at'], name='scan_run_status_idx'),
        ]

    def __str__(self):
        return f"Scan {self.pk} ({self.name or self.curves_path}) - {self.status}"

    @property
    def skipped_count(self):
        return self.snp_count - self.tested_count


class ScanHit(models.Model):
    """One SNP's scan record."""

    STATUS_CHOICES = [(status, status.replace('_', ' ').capitalize()) for status in STATUSES]
    NULL_SPECTRUM_CHOICES = [
        ('per_snp', 'Per SNP'),
        ('shared', 'Shared'),
    ]

    run = models.ForeignKey(
        ScanRun,
        on_delete=models.CASCADE,
        related_name='hits',
        verbose_name='Scan Run',
    )
    snp_id = models.CharField(max_length=100, verbose_name='SNP')
    chromosome = models.CharField(max_length=20, verbose_name='Chromosome')
    position = models.BigIntegerField(verbose_name='Position')
    maf = models.FloatField(
        null=True,
        blank=True,
        verbose_name='MAF',
        help_text='Minor allele frequency on the analysed subjects (empty if no call)',
    )
    n_used = models.PositiveIntegerField(verbose_name='Subjects Used')
    statistic = models.FloatField(verbose_name='Lambda')
    p_value = models.FloatField(verbose_name='p-value')
    truncation_i = models.PositiveIntegerField(
        default=0,
        verbose_name='Null Terms',
        help_text='Eigenvalues kept in the weighted chi-square null',
    )
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, verbose_name='Status')
    null_spectrum = models.CharField(
        max_length=10,
        choices=NULL_SPECTRUM_CHOICES,
        default='per_snp',
        verbose_name='Null Spectrum',
    )

    class Meta:
        verbose_name = 'Scan Hit'
        verbose_name_plural = 'Scan Hits'
        ordering = ['p_value', 'id']
        indexes = [
            models.Index(fields=['run', 'p_value'], name='scan_hit_run_p_idx'),
            models.Index(fields=['run', 'status'], name='scan_hit_run_status_idx'),
            models.Index(fields=['snp_id'], name='scan_hit_snp_idx'),
        ]

    def __str__(self):
        return f"{self.snp_id} p={self.p_value:.3e} ({self.status})"

    @classmethod
    def from_record(cls, run, record):
        maf = None if math.isnan(record.maf) else record.maf
        return cls(
            run=run,
            snp_id=record.snp_id,
            chromosome=record.chromosome,
            position=record.position,
            maf=maf,
            n_used=record.n_used,
            statistic=record.statistic,
            p_value=record.p_value,
            truncation_i=record.truncation_I,
            status=record.status,
            null_spectrum=record.null_spectrum,
        )
