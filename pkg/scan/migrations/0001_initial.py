# Generated by Django 4.2.26 on 2026-10-12 09:41

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="ScanRun",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "name",
                    models.CharField(
                        blank=True,
                        help_text="Optional label shown in the admin and the API",
                        max_length=200,
                        verbose_name="Name",
                    ),
                ),
                ("curves_path", models.CharField(max_length=500, verbose_name="Curves File")),
                ("covariates_path", models.CharField(max_length=500, verbose_name="Covariates File")),
                ("genotypes_path", models.CharField(max_length=500, verbose_name="Dosage File")),
                ("snp_map_path", models.CharField(max_length=500, verbose_name="SNP Map File")),
                (
                    "output_path",
                    models.CharField(
                        blank=True,
                        help_text="Tab-delimited scan records written by the run",
                        max_length=500,
                        verbose_name="Results File",
                    ),
                ),
                (
                    "config",
                    models.JSONField(
                        blank=True,
                        default=dict,
                        help_text="ScanConfig fields (maf threshold, adjust columns, missing policy, ...)",
                        verbose_name="Configuration",
                    ),
                ),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("pending", "Pending"),
                            ("running", "Running"),
                            ("done", "Done"),
                            ("failed", "Failed"),
                        ],
                        default="pending",
                        max_length=20,
                        verbose_name="Status",
                    ),
                ),
                ("snp_count", models.PositiveIntegerField(default=0, verbose_name="SNPs")),
                ("tested_count", models.PositiveIntegerField(default=0, verbose_name="Tested SNPs")),
                ("min_p_value", models.FloatField(blank=True, null=True, verbose_name="Smallest p-value")),
                ("error_message", models.TextField(blank=True, verbose_name="Error")),
                ("created_at", models.DateTimeField(auto_now_add=True)),
                ("started_at", models.DateTimeField(blank=True, null=True)),
                ("finished_at", models.DateTimeField(blank=True, null=True)),
            ],
            options={
                "verbose_name": "Scan Run",
                "verbose_name_plural": "Scan Runs",
                "ordering": ["-created_at"],
                "indexes": [
                    models.Index(fields=["status", "created_at"], name="scan_run_status_idx"),
                ],
            },
        ),
        migrations.CreateModel(
            name="ScanHit",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("snp_id", models.CharField(max_length=100, verbose_name="SNP")),
                ("chromosome", models.CharField(max_length=20, verbose_name="Chromosome")),
                ("position", models.BigIntegerField(verbose_name="Position")),
                (
                    "maf",
                    models.FloatField(
                        blank=True,
                        help_text="Minor allele frequency on the analysed subjects (empty if no call)",
                        null=True,
                        verbose_name="MAF",
                    ),
                ),
                ("n_used", models.PositiveIntegerField(verbose_name="Subjects Used")),
                ("statistic", models.FloatField(verbose_name="Lambda")),
                ("p_value", models.FloatField(verbose_name="p-value")),
                (
                    "truncation_i",
                    models.PositiveIntegerField(
                        default=0,
                        help_text="Eigenvalues kept in the weighted chi-square null",
                        verbose_name="Null Terms",
                    ),
                ),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("ok", "Ok"),
                            ("skipped_maf", "Skipped maf"),
                            ("skipped_rank", "Skipped rank"),
                            ("skipped_missing", "Skipped missing"),
                        ],
                        max_length=20,
                        verbose_name="Status",
                    ),
                ),
                (
                    "null_spectrum",
                    models.CharField(
                        choices=[("per_snp", "Per SNP"), ("shared", "Shared")],
                        default="per_snp",
                        max_length=10,
                        verbose_name="Null Spectrum",
                    ),
                ),
                (
                    "run",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="hits",
                        to="scan.scanrun",
                        verbose_name="Scan Run",
                    ),
                ),
            ],
            options={
                "verbose_name": "Scan Hit",
                "verbose_name_plural": "Scan Hits",
                "ordering": ["p_value", "id"],
                "indexes": [
                    models.Index(fields=["run", "p_value"], name="scan_hit_run_p_idx"),
                    models.Index(fields=["run", "status"], name="scan_hit_run_status_idx"),
                    models.Index(fields=["snp_id"], name="scan_hit_snp_idx"),
                ],
            },
        ),
    ]
