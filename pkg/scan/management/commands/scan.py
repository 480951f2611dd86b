"""
Genome scan: one Lambda test per SNP against smoothed phenotype curves.

Usage:
    funcscan scan --curves curves.tsv --covar covar.csv --geno geno.tsv --map snps.tsv \
        --maf 0.05 --adjust age,gender,treatment --threads 4 --out results.tsv
    funcscan scan ... --manhattan results --plots
    funcscan scan ... --save-run --async
"""

from funcscan_platform.commands import FuncScanCommand, csv_list
from scan.engine import MISSING_MEAN_IMPUTE, MISSING_POLICIES, ScanConfig, write_scan_records
from scan.export import qq_manhattan_export
from scan.models import ScanRun
from scan.services import execute_run, scan_files
from scan.tasks import run_scan_task


class Command(FuncScanCommand):
    help = 'Test every SNP for association with the phenotype curves, adjusting for covariates.'

    def add_arguments(self, parser):
        parser.add_argument('--curves', required=True, help='Curve matrix written by "funcscan smooth".')
        parser.add_argument('--covar', required=True, help='Covariate CSV with a subject_id column.')
        parser.add_argument('--geno', required=True, help='Tab-delimited dosage matrix (SNPs x subjects).')
        parser.add_argument('--map', required=True, help='SNP map with snp_id, chromosome, position.')
        parser.add_argument('--out', required=True, help='Results table (tab-delimited).')
        parser.add_argument('--maf', type=float, default=0.05, help='Minimum minor allele frequency (default: 0.05).')
        parser.add_argument('--adjust', type=csv_list, default=[], help='Comma-separated adjust covariates.')
        parser.add_argument('--interaction', default=None,
                            help='Test SNP x this factor instead of the SNP main effect.')
        parser.add_argument('--missing', choices=MISSING_POLICIES, default=MISSING_MEAN_IMPUTE,
                            help='Missing dosage handling (default: mean_impute).')
        parser.add_argument('--threads', type=int, default=None, help='Worker threads (default: FUNCSCAN_SCAN_THREADS).')
        parser.add_argument('--chunk-size', type=int, default=None, help='SNPs per work unit.')
        parser.add_argument('--shared-null-spectrum', action='store_true',
                            help='Reuse the covariates-only residual spectrum for every SNP.')
        parser.add_argument('--manhattan', metavar='PREFIX', default=None,
                            help='Also write PREFIX.manhattan.tsv and PREFIX.qq.tsv.')
        parser.add_argument('--plots', action='store_true', help='Render Manhattan and QQ plots next to the tables.')
        parser.add_argument('--save-run', action='store_true', help='Record the run and its hits in the database.')
        parser.add_argument('--name', default='', help='Label for a saved run.')
        parser.add_argument('--async', dest='run_async', action='store_true',
                            help='Queue the scan on the Celery worker (implies --save-run).')
        self.add_seed_argument(parser)

    def run(self, **options):
        cfg = ScanConfig(
            maf_threshold=options['maf'],
            missing_policy=options['missing'],
            adjust=tuple(options['adjust']),
            interaction=options['interaction'],
            threads=options['threads'],
            chunk_size=options['chunk_size'],
            shared_null_spectrum=options['shared_null_spectrum'],
            output=options['out'],
            seed=options['seed'],
        )
        paths = (options['curves'], options['covar'], options['geno'], options['map'])

        if options['save_run'] or options['run_async']:
            run = ScanRun.objects.create(
                name=options['name'],
                curves_path=paths[0],
                covariates_path=paths[1],
                genotypes_path=paths[2],
                snp_map_path=paths[3],
                output_path=options['out'],
                config=cfg.as_dict(),
            )
            if options['run_async']:
                run_scan_task.delay(run.pk)
                self.stdout.write(self.style.SUCCESS(f'Queued scan run {run.pk}.'))
                return
            records = execute_run(run)
            self.stdout.write(f'Saved scan run {run.pk}.')
        else:
            records = list(scan_files(*paths, cfg))
            write_scan_records(options['out'], records)

        tested = [r for r in records if r.is_ok]
        self.stdout.write(self.style.SUCCESS(
            f'Scanned {len(records)} SNPs: {len(tested)} tested, {len(records) - len(tested)} skipped.'
        ))
        if tested:
            best = min(tested, key=lambda r: r.p_value)
            self.stdout.write(f'Smallest p-value {best.p_value:.3e} at {best.snp_id} '
                              f'(chromosome {best.chromosome}, position {best.position}).')
        if options['manhattan']:
            for path in qq_manhattan_export(records, options['manhattan'], plots=options['plots']):
                self.stdout.write(f'Wrote {path}')
