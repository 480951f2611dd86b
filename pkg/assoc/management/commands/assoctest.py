"""
Association test of selected covariate columns against the phenotype curves.

Exposed as ``funcscan test`` (the ``test`` name stays with Django's runner).

Usage:
    funcscan test --curves curves.tsv --covar covar.csv --test snp --adjust age,gender
    funcscan test --curves curves.tsv --covar covar.csv --test snp --method PCfixed --components 5
    funcscan test --curves curves.tsv --covar covar.csv --test snp --method weighted --weights 1,1,0.5
    funcscan test --curves curves.tsv --covar covar.csv --test snp --adjust age --interaction treatment \
        --bands bands.tsv
"""

import numpy as np

from assoc.statistics import (
    ADAPTIVE_COMPONENTS,
    Method,
    WeightRule,
    endpoint_test,
    lambda_test,
    mv_test,
    pc_adaptive_test,
    pc_test,
    weighted_test,
)
from flm.design import DesignMatrix
from funcscan_platform.commands import FuncScanCommand, csv_list, int_list
from funcscan_platform.errors import DataError
from scan.covariates import design_columns, join_subjects, read_covariates
from scan.engine import ScanConfig, interaction_test
from scan.export import write_interaction_bands
from smoothing.io import read_curves
from smoothing.pipeline import TimeScale

METHODS = {
    'l2': Method.L2,
    'pc': Method.PC,
    'pcfixed': Method.PC_FIXED,
    'weighted': Method.WEIGHTED,
    'mv': Method.MV,
    'endpoint': Method.ENDPOINT,
}
DIAGNOSTIC_COMPONENTS = 10


def method_name(value):
    try:
        return METHODS[value.lower()]
    except KeyError:
        raise DataError(f'unknown method {value!r}; choose from L2, PC, PCfixed, weighted, MV, ENDPOINT') from None


def weight_rule(value):
    if value.strip().lower() == WeightRule.EIGENVALUE:
        return WeightRule.eigenvalue()
    return WeightRule.explicit([float(v) for v in csv_list(value)])


class Command(FuncScanCommand):
    help = 'Test covariate columns for association with the phenotype curves.'

    def add_arguments(self, parser):
        parser.add_argument('--curves', required=True, help='Curve matrix written by "funcscan smooth".')
        parser.add_argument('--covar', required=True, help='Covariate CSV with a subject_id column.')
        parser.add_argument('--test', type=csv_list, required=True, help='Comma-separated columns to test.')
        parser.add_argument('--adjust', type=csv_list, default=[], help='Comma-separated adjust columns.')
        parser.add_argument('--method', default='L2', help='L2, PC, PCfixed, weighted, MV or ENDPOINT (default: L2).')
        parser.add_argument('--components', type=int_list, default=None,
                            help='PC counts: one for PCfixed or an indicator weight rule, candidates for PC.')
        parser.add_argument('--weights', default=None,
                            help='"eigenvalue" or comma-separated nonnegative weights (weighted method).')
        parser.add_argument('--points', default=None,
                            help='Raw observed points in curve-matrix layout (required for MV).')
        parser.add_argument('--interaction', default=None,
                            help='Test the single --test column x this factor (L2 only).')
        parser.add_argument('--bands', default=None, help='With --interaction, write coefficient bands here.')

    def run(self, **options):
        curves, subject_ids, metadata = read_curves(options['curves'])
        covariates = read_covariates(options['covar'])
        method = method_name(options['method'])
        required = [*options['adjust'], *options['test']]
        if options['interaction']:
            required.append(options['interaction'])
        rows, aligned = join_subjects(subject_ids, covariates, required=required)
        curves = curves.subset(rows)

        if options['interaction']:
            result = self._interaction(curves, aligned, options, metadata)
        else:
            design = DesignMatrix.build(
                adjust=design_columns(aligned, options['adjust']),
                test=design_columns(aligned, options['test']),
            )
            result = self._dispatch(method, curves, design, [subject_ids[i] for i in rows], options)

        self.stdout.write(f'method\t{result.method.value}')
        self.stdout.write(f'statistic\t{result.statistic:.10g}')
        self.stdout.write(f'p_value\t{result.p_value:.6e}')
        self.stdout.write(f'df_per_term\t{result.df_per_term}')
        self.stdout.write(f'truncation_I\t{result.truncation_I}')
        self.stdout.write(f'subjects\t{len(curves)}')
        if result.error_bound:
            self.stdout.write(f'error_bound\t{result.error_bound:.3e}')
        if result.diagnostics is not None:
            r2 = result.diagnostics.r_squared[:DIAGNOSTIC_COMPONENTS]
            self.stdout.write('r_squared\t' + ','.join(f'{v:.6g}' for v in r2))
        if not result.converged:
            self.stderr.write(self.style.WARNING('Requested p-value accuracy not reached; see error_bound.'))

    def _dispatch(self, method, curves, design, subject_ids, options):
        components = options['components']
        if method is Method.L2:
            return lambda_test(curves, design)
        if method is Method.PC:
            return pc_adaptive_test(curves, design, tuple(components or ADAPTIVE_COMPONENTS))
        if method is Method.PC_FIXED:
            return pc_test(curves, design, components[0] if components else 5)
        if method is Method.WEIGHTED:
            if options['weights']:
                rule = weight_rule(options['weights'])
            elif components:
                rule = WeightRule.indicator(components[0])
            else:
                rule = WeightRule.eigenvalue()
            return weighted_test(curves, design, rule)
        if method is Method.MV:
            return mv_test(self._points(options['points'], subject_ids), design)
        return endpoint_test(curves, design)

    def _points(self, path, subject_ids):
        if path is None:
            raise DataError('MV needs --points (raw observed values)')
        points, point_ids, _ = read_curves(path)
        position = {sid: i for i, sid in enumerate(point_ids)}
        missing = [sid for sid in subject_ids if sid not in position]
        if missing:
            raise DataError(f'{len(missing)} subjects have no raw points (first: {missing[0]})')
        return np.array([points.values[position[sid]] for sid in subject_ids])

    def _interaction(self, curves, aligned, options, metadata):
        if len(options['test']) != 1:
            raise DataError('--interaction takes exactly one --test column')
        cfg = ScanConfig(adjust=tuple(options['adjust']), interaction=options['interaction'])
        column = design_columns(aligned, options['test'])
        if len(column) != 1:
            raise DataError('the interaction test column must be numeric')
        (snp,) = column.values()
        result = interaction_test(
            (curves, tuple(aligned.index)), aligned, snp, aligned[options['interaction']].to_numpy(), cfg,
        )
        if options['bands']:
            scale = metadata.get('time_scale')
            write_interaction_bands(options['bands'], result.extra['bands'], TimeScale(**scale) if scale else None)
            self.stdout.write(f'bands\t{options["bands"]}')
        return result
