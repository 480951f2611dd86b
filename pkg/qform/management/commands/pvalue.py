"""
Tail probability of a statistic under a weighted chi-square null.

Usage:
    funcscan pvalue --weights eigenvalues.txt --statistic 12.5
    funcscan pvalue --weights eigenvalues.txt --statistic 12.5 --df 2 --mc-reps 1000000 --seed 7
"""

import numpy as np

from funcscan_platform.commands import FuncScanCommand
from funcscan_platform.errors import InputFormatError
from qform.imhof import WeightedChiSq, imhof_survival, mc_survival, truncate_spectrum


def read_weights(path):
    values = []
    with open(path, encoding='utf-8') as handle:
        for line_number, line in enumerate(handle, start=1):
            text = line.split('#', 1)[0].strip()
            if not text:
                continue
            for token in text.replace(',', ' ').split():
                try:
                    values.append(float(token))
                except ValueError:
                    raise InputFormatError(f'not a number: {token!r}', path=path, line=line_number) from None
    if not values:
        raise InputFormatError('no weights found', path=path)
    return np.array(values)


class Command(FuncScanCommand):
    help = 'Evaluate P(sum lambda_i chi2_i(K) > x) for a weights file and a statistic.'

    def add_arguments(self, parser):
        parser.add_argument('--weights', required=True, help='Text file of weights (whitespace, comma or newline separated).')
        parser.add_argument('--statistic', type=float, required=True, help='Observed statistic x.')
        parser.add_argument('--df', type=int, default=1, help='Degrees of freedom per term (default: 1).')
        parser.add_argument(
            '--truncate',
            action='store_true',
            help='Apply the test truncation policy (trace fraction / term cap) to the weights first.',
        )
        parser.add_argument(
            '--mc-reps',
            type=int,
            default=0,
            help='Also report a Monte Carlo estimate from this many draws (default: off).',
        )
        self.add_seed_argument(parser)

    def run(self, **options):
        weights = read_weights(options['weights'])
        if options['truncate']:
            weights = truncate_spectrum(weights)
        dist = WeightedChiSq(weights, options['df'])
        result = imhof_survival(dist, options['statistic'])

        self.stdout.write(f'p_value\t{result.probability:.6e}')
        self.stdout.write(f'error_bound\t{result.error_bound:.3e}')
        self.stdout.write(f'method\t{result.method}')
        self.stdout.write(f'terms\t{dist.terms}')
        if options['mc_reps']:
            estimate = mc_survival(dist, options['statistic'], options['mc_reps'], options['seed'])
            self.stdout.write(f'mc_p_value\t{estimate:.6e}')
        if not result.converged:
            self.stderr.write(self.style.WARNING('Requested accuracy not reached; see error_bound.'))
