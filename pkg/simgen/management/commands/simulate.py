"""
Write one simulated replicate as input files for ``smooth`` and ``test``.

Usage:
    funcscan simulate --out-dir sim/ --signal normcdf --n 200 --m 10 --seed 3
"""

from pathlib import Path

from funcscan_platform.commands import FuncScanCommand
from simgen.matern import MaternSpec
from simgen.power import PowerScenario, simulation_frames
from simgen.signals import SIGNAL_KINDS


class Command(FuncScanCommand):
    help = 'Simulate Matérn curves sampled on [1/M, 1] with a SNP effect and write pheno.csv and covar.csv.'

    def add_arguments(self, parser):
        parser.add_argument('--out-dir', required=True, help='Directory for pheno.csv and covar.csv.')
        parser.add_argument('--signal', default='normcdf', choices=SIGNAL_KINDS, help='Effect curve (default: normcdf).')
        parser.add_argument('--n', type=int, default=200, help='Subjects (default: 200).')
        parser.add_argument('--m', type=int, default=10, help='Observed points per curve (default: 10).')
        parser.add_argument('--maf', type=float, default=0.5, help='SNP minor allele frequency (default: 0.5).')
        parser.add_argument('--effect-scale', type=float, default=1.0, help='Multiplier on the effect curve.')
        parser.add_argument('--nu', type=float, default=2.5, help='Matérn smoothness: 0.5, 1.5 or 2.5.')
        parser.add_argument('--replicate', type=int, default=0, help='Replicate index within the seed.')
        self.add_seed_argument(parser)

    def run(self, **options):
        scenario = PowerScenario(
            signal=options['signal'], n=options['n'], m=options['m'], reps=1, seed=options['seed'],
            maf=options['maf'], effect_scale=options['effect_scale'], error=MaternSpec(nu=options['nu']),
        )
        observations, covariates = simulation_frames(scenario, options['replicate'])
        directory = Path(options['out_dir'])
        directory.mkdir(parents=True, exist_ok=True)
        observations.to_csv(directory / 'pheno.csv', index=False, float_format='%.17g')
        covariates.to_csv(directory / 'covar.csv', index=False, float_format='%.17g')
        self.stdout.write(self.style.SUCCESS(
            f'Simulated {scenario.n} subjects x {scenario.m} points ({scenario.signal}) into {directory}.'
        ))
