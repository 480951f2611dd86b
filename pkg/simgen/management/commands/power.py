"""
Power of L2, PC, PC5 and MV over signals and sampling densities.

Usage:
    funcscan power --signals normcdf,sinusoid --m 5,10,20,50 --reps 1000 --out power.tsv --plot power.png
    funcscan power --signals sinusoid --m 10 --reps 50 --r2-profile r2.tsv --profile-n 10000
"""

import pandas as pd

from funcscan_platform.commands import FuncScanCommand, csv_list, int_list
from funcscan_platform.errors import DataError
from simgen.matern import MaternSpec
from simgen.power import (
    SAMPLING_SIZES,
    PowerScenario,
    plot_power_table,
    r2_profile,
    run_power_study,
    theoretical_r2_profile,
    write_power_table,
)


class Command(FuncScanCommand):
    help = 'Run the simulated power comparison and write a delimited power table.'

    def add_arguments(self, parser):
        parser.add_argument('--out', required=True, help='Power table (tab-delimited).')
        parser.add_argument('--signals', type=csv_list, default=['normcdf'], help='Comma-separated effect curves.')
        parser.add_argument('--m', type=int_list, default=list(SAMPLING_SIZES),
                            help='Comma-separated points per curve (default: 5,10,20,50).')
        parser.add_argument('--n', type=int, default=200, help='Subjects per replicate (default: 200).')
        parser.add_argument('--reps', type=int, default=1000, help='Replicates per scenario (default: 1000).')
        parser.add_argument('--alpha', type=float, default=0.05, help='Test level (default: 0.05).')
        parser.add_argument('--nu', type=float, default=2.5, help='Matérn smoothness: 0.5, 1.5 or 2.5.')
        parser.add_argument('--threads', type=int, default=None, help='Worker threads (default: FUNCSCAN_SCAN_THREADS).')
        parser.add_argument('--plot', default=None, help='Also draw power against M into this image file.')
        parser.add_argument('--r2-profile', default=None, help='Write per-PC R2 profiles for each signal here.')
        parser.add_argument('--profile-n', type=int, default=10_000, help='Subjects for the R2 profile (default: 10000).')
        parser.add_argument('--profile-reps', type=int, default=20, help='Replicates for the R2 profile (default: 20).')
        self.add_seed_argument(parser)

    def run(self, **options):
        if not options['signals'] or not options['m']:
            raise DataError('need at least one signal and one value of M')
        error = MaternSpec(nu=options['nu'])
        tables = []
        for signal in options['signals']:
            for m in options['m']:
                scenario = PowerScenario(
                    signal=signal, n=options['n'], m=m, reps=options['reps'], alpha=options['alpha'],
                    seed=options['seed'], error=error, threads=options['threads'],
                )
                table = run_power_study(scenario)
                tables.append(table)
                summary = ', '.join(f'{row.method}={row.power:.3f}' for row in table.itertuples())
                self.stdout.write(f'{signal} M={m}: {summary}')
        power = pd.concat(tables, ignore_index=True)
        write_power_table(options['out'], power)
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(power)} rows to {options["out"]}.'))
        if options['plot']:
            plot_power_table(options['plot'], power)
            self.stdout.write(f'Plot written to {options["plot"]}')
        if options['r2_profile']:
            self._write_profiles(options, error)

    def _write_profiles(self, options, error):
        profiles = []
        for signal in options['signals']:
            scenario = PowerScenario(
                signal=signal, n=options['profile_n'], reps=options['profile_reps'], seed=options['seed'],
                error=error, threads=options['threads'],
            )
            profile = r2_profile(scenario)
            profile['theoretical'] = theoretical_r2_profile(
                signal, error, components=len(profile), second_moment=2 * scenario.maf * (1 - scenario.maf),
            )
            profiles.append(profile)
        pd.concat(profiles, ignore_index=True).to_csv(
            options['r2_profile'], sep='\t', index=False, float_format='%.6g',
        )
        self.stdout.write(f'R2 profiles written to {options["r2_profile"]}')
