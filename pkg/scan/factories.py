"""
Factory Boy factories for scan models.
"""

import factory

from .models import ScanHit, ScanRun


class ScanRunFactory(factory.django.DjangoModelFactory):
    class Meta:
        model = ScanRun

    name = factory.Sequence(lambda n: f'scan {n}')
    curves_path = 'curves.tsv'
    covariates_path = 'covar.csv'
    genotypes_path = 'geno.tsv'
    snp_map_path = 'snps.tsv'
    config = factory.LazyFunction(lambda: {'maf_threshold': 0.05, 'adjust': ['age']})
    status = 'done'


class ScanHitFactory(factory.django.DjangoModelFactory):
    class Meta:
        model = ScanHit

    run = factory.SubFactory(ScanRunFactory)
    snp_id = factory.Sequence(lambda n: f'rs{1000 + n}')
    chromosome = '1'
    position = factory.Sequence(lambda n: 10_000 + 500 * n)
    maf = 0.3
    n_used = 100
    statistic = 1.5
    p_value = 0.2
    truncation_i = 8
    status = 'ok'
