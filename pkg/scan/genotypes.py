"""
Genotype dosage tables.

Dosage file (tab-delimited): header ``snp_id`` followed by subject ids, then
one row per SNP with dosages in [0, 2]; ``NA``, ``.`` or an empty field mark a
missing call. The SNP map (tab-delimited, header
``snp_id chromosome position``) supplies the genomic coordinates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from funcscan_platform.errors import DataError, InputFormatError

logger = logging.getLogger(__name__)

MISSING_TOKENS = ('NA', '.', '')
MAP_COLUMNS = ('snp_id', 'chromosome', 'position')


@dataclass(frozen=True, eq=False)
class GenotypeTable:
    snp_ids: tuple
    chromosomes: tuple
    positions: np.ndarray
    subject_ids: tuple
    dosages: np.ndarray   # SNPs x subjects, NaN where missing

    def __post_init__(self):
        dosages = np.asarray(self.dosages, dtype=float)
        if dosages.ndim != 2 or dosages.shape != (len(self.snp_ids), len(self.subject_ids)):
            raise DataError('dosage matrix must be SNPs x subjects')
        if len(self.chromosomes) != len(self.snp_ids) or len(self.positions) != len(self.snp_ids):
            raise DataError('every SNP needs a chromosome and a position')
        observed = dosages[~np.isnan(dosages)]
        if np.any(observed < 0) or np.any(observed > 2):
            raise DataError('dosages must lie in [0, 2]')
        dosages.setflags(write=False)
        object.__setattr__(self, 'dosages', dosages)
        object.__setattr__(self, 'positions', np.asarray(self.positions, dtype=np.int64))

    def __len__(self):
        return len(self.snp_ids)

    def missing_fraction(self):
        return np.isnan(self.dosages).mean(axis=1)

    def allele_frequencies(self, columns=None):
        """Alternate-allele frequency per SNP over the given subject columns (missing ignored)."""
        values = self.dosages if columns is None else self.dosages[:, columns]
        with np.errstate(invalid='ignore'):
            return np.nanmean(values, axis=1) / 2.0

    def slice(self, start, stop):
        return GenotypeTable(
            self.snp_ids[start:stop], self.chromosomes[start:stop], self.positions[start:stop],
            self.subject_ids, self.dosages[start:stop],
        )

    def chunks(self, size):
        for start in range(0, len(self), size):
            yield self.slice(start, start + size)


def minor_allele_frequency(frequency):
    return np.minimum(frequency, 1.0 - frequency)


def read_snp_map(path):
    try:
        frame = pd.read_csv(path, sep='\t', dtype={'snp_id': str, 'chromosome': str})
    except pd.errors.EmptyDataError as exc:
        raise InputFormatError('file is empty', path=path) from exc
    missing = [c for c in MAP_COLUMNS if c not in frame.columns]
    if missing:
        raise InputFormatError(f'missing columns: {", ".join(missing)}', path=path, line=1)
    positions = pd.to_numeric(frame['position'], errors='coerce')
    if positions.isna().any():
        row = int(np.flatnonzero(positions.isna().to_numpy())[0])
        raise InputFormatError(f'invalid position {frame["position"].iloc[row]!r}', path=path, line=row + 2)
    if frame['snp_id'].duplicated().any():
        row = int(np.flatnonzero(frame['snp_id'].duplicated().to_numpy())[0])
        raise InputFormatError(f'duplicate SNP {frame["snp_id"].iloc[row]!r}', path=path, line=row + 2)
    frame['position'] = positions.astype(np.int64)
    return frame.set_index('snp_id')


def _parse_chunk(raw, snp_map, path, first_line):
    snp_ids = raw.iloc[:, 0].astype(str).tolist()
    values = raw.iloc[:, 1:]
    numeric = values.apply(pd.to_numeric, errors='coerce')
    bad = numeric.isna().to_numpy() & values.notna().to_numpy()
    if bad.any():
        row, column = (int(v[0]) for v in np.nonzero(bad))
        raise InputFormatError(
            f'invalid dosage {values.iat[row, column]!r} for SNP {snp_ids[row]}', path=path, line=first_line + row,
        )
    unknown = [s for s in snp_ids if s not in snp_map.index]
    if unknown:
        row = snp_ids.index(unknown[0])
        raise InputFormatError(f'SNP {unknown[0]!r} is not in the SNP map', path=path, line=first_line + row)
    coordinates = snp_map.loc[snp_ids]
    return GenotypeTable(
        snp_ids=tuple(snp_ids),
        chromosomes=tuple(coordinates['chromosome'].astype(str)),
        positions=coordinates['position'].to_numpy(),
        subject_ids=tuple(str(c) for c in raw.columns[1:]),
        dosages=numeric.to_numpy(dtype=float),
    )


def iter_genotype_chunks(dosage_path, map_path, chunk_size=256):
    """Stream the dosage file as GenotypeTable chunks of at most ``chunk_size`` SNPs."""
    snp_map = read_snp_map(map_path)
    try:
        reader = pd.read_csv(
            dosage_path, sep='\t', dtype=str, keep_default_na=False,
            na_values=list(MISSING_TOKENS), chunksize=int(chunk_size),
        )
        first_line = 2
        for raw in reader:
            if raw.shape[1] < 2:
                raise InputFormatError('dosage file has no subject columns', path=dosage_path, line=1)
            yield _parse_chunk(raw, snp_map, dosage_path, first_line)
            first_line += len(raw)
    except pd.errors.EmptyDataError as exc:
        raise InputFormatError('file is empty', path=dosage_path) from exc
    except pd.errors.ParserError as exc:
        raise InputFormatError(str(exc), path=dosage_path) from exc


def read_genotypes(dosage_path, map_path):
    chunks = list(iter_genotype_chunks(dosage_path, map_path, chunk_size=4096))
    if not chunks:
        raise InputFormatError('no SNPs found', path=dosage_path)
    return GenotypeTable(
        snp_ids=sum((c.snp_ids for c in chunks), ()),
        chromosomes=sum((c.chromosomes for c in chunks), ()),
        positions=np.concatenate([c.positions for c in chunks]),
        subject_ids=chunks[0].subject_ids,
        dosages=np.vstack([c.dosages for c in chunks]),
    )


def write_genotypes(dosage_path, map_path, table):
    """Write a GenotypeTable in the dosage + map layout read above."""
    dosages = pd.DataFrame(table.dosages, columns=list(table.subject_ids))
    dosages.insert(0, 'snp_id', list(table.snp_ids))
    dosages.to_csv(dosage_path, sep='\t', index=False, na_rep=MISSING_TOKENS[0], float_format='%.6g')
    snp_map = pd.DataFrame({
        'snp_id': list(table.snp_ids),
        'chromosome': list(table.chromosomes),
        'position': np.asarray(table.positions, dtype=np.int64),
    })
    snp_map.to_csv(map_path, sep='\t', index=False, columns=list(MAP_COLUMNS))
