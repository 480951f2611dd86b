"""
Covariate tables and the phenotype/covariate join.

Covariates come as CSV with a ``subject_id`` column. Numeric columns enter a
design as-is; text columns are dummy-coded with the first sorted level as the
baseline, so ``treatment`` with levels (budesonide, nedocromil, placebo)
becomes ``treatment[nedocromil]`` and ``treatment[placebo]``.
"""

import logging

import numpy as np
import pandas as pd

from funcscan_platform.errors import DataError, DegenerateFactor, InputFormatError

logger = logging.getLogger(__name__)

SUBJECT_COLUMN = 'subject_id'


def read_covariates(path):
    """DataFrame indexed by subject id (string), columns in file order."""
    try:
        frame = pd.read_csv(path, dtype={SUBJECT_COLUMN: str}, skipinitialspace=True)
    except pd.errors.EmptyDataError as exc:
        raise InputFormatError('file is empty', path=path) from exc
    except pd.errors.ParserError as exc:
        raise InputFormatError(str(exc), path=path) from exc
    if SUBJECT_COLUMN not in frame.columns:
        raise InputFormatError(f'missing {SUBJECT_COLUMN!r} column', path=path, line=1)
    duplicated = frame[SUBJECT_COLUMN].duplicated()
    if duplicated.any():
        row = int(np.flatnonzero(duplicated.to_numpy())[0])
        raise InputFormatError(
            f'duplicate subject {frame[SUBJECT_COLUMN].iloc[row]!r}', path=path, line=row + 2,
        )
    return frame.set_index(SUBJECT_COLUMN)


def factor_levels(values):
    levels = sorted({str(v) for v in values})
    return levels


def dummy_columns(name, values):
    """Baseline-coded indicators {name[level]: column} for every non-baseline level."""
    series = pd.Series([str(v) for v in values])
    levels = factor_levels(series)
    if len(levels) < 2:
        raise DegenerateFactor(f'factor {name!r} has a single level ({levels[0] if levels else "none"})')
    coded = pd.get_dummies(pd.Categorical(series, categories=levels), drop_first=True, dtype=float)
    return {f'{name}[{level}]': coded[level].to_numpy() for level in levels[1:]}


def design_columns(frame, names):
    """Numeric design columns for ``names``, expanding categorical ones."""
    columns = {}
    for name in names:
        if name not in frame.columns:
            raise DataError(f'covariate {name!r} not found; available: {", ".join(map(str, frame.columns))}')
        series = frame[name]
        if pd.api.types.is_numeric_dtype(series) and not pd.api.types.is_bool_dtype(series):
            columns[name] = series.to_numpy(dtype=float)
        else:
            columns.update(dummy_columns(name, series.to_numpy()))
    return columns


def join_subjects(subject_ids, frame, required=(), also_present=None):
    """Rows of ``subject_ids`` with complete covariates (and present in ``also_present``).

    Returns (phenotype row indices, aligned covariate frame). Order follows
    ``subject_ids``; excluded subjects are counted in the log.
    """
    subject_ids = [str(s) for s in subject_ids]
    absent = [name for name in required if name not in frame.columns]
    if absent:
        raise DataError(f'covariates not found: {", ".join(absent)}; available: {", ".join(map(str, frame.columns))}')
    complete = frame.dropna(subset=list(required)) if required else frame
    allowed = set(complete.index)
    if also_present is not None:
        allowed &= {str(s) for s in also_present}
    rows = [i for i, sid in enumerate(subject_ids) if sid in allowed]
    excluded = len(subject_ids) - len(rows)
    if excluded:
        logger.warning(
            'excluding phenotyped subjects without covariates or genotypes',
            extra={'excluded': excluded, 'kept': len(rows)},
        )
    if not rows:
        raise DataError('no subject is present in every input')
    return rows, complete.loc[[subject_ids[i] for i in rows]]
