"""
Readers and writers for longitudinal and curve files.

Long format (comma-delimited, header required)::

    subject_id,time,value
    s001,5.2,2.31

Curve matrix (tab-delimited): the first row is ``grid`` followed by the grid
points, then one row per subject (id followed by values). A JSON sidecar
``<path>.json`` carries the smoothing metadata.
"""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from fnspace.grids import CurveSet, TimeGrid
from funcscan_platform.errors import InputFormatError

from .pipeline import LongitudinalRecord, TimeScale

logger = logging.getLogger(__name__)

LONG_COLUMNS = ('subject_id', 'time', 'value')
GRID_LABEL = 'grid'
CURVE_FLOAT_FORMAT = '%.17g'


def read_long_format(path, *, rescale=True):
    """Return (records, TimeScale); times are mapped onto [0, 1] when ``rescale`` is set."""
    try:
        frame = pd.read_csv(path, dtype={'subject_id': str}, skipinitialspace=True)
    except pd.errors.ParserError as exc:
        raise InputFormatError(str(exc), path=path) from exc
    except pd.errors.EmptyDataError as exc:
        raise InputFormatError('file is empty', path=path) from exc
    missing = [c for c in LONG_COLUMNS if c not in frame.columns]
    if missing:
        raise InputFormatError(f'missing columns: {", ".join(missing)}', path=path, line=1)
    if frame.empty:
        raise InputFormatError('no observations', path=path)
    for column in ('time', 'value'):
        numeric = pd.to_numeric(frame[column], errors='coerce')
        bad = np.flatnonzero(~np.isfinite(numeric.to_numpy(dtype=float)))
        if bad.size:
            row = int(bad[0])
            raise InputFormatError(
                f'{column} is not a finite number: {frame[column].iloc[row]!r}', path=path, line=row + 2,
            )
        frame[column] = numeric
    if frame['subject_id'].isna().any():
        row = int(np.flatnonzero(frame['subject_id'].isna().to_numpy())[0])
        raise InputFormatError('missing subject_id', path=path, line=row + 2)

    times = frame['time'].to_numpy(dtype=float)
    if rescale:
        if times.max() == times.min():
            raise InputFormatError('all observation times are equal; cannot rescale', path=path)
        scale = TimeScale.from_times(times)
    else:
        scale = TimeScale()
    unit = np.clip(scale.to_unit(times), 0.0, 1.0) if rescale else times
    records = [
        LongitudinalRecord(sid, t, v)
        for sid, t, v in zip(frame['subject_id'], unit, frame['value'].to_numpy(dtype=float))
    ]
    logger.info('read longitudinal records', extra={
        'path': str(path), 'records': len(records), 'subjects': int(frame['subject_id'].nunique()),
    })
    return records, scale


def write_curves(path, sample):
    """Write the curve matrix and its JSON sidecar; returns the sidecar path."""
    path = Path(path)
    matrix = pd.DataFrame(
        np.vstack([sample.grid.points, sample.curves.values]),
        index=[GRID_LABEL, *sample.subject_ids],
    )
    matrix.to_csv(path, sep='\t', header=False, float_format=CURVE_FLOAT_FORMAT)

    metadata = {
        'subjects': len(sample),
        'grid_points': sample.grid.size,
        'chosen_lambda': sample.chosen_lambda,
        'nugget': sample.nugget,
        'dropped_subjects': list(sample.dropped),
        'cv_scores': list(sample.cv_scores),
        'time_scale': sample.time_scale.as_dict() if sample.time_scale else None,
    }
    sidecar = path.with_name(path.name + '.json')
    sidecar.write_text(json.dumps(metadata, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    return sidecar


def _first_line(mask):
    # frame row i sits on file line i + 1 (no header row)
    return int(np.flatnonzero(mask)[0]) + 1


def read_curves(path):
    """Return (CurveSet, subject_ids, metadata) from a curve matrix file."""
    path = Path(path)
    try:
        raw = pd.read_csv(path, sep='\t', header=None, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as exc:
        raise InputFormatError('file is empty', path=path) from exc
    except pd.errors.ParserError as exc:
        raise InputFormatError(str(exc), path=path) from exc
    if raw.shape[1] < 2:
        raise InputFormatError('no curve values found', path=path, line=1)
    if raw.iat[0, 0] != GRID_LABEL:
        raise InputFormatError(f'first row must start with {GRID_LABEL!r}', path=path, line=1)

    cells = raw.iloc[:, 1:]
    present = cells.notna().to_numpy()
    short = ~present.all(axis=1)
    if short.any():
        line = _first_line(short)
        raise InputFormatError(
            f'expected {cells.shape[1]} values, found {int(present[line - 1].sum())}', path=path, line=line,
        )
    unparsed = cells.apply(pd.to_numeric, errors='coerce').isna().to_numpy()
    if unparsed.any():
        raise InputFormatError('non-numeric curve value', path=path, line=_first_line(unparsed.any(axis=1)))
    numeric = cells.astype(float).to_numpy()
    if not np.isfinite(numeric).all():
        raise InputFormatError(
            'curve values must be finite', path=path, line=_first_line(~np.isfinite(numeric).all(axis=1)),
        )
    try:
        grid = TimeGrid(numeric[0])
    except ValueError as exc:
        raise InputFormatError(f'invalid grid: {exc}', path=path, line=1) from exc
    if len(raw) < 2:
        raise InputFormatError('no curves found', path=path)
    subject_ids = tuple(raw.iloc[1:, 0])
    if len(set(subject_ids)) != len(subject_ids):
        raise InputFormatError('duplicate subject ids', path=path)

    sidecar = path.with_name(path.name + '.json')
    metadata = json.loads(sidecar.read_text(encoding='utf-8')) if sidecar.exists() else {}
    return CurveSet(grid, numeric[1:]), subject_ids, metadata
