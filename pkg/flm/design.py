"""
Design matrices with column roles.

Columns are tagged intercept / adjust / test. The null model of a test keeps
the intercept and adjust columns; the test block is what the association
tests ask about. A design may omit the intercept (the centred
single-predictor model) but never carries more than one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from funcscan_platform.errors import DataError, InsufficientSamples


class ColumnRole(str, enum.Enum):
    INTERCEPT = 'intercept'
    ADJUST = 'adjust'
    TEST = 'test'


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    values: np.ndarray
    roles: tuple
    names: tuple

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        roles = tuple(ColumnRole(role) for role in self.roles)
        names = tuple(str(name) for name in self.names)
        if values.ndim != 2 or values.shape[1] != len(roles) or len(roles) != len(names):
            raise DataError('design values, roles and names must describe the same columns')
        if len(set(names)) != len(names):
            raise DataError(f'duplicate design column names: {names}')
        if not np.all(np.isfinite(values)):
            raise DataError('design entries must be finite')
        intercepts = [i for i, role in enumerate(roles) if role is ColumnRole.INTERCEPT]
        if len(intercepts) > 1:
            raise DataError('a design has at most one intercept column')
        if intercepts and not np.all(values[:, intercepts[0]] == 1.0):
            raise DataError('the intercept column must be all ones')
        if values.shape[0] <= values.shape[1]:
            raise InsufficientSamples(
                f'{values.shape[0]} rows cannot support {values.shape[1]} design columns'
            )
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'roles', roles)
        object.__setattr__(self, 'names', names)

    @classmethod
    def build(cls, *, adjust=None, test=None, intercept=True, rows=None):
        """Assemble a design from name -> column mappings (insertion order kept)."""
        adjust = dict(adjust or {})
        test = dict(test or {})
        columns, roles, names = [], [], []
        sizes = {np.asarray(v).shape[0] for v in (*adjust.values(), *test.values())}
        if rows is not None:
            sizes.add(int(rows))
        if len(sizes) != 1:
            raise DataError('design columns must all have the same length')
        (n,) = sizes
        if intercept:
            columns.append(np.ones(n))
            roles.append(ColumnRole.INTERCEPT)
            names.append('intercept')
        for role, block in ((ColumnRole.ADJUST, adjust), (ColumnRole.TEST, test)):
            for name, column in block.items():
                column = np.asarray(column, dtype=float)
                if column.ndim != 1:
                    raise DataError(f'design column {name!r} must be one-dimensional')
                columns.append(column)
                roles.append(role)
                names.append(name)
        return cls(np.column_stack(columns), tuple(roles), tuple(names))

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def columns(self):
        return self.values.shape[1]

    def indices(self, role):
        role = ColumnRole(role)
        return [i for i, r in enumerate(self.roles) if r is role]

    @property
    def test_count(self):
        return len(self.indices(ColumnRole.TEST))

    @property
    def adjust_count(self):
        return len(self.indices(ColumnRole.ADJUST))

    @property
    def has_intercept(self):
        return bool(self.indices(ColumnRole.INTERCEPT))

    def column(self, name):
        return self.values[:, self.names.index(name)]

    def select(self, indices):
        indices = list(indices)
        return DesignMatrix(
            self.values[:, indices],
            tuple(self.roles[i] for i in indices),
            tuple(self.names[i] for i in indices),
        )

    def null_design(self):
        """Intercept and adjust columns only (possibly none, for the centred model)."""
        return self.select([i for i, role in enumerate(self.roles) if role is not ColumnRole.TEST])

    def test_block(self):
        return self.values[:, self.indices(ColumnRole.TEST)]

    def subset_rows(self, rows):
        return DesignMatrix(self.values[np.asarray(rows)], self.roles, self.names)

    def with_test_columns(self, columns, names):
        """Replace the test block with new columns (used per SNP)."""
        base = self.null_design()
        columns = np.asarray(columns, dtype=float).reshape(self.rows, -1)
        return DesignMatrix(
            np.column_stack([base.values, columns]),
            base.roles + (ColumnRole.TEST,) * columns.shape[1],
            base.names + tuple(names),
        )

    def second_moment(self):
        """Empirical Sigma_X = X^T X / N (intercept included)."""
        return self.values.T @ self.values / self.rows

    def __repr__(self):
        return f'DesignMatrix(rows={self.rows}, columns={list(self.names)})'
