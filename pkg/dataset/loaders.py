"""
CSV ingestion.

Dialect: UTF-8, comma-separated, header row, no quoting needed. Every cell
must be present; the loader rejects the file otherwise.
"""
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from core.exceptions import DataError
from .types import CATEGORICAL, COLUMN_KINDS, NUMERIC, ColumnSchema, Dataset

logger = logging.getLogger(__name__)


def load_csv(path, class_column, schema_hint=None):
    """
    Load a CSV file into a Dataset.

    Args:
        path: CSV file path
        class_column: name of the binary class column
        schema_hint: optional {column: 'categorical' | 'numeric'}; columns
            without a hint are numeric when every cell parses as a number

    Returns:
        Dataset with level order = first appearance in the file and the
        class level with fewer rows designated as small
    """
    frame = read_csv_frame(path)
    return dataset_from_frame(frame, class_column, schema_hint=schema_hint, source=str(path))


def read_csv_frame(path):
    """
    Read a CSV file in the loader's dialect into a string-valued DataFrame
    with every cell present.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Data file not found: {path}")

    # Header is read as an ordinary line so every line is held to the same
    # field count: longer lines raise, shorter lines surface as missing cells.
    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            na_values=[''],
            encoding='utf-8',
        )
    except pd.errors.ParserError as e:
        raise DataError(f"Ragged rows in {path}: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise DataError(f"No header row in {path}") from e
    except UnicodeDecodeError as e:
        raise DataError(f"{path} is not valid UTF-8: {e}") from e

    header = raw.iloc[0]
    if header.isna().any():
        raise DataError(f"Empty column name in the header of {path}")
    frame = raw.iloc[1:].reset_index(drop=True)
    frame.columns = [str(name) for name in header]
    _check_complete(frame, str(path))
    return frame


def _check_complete(frame, source):
    missing = frame.isna().to_numpy()
    if missing.any():
        row, col = np.argwhere(missing)[0]
        raise DataError(
            f"Missing cell in {source}: column {frame.columns[col]!r}, data row {row + 1} "
            f"(short row or empty value)"
        )


def dataset_from_frame(frame, class_column, schema_hint=None, source='<frame>'):
    """Build a Dataset from a string-valued DataFrame (one column per variable)."""
    schema_hint = dict(schema_hint or {})
    frame = frame.astype(object)

    if frame.columns.duplicated().any():
        dupes = sorted(set(frame.columns[frame.columns.duplicated()]))
        raise DataError(f"Duplicate column names in {source}: {dupes}")
    if class_column not in frame.columns:
        raise DataError(f"Class column {class_column!r} not found in {source}")
    if len(frame) < 1:
        raise DataError(f"No data rows in {source}")

    unknown = set(schema_hint) - set(frame.columns)
    if unknown:
        raise DataError(f"Schema hint names unknown columns: {sorted(unknown)}")
    for name, kind in schema_hint.items():
        if kind not in COLUMN_KINDS:
            raise DataError(f"Schema hint for {name!r} must be one of {COLUMN_KINDS}, got {kind!r}")

    _check_complete(frame, source)

    schema, columns = [], {}
    for name in frame.columns:
        values = frame[name].astype(str)
        kind = CATEGORICAL if name == class_column else schema_hint.get(name)
        if kind is None:
            kind = NUMERIC if _parses_as_numeric(values) else CATEGORICAL
        if name == class_column and schema_hint.get(name) == NUMERIC:
            raise DataError(f"Class column {class_column!r} cannot be numeric")

        if kind == NUMERIC:
            parsed = pd.to_numeric(values, errors='coerce')
            if parsed.isna().any():
                bad = values[parsed.isna()].iloc[0]
                raise DataError(f"Numeric parse failure in column {name!r}: {bad!r}")
            schema.append(ColumnSchema(name=name, kind=NUMERIC))
            columns[name] = parsed.to_numpy(dtype=np.float64)
        else:
            levels = tuple(pd.unique(values))
            codes = pd.Categorical(values, categories=list(levels)).codes.astype(np.int32)
            schema.append(ColumnSchema(name=name, kind=CATEGORICAL, levels=levels))
            columns[name] = codes

    class_schema = next(col for col in schema if col.name == class_column)
    if len(class_schema.levels) != 2:
        raise DataError(
            f"Class column {class_column!r} must have exactly two levels, "
            f"found {len(class_schema.levels)}: {list(class_schema.levels)}"
        )

    codes = columns[class_column]
    counts = np.bincount(codes, minlength=2)
    # Equal counts: the later-appearing level is small.
    small_code = 0 if counts[0] < counts[1] else 1
    large_code = 1 - small_code
    class_levels = (class_schema.levels[large_code], class_schema.levels[small_code])
    y = (codes == small_code).astype(np.int8)

    dataset = Dataset(
        schema=tuple(schema),
        class_column=class_column,
        class_levels=class_levels,
        columns=columns,
        y=y,
    )
    logger.info(
        f"Loaded {dataset.n_rows} rows from {source}: "
        f"{class_levels[0]}={int(counts[large_code])}, {class_levels[1]}={int(counts[small_code])}"
    )
    return dataset


def _parses_as_numeric(values):
    return bool(pd.to_numeric(values, errors='coerce').notna().all())
