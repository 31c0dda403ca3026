"""
CSV ingestion.

Accepted layouts, all with a header row and '.' as decimal separator:

  - single column: one numeric column (two-file comparisons)
  - long: [variable,]group,value
  - paired: [variable,]pre,post

Row numbers in diagnostics are file line numbers, the header being row 1.
"""
from dataclasses import dataclass
from pathlib import Path
import math
import logging

import pandas as pd

from estatistica.descriptive import Sample
from estatistica.exceptions import InputFormatError, LengthMismatchError

logger = logging.getLogger(__name__)

FIRST_DATA_ROW = 2
DEFAULT_VARIABLE = 'value'


@dataclass(frozen=True)
class GroupedData:
    variable: str
    samples: tuple[Sample, ...]

    def groups(self) -> list[str]:
        return [sample.group for sample in self.samples]

    def select(self, names) -> tuple[Sample, ...]:
        by_name = {sample.group: sample for sample in self.samples}
        missing = [name for name in names if name not in by_name]
        if missing:
            raise InputFormatError(
                f'group(s) {", ".join(missing)} not found for "{self.variable}"; '
                f'available: {", ".join(by_name)}'
            )
        return tuple(by_name[name] for name in names)


@dataclass(frozen=True)
class PairedData:
    variable: str
    pre: Sample
    post: Sample


def _read_frame(path) -> pd.DataFrame:
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False,
                            skipinitialspace=True, skip_blank_lines=False)
    except FileNotFoundError as e:
        raise InputFormatError(f'cannot read {path}: file not found') from e
    except pd.errors.EmptyDataError as e:
        raise InputFormatError(f'{path} is empty; a header row is required') from e
    except pd.errors.ParserError as e:
        raise InputFormatError(f'{path} is not valid CSV: {e}') from e
    frame = frame.fillna('')
    frame.columns = [str(c).strip() for c in frame.columns]
    logger.debug(f'Lidas {len(frame)} linhas de {path}')
    return frame


def _require_columns(frame: pd.DataFrame, required: tuple[str, ...], path) -> None:
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise InputFormatError(
            f'{path}: missing column(s) {", ".join(missing)}; found {", ".join(frame.columns)}',
            row=1,
        )


def parse_number(cell: str, row: int, column: str) -> float:
    text = str(cell).strip()
    try:
        value = float(text)
    except ValueError:
        raise InputFormatError(f'not a number: {text!r}', row=row, column=column) from None
    if not math.isfinite(value):
        raise InputFormatError(f'non-finite value {text!r}', row=row, column=column)
    return value


def read_single_column(path, label: str | None = None) -> Sample:
    """One numeric column under a header; blank trailing cells are ignored."""
    frame = _read_frame(path)
    if len(frame.columns) != 1:
        raise InputFormatError(
            f'{path}: expected a single column, found {len(frame.columns)}', row=1
        )
    column = frame.columns[0]
    values = []
    for offset, cell in enumerate(frame[column]):
        if str(cell).strip() == '':
            continue
        values.append(parse_number(cell, offset + FIRST_DATA_ROW, column))
    return Sample.from_values(values, label=label or column, group=label or column)


def read_long(path) -> list[GroupedData]:
    """
    Long format: one observation per row.

    Returns one GroupedData per variable (a single 'value' variable when the
    column is absent), groups in order of first appearance.
    """
    frame = _read_frame(path)
    _require_columns(frame, ('group', 'value'), path)
    has_variable = 'variable' in frame.columns

    collected: dict[str, dict[str, list[float]]] = {}
    for offset, row in enumerate(frame.itertuples(index=False)):
        line = offset + FIRST_DATA_ROW
        record = row._asdict()
        if not any(str(cell).strip() for cell in record.values()):
            continue
        variable = str(record['variable']).strip() if has_variable else DEFAULT_VARIABLE
        group = str(record['group']).strip()
        if has_variable and not variable:
            raise InputFormatError('variable name is blank', row=line, column='variable')
        if not group:
            raise InputFormatError('group name is blank', row=line, column='group')
        value = parse_number(record['value'], line, 'value')
        collected.setdefault(variable, {}).setdefault(group, []).append(value)

    if not collected:
        raise InputFormatError(f'{path} has a header but no data rows')
    return [
        GroupedData(
            variable=variable,
            samples=tuple(Sample.from_values(values, label=group, group=group)
                          for group, values in groups.items()),
        )
        for variable, groups in collected.items()
    ]


def read_paired(path) -> list[PairedData]:
    """
    Paired format: pre and post of one subject per row.

    A row with only one of pre/post filled breaks the pairing and raises
    LengthMismatchError; fully blank rows are skipped.
    """
    frame = _read_frame(path)
    _require_columns(frame, ('pre', 'post'), path)
    has_variable = 'variable' in frame.columns

    collected: dict[str, tuple[list[float], list[float]]] = {}
    for offset, row in enumerate(frame.itertuples(index=False)):
        line = offset + FIRST_DATA_ROW
        record = row._asdict()
        pre_cell, post_cell = str(record['pre']).strip(), str(record['post']).strip()
        if not pre_cell and not post_cell:
            continue
        if not pre_cell or not post_cell:
            blank = 'pre' if not pre_cell else 'post'
            raise LengthMismatchError(f'row {line}, column {blank}: value missing, pre and post lengths differ')
        variable = str(record['variable']).strip() if has_variable else DEFAULT_VARIABLE
        pre, post = collected.setdefault(variable, ([], []))
        pre.append(parse_number(pre_cell, line, 'pre'))
        post.append(parse_number(post_cell, line, 'post'))

    if not collected:
        raise InputFormatError(f'{path} has a header but no data rows')
    return [
        PairedData(
            variable=variable,
            pre=Sample.from_values(pre, label='pre', group='pre'),
            post=Sample.from_values(post, label='post', group='post'),
        )
        for variable, (pre, post) in collected.items()
    ]
