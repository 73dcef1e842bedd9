#!/usr/bin/env python3
"""
Ingest - CSV score files and feature files.

Score file:   header with `score` and `label` columns, optional `id`.
Feature file: header with one column per feature plus the label column.

Rows are kept in file order. Every rejection names the file and the line.
No imputation: a missing cell is an error.
"""

import csv
import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from analyzer.core_metrics import ScoredDataset
from analyzer.errors import EvaluationError, IngestError
from analyzer.logistic_scorer import FeatureDataset

logger = logging.getLogger(__name__)

SCORE_COLUMN = "score"
LABEL_COLUMN = "label"
ID_COLUMN = "id"
FORMATS = ("scores", "features")

PathLike = Union[str, Path]


def _parse_label(raw: Optional[str], path: str, line: int) -> bool:
    value = (raw or "").strip()
    if value == "1":
        return True
    if value == "0":
        return False
    raise IngestError(f"label must be 0 or 1, got {raw!r}", path, line)


def _parse_real(raw: Optional[str], column: str, path: str, line: int) -> float:
    value = (raw or "").strip()
    if not value:
        raise IngestError(f"missing value in column '{column}'", path, line)
    try:
        number = float(value)
    except ValueError:
        raise IngestError(f"column '{column}' is not a number: {raw!r}", path, line)
    if not math.isfinite(number):
        raise IngestError(f"column '{column}' is not finite: {raw!r}", path, line)
    return number


def _open_rows(path: PathLike) -> Tuple[csv.DictReader, object]:
    try:
        handle = open(path, 'r', encoding='utf-8', newline='')
    except OSError as e:
        raise IngestError(f"cannot open file: {e.strerror or e}", str(path))
    reader = csv.DictReader(handle)
    if not reader.fieldnames:
        handle.close()
        raise IngestError("empty file", str(path))
    return reader, handle


def _check_shape(row: dict, path: str, line: int):
    # DictReader files surplus cells under None and pads short rows with None
    if None in row:
        raise IngestError("more cells than header columns", path, line)
    if any(value is None for value in row.values()):
        raise IngestError("fewer cells than header columns", path, line)


def read_score_file(path: PathLike, name: Optional[str] = None) -> Tuple[ScoredDataset, List[str]]:
    """(dataset, ids); ids are empty strings when the file has no id column"""
    path_str = str(path)
    reader, handle = _open_rows(path)
    with handle:
        missing = [c for c in (SCORE_COLUMN, LABEL_COLUMN) if c not in reader.fieldnames]
        if missing:
            raise IngestError(f"missing column(s): {', '.join(missing)}", path_str, 1)

        scores, labels, ids = [], [], []
        for row in reader:
            line = reader.line_num
            _check_shape(row, path_str, line)
            score = _parse_real(row[SCORE_COLUMN], SCORE_COLUMN, path_str, line)
            if not 0.0 <= score <= 1.0:
                raise IngestError(f"score {score!r} outside [0, 1]", path_str, line)
            scores.append(score)
            labels.append(_parse_label(row[LABEL_COLUMN], path_str, line))
            ids.append((row.get(ID_COLUMN) or "").strip())

    if not scores:
        raise IngestError("empty file", path_str)
    logger.debug("read %d scored modules from %s", len(scores), path_str)
    return ScoredDataset.from_pairs(scores, labels, name or Path(path).stem), ids


def read_scores(path: PathLike, name: Optional[str] = None) -> ScoredDataset:
    return read_score_file(path, name)[0]


def feature_columns(path: PathLike, label_column: str = LABEL_COLUMN) -> List[str]:
    """Feature column names from the header alone"""
    reader, handle = _open_rows(path)
    with handle:
        header = list(reader.fieldnames)
    if label_column not in header:
        raise IngestError(f"missing label column '{label_column}'", str(path), 1)
    return [c for c in header if c not in (label_column, ID_COLUMN)]


def read_features(path: PathLike, label_column: str = LABEL_COLUMN,
                  features: Optional[Sequence[str]] = None,
                  name: Optional[str] = None) -> FeatureDataset:
    """Every column except the label (and id) is a feature unless `features` narrows it"""
    path_str = str(path)
    reader, handle = _open_rows(path)
    with handle:
        header = list(reader.fieldnames)
        if label_column not in header:
            raise IngestError(f"missing label column '{label_column}'", path_str, 1)
        available = [c for c in header if c not in (label_column, ID_COLUMN)]
        if features:
            unknown = [f for f in features if f not in available]
            if unknown:
                raise IngestError(f"unknown feature column(s): {', '.join(unknown)}", path_str, 1)
            columns = list(features)
        else:
            columns = available
        if not columns:
            raise IngestError("no feature columns", path_str, 1)

        rows, labels = [], []
        for row in reader:
            line = reader.line_num
            _check_shape(row, path_str, line)
            # every cell must be present, even in columns not selected
            rows.append([_parse_real(row[c], c, path_str, line) for c in available])
            labels.append(_parse_label(row[label_column], path_str, line))

    if not rows:
        raise IngestError("empty file", path_str)
    logger.debug("read %d rows x %d features from %s", len(rows), len(available), path_str)
    dataset = FeatureDataset(rows, labels, tuple(available), name or Path(path).stem)
    return dataset.select(columns) if columns != available else dataset


def ingest(path: PathLike, format: str = "scores") -> Union[ScoredDataset, FeatureDataset]:
    if format == "scores":
        return read_scores(path)
    if format == "features":
        return read_features(path)
    raise EvaluationError(f"unknown ingestion format '{format}' (expected one of {', '.join(FORMATS)})")


def write_scores(ds: ScoredDataset, path: PathLike, ids: Optional[Sequence[str]] = None) -> Path:
    """Score file that reads back to exactly the same (score, label) pairs"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        if ids:
            writer.writerow([ID_COLUMN, SCORE_COLUMN, LABEL_COLUMN])
            for row_id, item in zip(ids, ds.items):
                writer.writerow([row_id, repr(item.score), int(item.label)])
        else:
            writer.writerow([SCORE_COLUMN, LABEL_COLUMN])
            for item in ds.items:
                writer.writerow([repr(item.score), int(item.label)])
    return path
