#!/usr/bin/env python3
"""
Exception hierarchy shared by the analyzers and the evaluator front-end.

Every error a caller can fix (bad input, bad configuration) derives from
EvaluationError so the CLI can map it to exit status 1.
"""

from typing import Optional


class EvaluationError(ValueError):
    """Base class for all input-caused failures"""


class EmptyDatasetError(EvaluationError):
    def __init__(self, message: str = "empty dataset"):
        super().__init__(message)


class ThresholdRangeError(EvaluationError):
    def __init__(self, message: str = "threshold out of range"):
        super().__init__(message)


class DegenerateClassError(EvaluationError):
    def __init__(self, message: str = "degenerate class distribution"):
        super().__init__(message)


class DegenerateCostError(EvaluationError):
    def __init__(self, message: str = "degenerate cost model"):
        super().__init__(message)


class CollinearFeaturesError(EvaluationError):
    def __init__(self, message: str = "collinear features"):
        super().__init__(message)


class ScorerError(EvaluationError):
    """Fitting preconditions not met (too few rows, single class)"""


class StudyConfigError(EvaluationError):
    """Study configuration is invalid (k > m, no scorer, missing dataset)"""


class ReportSchemaError(EvaluationError):
    """An emitted report does not validate against the published schema"""


class IngestError(EvaluationError):
    """CSV ingestion failure, optionally pinned to a line of the input file"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f", line {line}"
            location += ": "
        super().__init__(f"{location}{message}")
