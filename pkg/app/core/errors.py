'''
Module for defining toolkit errors.

Created on 19-10-2026
@author: Harry New

'''

# - - - - - - - - - - - - - - - - - - -

class AbsenceError(Exception):
    """
    Base error for the toolkit. Carries a human readable detail.
    """
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(AbsenceError):
    exit_code = 2

# - - - - - - - - - - - - - - - - - - -
# INGEST ERRORS

class ChannelParseError(AbsenceError):
    """
    Malformed line in a channel file. The detail leads with the file, when
    known, and the 1-based line number.
    """
    def __init__(self, line: int, detail: str, *, path: str | None = None):
        location = f"{path}: line {line}" if path else f"line {line}"
        super().__init__(f"{location}: {detail}")
        self.line = line
        self.path = path


class OrderingError(ChannelParseError):
    """
    Timestamp not strictly greater than the previous one.
    """


class ResampleError(AbsenceError):
    pass

# - - - - - - - - - - - - - - - - - - -
# DATASET ERRORS

class AlignmentError(AbsenceError):
    pass


class EncodingError(AbsenceError):
    pass

# - - - - - - - - - - - - - - - - - - -
# LEARNER / TUNING / EVAL ERRORS

class HyperparamError(AbsenceError):
    pass


class EmptyDatasetError(AbsenceError):
    pass


class DivergenceError(AbsenceError):
    pass


class StratificationError(AbsenceError):
    pass


class SearchSpaceError(AbsenceError):
    pass


class ResultsStoreError(AbsenceError):
    pass


class MetricsError(AbsenceError):
    pass
