"""Exception hierarchy shared by every stage of the toolkit."""

from typing import Iterable, Optional


class CitenetError(Exception):
    """Base class for all toolkit errors"""


class InputError(CitenetError):
    """Bad input file or configuration (CLI exit code 1)"""


class ParameterError(InputError, ValueError):
    """A numeric or set-valued parameter is outside its documented range"""


class ConfigError(InputError):
    pass


class RuleSetError(ConfigError):
    pass


class CorpusFormatError(InputError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class DuplicateDocumentError(InputError):
    def __init__(self, doc_ids: Iterable[str]):
        self.doc_ids = sorted(set(doc_ids))
        super().__init__(f"duplicate doc_id: {', '.join(self.doc_ids)}")


class NetworkFormatError(InputError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class UnknownProvisionError(InputError, KeyError):
    def __init__(self, keys: Iterable[str]):
        self.keys = list(keys)
        super().__init__(f"unknown provision(s): {', '.join(self.keys)}")

    def __str__(self) -> str:
        return self.args[0]


class StageError(CitenetError):
    """A pipeline stage failed (CLI exit code 2)"""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"{stage} stage failed: {message}")


class StageInputError(StageError, InputError):
    """Bad input discovered while a stage was running (CLI exit code 1)"""
