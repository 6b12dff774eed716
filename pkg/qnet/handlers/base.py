from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from qnet.conf import settings
from qnet.exceptions import InvalidParameters

logger = logging.getLogger(__name__)


@dataclass
class Dataset:
    """Tabular output of a command: named columns, one tuple per row and free-form metadata"""

    command: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.columns = list(self.columns)
        if len(set(self.columns)) != len(self.columns):
            raise InvalidParameters(f"duplicate dataset columns in {self.columns}")
        self.rows = [self._checked(row) for row in self.rows]

    def _checked(self, row) -> tuple:
        row = tuple(row)
        if len(row) != len(self.columns):
            raise InvalidParameters(f"row of {len(row)} values for {len(self.columns)} columns")
        return row

    def append(self, *values) -> None:
        self.rows.append(self._checked(values))

    def column(self, name: str) -> list:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


def plain(value: Any) -> Any:
    """Convert numpy scalars and arrays into the equivalent python objects"""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


class DatasetWriter(ABC):
    """Base class for concrete dataset writers"""

    format_name: str
    file_extension: str

    def __init__(self, schema_version: str | None = None):
        self.schema_version = schema_version or settings.QNET_SCHEMA_VERSION

    @abstractmethod
    def dumps(self, dataset: Dataset) -> str:
        """Serialize the dataset into the text written to the output file"""

    def write(self, dataset: Dataset, path) -> None:
        text = self.dumps(dataset)
        with open(path, "w", encoding="utf-8", newline="") as stream:
            stream.write(text)
        logger.info("Wrote %d rows to %s", len(dataset), path)
