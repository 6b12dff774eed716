from __future__ import annotations

import json
import logging
from typing import Any

import numpy as np

from qnet.handlers.base import Dataset, DatasetWriter, plain
from qnet.helpers import complex_pair

logger = logging.getLogger(__name__)


class QnetJSONEncoder(json.JSONEncoder):
    """Encode numpy values, and complex numbers as [re, im] pairs"""

    def default(self, o: Any) -> Any:
        if isinstance(o, (complex, np.complexfloating)):
            return complex_pair(o)
        if isinstance(o, (np.ndarray, np.generic)):
            return plain(o)
        if isinstance(o, (set, frozenset)):
            return sorted(o)
        return super().default(o)


class JsonDatasetWriter(DatasetWriter):
    """Write a dataset as one JSON document with sorted keys"""

    format_name = "json"
    file_extension = ".json"

    def dumps(self, dataset: Dataset) -> str:
        document = {
            "schema_version": self.schema_version,
            "command": dataset.command,
            "columns": dataset.columns,
            "rows": [list(row) for row in dataset.rows],
            "meta": dataset.meta,
        }
        return json.dumps(document, cls=QnetJSONEncoder, sort_keys=True, indent=2) + "\n"
