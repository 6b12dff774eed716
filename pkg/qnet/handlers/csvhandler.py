from __future__ import annotations

import csv
import io
import json
import logging

import numpy as np

from qnet.handlers.base import Dataset, DatasetWriter, plain
from qnet.handlers.jsonhandler import QnetJSONEncoder

logger = logging.getLogger(__name__)


def _is_complex(value) -> bool:
    return isinstance(value, (complex, np.complexfloating))


class CsvDatasetWriter(DatasetWriter):
    """Write a dataset as CSV.

    The first line is a ``# qnet <command> schema <version>`` comment, followed by one ``# key: value`` comment per
    metadata entry, the header row and the data rows. Complex columns are split into ``<column>_re`` and
    ``<column>_im``. Missing values are written as empty fields.
    """

    format_name = "csv"
    file_extension = ".csv"

    def dumps(self, dataset: Dataset) -> str:
        complex_columns = {
            index for index in range(len(dataset.columns)) if any(_is_complex(row[index]) for row in dataset.rows)
        }
        header: list[str] = []
        for index, name in enumerate(dataset.columns):
            header.extend([f"{name}_re", f"{name}_im"] if index in complex_columns else [name])

        stream = io.StringIO()
        stream.write(f"# qnet {dataset.command} schema {self.schema_version}\n")
        for key in sorted(dataset.meta):
            stream.write(f"# {key}: {json.dumps(dataset.meta[key], cls=QnetJSONEncoder, sort_keys=True)}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        for row in dataset.rows:
            cells: list = []
            for index, value in enumerate(row):
                if index in complex_columns and value is None:
                    cells.extend(["", ""])
                elif index in complex_columns:
                    value = complex(value)
                    cells.extend([value.real, value.imag])
                else:
                    cells.append(plain(value))
            writer.writerow(cells)
        return stream.getvalue()
