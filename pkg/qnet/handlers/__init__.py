from qnet.handlers.base import Dataset, DatasetWriter
from qnet.handlers.confighandler import ConfigHandler
from qnet.handlers.csvhandler import CsvDatasetWriter
from qnet.handlers.jsonhandler import JsonDatasetWriter

WRITERS: dict[str, type[DatasetWriter]] = {
    CsvDatasetWriter.format_name: CsvDatasetWriter,
    JsonDatasetWriter.format_name: JsonDatasetWriter,
}

__all__ = [
    "ConfigHandler",
    "CsvDatasetWriter",
    "Dataset",
    "DatasetWriter",
    "JsonDatasetWriter",
    "WRITERS",
]
