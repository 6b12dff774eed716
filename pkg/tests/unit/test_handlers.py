import json

import numpy as np
import pytest

from qnet.core import Field
from qnet.exceptions import ConfigurationError, InvalidParameters
from qnet.handlers import ConfigHandler, CsvDatasetWriter, Dataset, JsonDatasetWriter

MODES = {
    "grid": {
        "r": Field("float"),
        "points": Field("int", 11),
        "method": Field("str", "exact", ("exact", "ode")),
        "values": Field("floats", [0.0]),
        "optimize": Field("bool", False),
        "subset": Field("ints", None),
    },
    "single": {"r": Field("float")},
}


class TestConfigHandler:
    handler = ConfigHandler("test", MODES)

    def test_defaults_filled(self):
        config = self.handler.parse('{"mode": "grid", "r": 0.2}')
        assert config == {
            "mode": "grid",
            "r": 0.2,
            "points": 11,
            "method": "exact",
            "values": [0.0],
            "optimize": False,
            "subset": None,
        }

    def test_integer_accepted_as_float(self):
        config = self.handler.parse('{"mode": "grid", "r": 1, "values": [1, 2.5]}')
        assert isinstance(config["r"], float)
        assert config["values"] == [1.0, 2.5]

    def test_single_mode_may_be_omitted(self):
        handler = ConfigHandler("test", {"single": MODES["single"]})
        assert handler.parse('{"r": 0.5}') == {"mode": "single", "r": 0.5}

    @pytest.mark.parametrize(
        ("text", "message"),
        [
            ("{not json", "parse error"),
            ("[1, 2]", "JSON object"),
            ('{"r": 0.2}', "is required"),
            ('{"mode": "other"}', "unknown mode"),
            ('{"mode": ["grid"]}', "unknown mode"),
            ('{"mode": "grid", "r": 0.2, "extra": 1}', "unknown keys"),
            ('{"mode": "grid"}', '"r" is required'),
            ('{"mode": "grid", "r": "0.2"}', "kind float"),
            ('{"mode": "grid", "r": true}', "kind float"),
            ('{"mode": "grid", "r": 0.2, "points": 1.5}', "kind int"),
            ('{"mode": "grid", "r": 0.2, "method": "fast"}', "must be one of"),
            ('{"mode": "grid", "r": 0.2, "values": 1.0}', "kind floats"),
            ('{"mode": "grid", "r": 0.2, "optimize": 1}', "kind bool"),
            ('{"mode": "grid", "r": null}', "kind float"),
        ],
    )
    def test_rejected(self, text, message):
        with pytest.raises(ConfigurationError, match=message):
            self.handler.parse(text)

    def test_null_allowed_for_optional(self):
        assert self.handler.parse('{"mode": "grid", "r": 0.2, "subset": null}')["subset"] is None


class TestDataset:
    def test_row_length_checked(self):
        with pytest.raises(InvalidParameters):
            Dataset("test", ["a", "b"], [(1,)])

    def test_duplicate_columns(self):
        with pytest.raises(InvalidParameters):
            Dataset("test", ["a", "a"])

    def test_append_and_column(self):
        dataset = Dataset("test", ["a", "b"])
        dataset.append(1, 2)
        dataset.append(3, 4)
        assert len(dataset) == 2
        assert dataset.column("b") == [2, 4]


@pytest.fixture
def dataset():
    """Small dataset mixing floats, numpy values, complex numbers and missing values"""
    return Dataset(
        "scatter",
        ["delta_p", "t0", "label"],
        [(0.0, -1 + 0j, "a"), (np.float64(0.5), np.complex128(0.6 - 0.8j), None)],
        {"backend": "ideal", "max_difference": np.float64(1e-12)},
    )


class TestJsonWriter:
    def test_document(self, dataset):
        document = json.loads(JsonDatasetWriter().dumps(dataset))
        assert document["schema_version"] == "1.0"
        assert document["command"] == "scatter"
        assert document["columns"] == ["delta_p", "t0", "label"]
        assert document["rows"][0] == [0.0, [-1.0, 0.0], "a"]
        assert document["rows"][1] == [0.5, [0.6, -0.8], None]
        assert document["meta"] == {"backend": "ideal", "max_difference": 1e-12}

    def test_keys_sorted(self, dataset):
        text = JsonDatasetWriter().dumps(dataset)
        assert text.index('"columns"') < text.index('"command"') < text.index('"meta"') < text.index('"rows"')

    def test_write(self, dataset, tmp_path):
        path = tmp_path / "out.json"
        JsonDatasetWriter().write(dataset, path)
        assert path.read_text(encoding="utf-8") == JsonDatasetWriter().dumps(dataset)


class TestCsvWriter:
    def test_layout(self, dataset):
        lines = CsvDatasetWriter().dumps(dataset).splitlines()
        assert lines[0] == "# qnet scatter schema 1.0"
        assert lines[1] == '# backend: "ideal"'
        assert lines[2] == "# max_difference: 1e-12"
        assert lines[3] == "delta_p,t0_re,t0_im,label"
        assert lines[4] == "0.0,-1.0,0.0,a"
        assert lines[5] == "0.5,0.6,-0.8,"

    def test_schema_version(self, dataset):
        assert CsvDatasetWriter("2.1").dumps(dataset).startswith("# qnet scatter schema 2.1\n")

    def test_deterministic(self, dataset):
        assert CsvDatasetWriter().dumps(dataset) == CsvDatasetWriter().dumps(dataset)
