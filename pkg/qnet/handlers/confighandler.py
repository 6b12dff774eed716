from __future__ import annotations

import json
import logging
from json.decoder import JSONDecodeError
from typing import Any, Mapping

from qnet.core import Field, Schema
from qnet.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

MODE_KEY = "mode"


def _number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _integer(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _convert(key: str, value: Any, field: Field) -> Any:
    """Check ``value`` against ``field`` and return it in its python type"""
    if field.kind == "float" and _number(value):
        return float(value)
    if field.kind == "int" and _integer(value):
        return value
    if field.kind == "bool" and isinstance(value, bool):
        return value
    if field.kind == "str" and isinstance(value, str):
        if field.choices and value not in field.choices:
            raise ConfigurationError(f'"{key}" must be one of {", ".join(map(str, field.choices))}, got "{value}"')
        return value
    if field.kind == "floats" and isinstance(value, list) and all(_number(item) for item in value):
        return [float(item) for item in value]
    if field.kind == "ints" and isinstance(value, list) and all(_integer(item) for item in value):
        return list(value)
    raise ConfigurationError(f'"{key}" expects a value of kind {field.kind}, got {value!r}')


class ConfigHandler:
    """Parse and validate the JSON configuration of a command.

    The document is an object. Its ``mode`` key selects one schema among ``modes`` (it may be omitted when the command
    has a single mode). Unknown keys are rejected, missing keys take their default value and keys without default are
    required. A ``null`` value is accepted only where the default is ``None``.
    """

    def __init__(self, command: str, modes: Mapping[str, Schema]):
        self.command = command
        self.modes = dict(modes)

    def parse(self, text: str) -> dict[str, Any]:
        try:
            document = json.loads(text)
        except JSONDecodeError as exc:
            raise ConfigurationError(f"parse error, unable to read the configuration: {exc}") from None
        if not isinstance(document, dict):
            raise ConfigurationError("the configuration must be a JSON object")
        return self.validate(document)

    def _select_mode(self, document: Mapping[str, Any]) -> str:
        if MODE_KEY in document:
            mode = document[MODE_KEY]
        elif len(self.modes) == 1:
            mode = next(iter(self.modes))
        else:
            raise ConfigurationError(f'"{MODE_KEY}" is required, one of {", ".join(sorted(self.modes))}')
        if not isinstance(mode, str) or mode not in self.modes:
            choices = ", ".join(sorted(self.modes))
            raise ConfigurationError(f'unknown mode "{mode}" for {self.command}, one of {choices}')
        return mode

    def validate(self, document: Mapping[str, Any]) -> dict[str, Any]:
        mode = self._select_mode(document)
        schema = self.modes[mode]
        unknown = sorted(set(document) - set(schema) - {MODE_KEY})
        if unknown:
            raise ConfigurationError(f'unknown keys for {self.command} mode "{mode}": {", ".join(unknown)}')

        config: dict[str, Any] = {MODE_KEY: mode}
        for key, field in schema.items():
            if key not in document:
                if field.required:
                    raise ConfigurationError(f'"{key}" is required for {self.command} mode "{mode}"')
                config[key] = field.default
            elif document[key] is None and field.default is None:
                config[key] = None
            else:
                config[key] = _convert(key, document[key], field)
        logger.debug("Configuration of %s (%s mode): %s", self.command, mode, config)
        return config
