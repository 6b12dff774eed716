from __future__ import annotations

import inspect
import logging
from types import ModuleType
from typing import TYPE_CHECKING, Any, Callable, Mapping, NamedTuple

from qnet.conf import settings
from qnet.exceptions import ConfigurationError

if TYPE_CHECKING:
    from qnet.handlers.base import Dataset

logger = logging.getLogger(__name__)

# Marks a config key without default value
REQUIRED = object()

# Config value kinds understood by the config handler
KINDS = ("float", "int", "str", "bool", "floats", "ints")


class Field(NamedTuple):
    """One key of a command configuration: value kind, default value and allowed values (for "str" fields)"""

    kind: str
    default: Any = REQUIRED
    choices: tuple = ()

    @property
    def required(self) -> bool:
        return self.default is REQUIRED


Schema = Mapping[str, Field]


class RunContext:
    """Wraps the settings of one command run that do not come from the configuration document"""

    def __init__(self, command: str, seed: int | None = None, jobs: int | None = None):
        self.command = command
        self.seed = seed
        self.jobs = jobs or settings.QNET_DEFAULT_JOBS


class Command:
    """
    Wraps a python function registered as command, exposing its name, help text and configuration schemas.
    """

    def __init__(self, func: Callable[[dict, RunContext], Dataset]):
        self.function = func
        self.modes: dict[str, Schema] = func.qnet_modes  # type: ignore[attr-defined]

    @property
    def name(self) -> str:
        return getattr(self.function, "qnet_name", self.function.__name__)

    @property
    def help(self) -> str:
        return getattr(self.function, "qnet_help", "") or inspect.getdoc(self.function) or ""

    def __repr__(self) -> str:
        return "Command " + self.name

    def __eq__(self, other) -> bool:
        return isinstance(other, Command) and self.function == other.function and self.name == other.name

    def __hash__(self) -> int:
        return hash((self.function, self.name))

    def execute(self, config: dict, context: RunContext) -> Dataset:
        logger.debug(
            'Run command "%s" in mode "%s" (seed=%s, jobs=%d)',
            self.name,
            config.get("mode"),
            context.seed,
            context.jobs,
        )
        return self.function(config, context)


class _CommandRegistry:
    def __init__(self):
        self._registry: dict[str, Command] = {}

    def reset(self) -> None:
        self._registry.clear()

    def register_command(self, func: Callable) -> str:
        """
        Register a function as command.

        :param func: A function previously decorated using @command
        :return: The name of the registered command
        """
        if not getattr(func, "qnet_enabled", False):
            raise ConfigurationError(f"trying to register {func.__name__} as command, but it has not been decorated")

        cmd = Command(func)
        logger.debug('Register command "%s"', cmd.name)

        existing = self.get_command(cmd.name)
        if existing is not None:
            # The same function may be registered many times, when its module is scanned more than once
            if cmd == existing:
                return cmd.name
            raise ConfigurationError(f"a command with name {cmd.name} has already been registered")

        self._registry[cmd.name] = cmd
        return cmd.name

    def register_module(self, module: ModuleType) -> list[str]:
        """Register every decorated function found in ``module``"""
        return [
            self.register_command(func)
            for _, func in inspect.getmembers(module, inspect.isfunction)
            if getattr(func, "qnet_enabled", False)
        ]

    def total_count(self) -> int:
        return len(self._registry)

    def get_all_command_names(self, sort: bool = True) -> list[str]:
        names = list(self._registry)
        return sorted(names) if sort else names

    def get_all_commands(self, sort: bool = True) -> list[Command]:
        items = sorted(self._registry.items()) if sort else self._registry.items()
        return [cmd for _, cmd in items]

    def get_command(self, name: str) -> Command | None:
        return self._registry.get(name)


registry = _CommandRegistry()


def command(
    func=None,
    name: str | None = None,
    help: str = "",  # noqa: A002
    modes: Mapping[str, Schema] | None = None,
):
    """
    Mark a function as qnet command. The function receives the validated configuration and a RunContext, and returns
    a Dataset.

    :param func: A standard function
    :param name: Command name used on the command line, instead of the function name
    :param help: One line description printed by ``qnet list``
    :param modes: Configuration schema of each mode of the command. The ``mode`` key of a configuration selects one.
    """

    def decorated(_func):
        if not modes:
            raise ConfigurationError(f"command {name or _func.__name__} declares no configuration mode")
        for schema in modes.values():
            for key, field in schema.items():
                if field.kind not in KINDS:
                    raise ConfigurationError(f'key "{key}" has unknown kind "{field.kind}"')
        _func.qnet_enabled = True
        _func.qnet_name = name or _func.__name__
        _func.qnet_help = help
        _func.qnet_modes = dict(modes)
        return _func

    if func is None:
        return decorated

    return decorated(func)
