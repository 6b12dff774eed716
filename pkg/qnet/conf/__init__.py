from __future__ import annotations

import contextlib
import json
import os
from typing import Any, Iterator

from qnet.conf import default_settings


class QnetSettings:
    """Lazy settings lookup: environment, then runtime overrides, then library defaults"""

    def __init__(self):
        self._overrides: dict[str, Any] = {}

    def __getattr__(self, item):
        if item.startswith("_"):
            raise AttributeError(item)
        # First, try the process environment. Values are JSON-decoded, so "1e-9" or "true" work as expected
        raw = os.environ.get(item)
        if raw is not None:
            try:
                return json.loads(raw)
            except ValueError:
                return raw
        if item in self._overrides:
            return self._overrides[item]
        # Fallback: return the default value, provided by qnet
        return getattr(default_settings, item)

    @contextlib.contextmanager
    def override(self, **values: Any) -> Iterator[QnetSettings]:
        """Temporarily replace some settings. Unknown names are rejected to catch typos early."""
        for name in values:
            if not hasattr(default_settings, name):
                raise AttributeError(f"Unknown setting {name}")
        previous = dict(self._overrides)
        self._overrides.update(values)
        try:
            yield self
        finally:
            self._overrides = previous


settings = QnetSettings()
