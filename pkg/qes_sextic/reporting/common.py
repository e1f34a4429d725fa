from __future__ import annotations

import math
from enum import Enum
from typing import Any, Iterable, Sequence

import numpy as np


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".15g")
    if isinstance(value, (list, tuple)):
        return ";".join(format_value(item) for item in value)
    return str(value)


def json_value(value: Any) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (list, tuple)):
        return [json_value(item) for item in value]
    if isinstance(value, dict):
        return {key: json_value(item) for key, item in value.items()}
    return value


def columns(rows: Iterable[dict], leading: Sequence[str] = ()) -> list[str]:
    """Leading columns first, then every other key in first-seen order."""
    seen = list(leading)
    for row in rows:
        for key in row:
            if key not in seen:
                seen.append(key)
    return seen
