from __future__ import annotations

import json

from .. import __version__
from .common import json_value


def build_meta(command: str, config: dict) -> dict:
    return {"command": command, "version": __version__, "config": json_value(config)}


def build_json(rows: list[dict], meta: dict) -> str:
    document = {"meta": meta, "rows": [json_value(row) for row in rows]}
    return json.dumps(document, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
