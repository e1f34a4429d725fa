from __future__ import annotations

import csv
from io import StringIO
from typing import Sequence

from .common import columns, format_value


def build_csv(rows: list[dict], fieldnames: Sequence[str] = ()) -> str:
    fieldnames = columns(rows, fieldnames)
    buf = StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({name: format_value(row.get(name)) for name in fieldnames})
    return buf.getvalue()
