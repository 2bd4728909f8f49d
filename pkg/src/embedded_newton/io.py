"""Deterministic JSON/CSV output and the shipped JSON schemas."""
import csv
import datetime
import io
import json
import os
from importlib import resources

import numpy as np

SIG_DIGITS = 12


def round_sig(value, digits=SIG_DIGITS):
    return float(format(value, f".{digits}g"))


def to_jsonable(obj, digits=SIG_DIGITS):
    """Recursively convert numpy types and round floats to ``digits`` significant digits."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist(), digits)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not np.isfinite(value):
            return None
        return round_sig(value, digits)
    return obj


def dumps(obj):
    return json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def format_cell(value, digits=SIG_DIGITS):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format(float(value), f".{digits}g")
    return str(value)


def rows_to_csv(rows, columns):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def timestamp():
    """UTC timestamp, pinned by ``SOURCE_DATE_EPOCH`` when that is set."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = datetime.datetime.fromtimestamp(int(epoch), tz=datetime.timezone.utc)
    else:
        moment = datetime.datetime.now(tz=datetime.timezone.utc).replace(microsecond=0)
    return moment.isoformat()


def load_schema(name):
    """Load one of the bundled schemas, e.g. ``"solve_report"``."""
    text = resources.files("embedded_newton").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)
