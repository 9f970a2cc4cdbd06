"""Misc Python utilities"""

import json
import math

import numpy as np


def json_safe(obj):
    """Converts numpy scalars, arrays and tuples to plain JSON values.

    Non-finite floats become the strings "nan", "inf" and "-inf"."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    elif isinstance(obj, (int, np.integer)):
        return int(obj)
    elif isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    elif isinstance(obj, np.ndarray):
        return json_safe(obj.tolist())
    elif isinstance(obj, (list, tuple)):
        return [json_safe(item) for item in obj]
    elif isinstance(obj, dict):
        return {str(key): json_safe(value) for key, value in obj.items()}
    elif obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def parse_override(text):
    """Splits KEY=VALUE; VALUE is read as a JSON literal when possible."""
    if "=" not in text:
        raise ValueError("Override '%s' is not of the form KEY=VALUE" % text)
    key, raw = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ValueError("Override '%s' has an empty key" % text)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value
