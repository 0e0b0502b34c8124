# gpsing/utils/general.py

import hashlib
import json
import math
import os

import numpy as np

__version__ = "0.3.0"


def set_filepath(filepath: str) -> str:
    """
    Set the filepath. If any directories do not currently exist in the filepath
    (which may be nested, e.g., /a/b/c/), create them.

    Args:
        filepath (str): The path to set.

    Returns:
        str: The validated filepath.
    """
    directory = os.path.dirname(filepath)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    return filepath


def params_hash(params: dict, length: int = 12) -> str:
    """
    Stable short hash of a parameter dictionary, used to name output files.

    Args:
        params (dict): JSON-serializable parameters (key order does not matter).
        length (int): Number of hex digits kept.

    Returns:
        str: The truncated sha256 hex digest.
    """
    payload = json.dumps(params, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:length]


def to_jsonable(value):
    """Converts numpy scalars and containers to plain JSON types; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value
