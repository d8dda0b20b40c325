import json
import sys
from pathlib import Path

import numpy as np


class InputError(ValueError):
    pass


def flatten_dict(d, top_level_key="", sep="_"):
    flat_d = {}
    for k, v in d.items():
        if isinstance(v, dict):
            flat_d.update(flatten_dict(v, top_level_key=(top_level_key + k + sep)))
        else:
            flat_d[top_level_key + k] = v
    return flat_d


def read_json_input(path):
    """Reads a json payload from a file, or from stdin for "-"."""
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"Could not read json input from {path or 'stdin'}: {e}") from e


def write_text(text, path=None):
    if path is None:
        print(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n")


def child_seeds(seed, n):
    """n independent integer seeds derived from one seed, in a fixed order."""
    rng = np.random.default_rng(seed)
    return [int(s) for s in rng.integers(0, 2**31 - 1, size=n)]
