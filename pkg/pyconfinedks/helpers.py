from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Any, Callable, Iterable
import math

import numpy as np


def serialize_value(val: Any) -> Any:
    if val is None:
        return None
    if isinstance(val, Enum):
        return val.value
    if isinstance(val, np.generic):
        return val.item()
    if isinstance(val, (tuple, list)):
        return [serialize_value(v) for v in val]
    return val


def format_radius(r_c: float) -> str:
    return f"{r_c:g}"


def format_number(val: Any) -> str:
    """Fixed CSV rendering: '.' decimal mark, ten decimals, empty for missing."""
    val = serialize_value(val)
    if val is None:
        return ""
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, int):
        return str(val)
    if isinstance(val, float):
        if math.isnan(val):
            return "nan"
        if math.isinf(val):
            return "inf" if val > 0 else "-inf"
        return f"{val:.10f}"
    return str(val)


def ordered_map(fn: Callable[[Any], Any], items: Iterable[Any], jobs: int = 1) -> list:
    """fn over items on a thread pool, results in input order; jobs=1 runs inline."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(jobs, len(items))) as executor:
        return list(executor.map(fn, items))
