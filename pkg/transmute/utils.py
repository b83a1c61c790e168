"""
Utility functions for the transmute package.
"""

import json
import math
import re
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np

_PI_PATTERN = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_length(text: str) -> float:
    """
    Parse an interval length such as '2', '3.5', 'pi', '2pi' or 'pi/2'.
    """
    text = str(text).strip().lower()
    match = _PI_PATTERN.match(text)
    if match:
        sign = {"": 1.0, "+": 1.0, "-": -1.0}
        prefix = match.group(1)
        factor = sign[prefix] if prefix in sign else float(prefix)
        divisor = float(match.group(2)) if match.group(2) else 1.0
        return factor * math.pi / divisor
    return float(text)


def complex_pair(value: Any) -> List[float]:
    """[re, im] of a number."""
    value = complex(value)
    return [value.real, value.imag]


def from_complex_pair(pair: List[float]) -> complex:
    return complex(pair[0], pair[1])


def to_jsonable(value: Any) -> Any:
    """Convert numpy, complex and Fraction values for json.dumps."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (complex, np.complexfloating)):
        if value.imag == 0:
            return float(value.real)
        return complex_pair(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def dump_json(payload: Dict[str, Any], path: Optional[str] = None) -> str:
    """Serialize deterministically; also write to path when given."""
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
