import math
import re
from typing import List

_WEIGHT_PATTERN = re.compile(r"^(off|auto(:[0-9.eE+-]+)?|[0-9.eE+-]+)$")
_RANGE_PATTERN = re.compile(r"^\s*([0-9.eE+-]+)\s*:\s*([0-9.eE+-]+)\s*(?::\s*([0-9.eE+-]+))?\s*$")


def validate_weight_text(text: str) -> tuple[bool, str]:
    """Validate a --k value: off, auto, auto:<fraction> or a positive number"""
    text = text.strip().lower()
    if not _WEIGHT_PATTERN.match(text):
        return False, f"Weight must be 'off', 'auto', 'auto:<fraction>' or a number, got '{text}'"

    if text.startswith("auto:"):
        try:
            fraction = float(text.split(":", 1)[1])
        except ValueError:
            return False, f"Invalid auto fraction in '{text}'"
        if not 0 < fraction <= 1:
            return False, "Auto fraction must lie in (0, 1]"
    elif text not in ("off", "auto"):
        try:
            k = float(text)
        except ValueError:
            return False, f"Invalid weight '{text}'"
        if not k > 0 or math.isinf(k):
            return False, "Fixed weight must be a positive finite number"

    return True, "Valid weight"


def validate_mode(mode: str) -> tuple[bool, str]:
    if mode in ("nn", "nnp"):
        return True, "Valid mode"
    return False, f"Mode must be 'nn' or 'nnp', got '{mode}'"


def validate_source_count(n: int) -> tuple[bool, str]:
    if n < 2:
        return False, f"At least two sources are required, got {n}"
    return True, "Valid source count"


def parse_range(text: str) -> List[float]:
    """Expand 'start:stop[:step]' (stop inclusive) into a list of values."""
    match = _RANGE_PATTERN.match(text)
    if not match:
        raise ValueError(f"Range must look like 'start:stop[:step]', got '{text}'")
    start, stop = float(match.group(1)), float(match.group(2))
    step = float(match.group(3)) if match.group(3) else 1.0
    if step <= 0 or stop < start:
        raise ValueError(f"Range '{text}' needs start <= stop and a positive step")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]
