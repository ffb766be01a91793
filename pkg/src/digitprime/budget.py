"""Memory budgeting shared by every dense allocation in the package."""
from __future__ import annotations

import os
import re

DEFAULT_MAX_MEM = 4 * 1024**3
ENV_VAR = "DIGITPRIME_MAX_MEM"

_SUFFIXES = {"": 1, "K": 1024, "M": 1024**2, "G": 1024**3, "T": 1024**4}


class BudgetExceeded(MemoryError):
    """Raised before an allocation that would exceed the configured cap."""


def parse_size(text: str | int) -> int:
    """Parse ``4G``, ``512M``, ``1024`` or ``2GiB`` into a byte count."""
    if isinstance(text, int):
        return text
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*([KMGT]?)(?:i?B)?\s*", str(text), re.IGNORECASE)
    if m is None:
        raise ValueError(f"cannot parse memory size {text!r}")
    return int(float(m.group(1)) * _SUFFIXES[m.group(2).upper()])


def default_max_mem() -> int:
    env = os.environ.get(ENV_VAR)
    return parse_size(env) if env else DEFAULT_MAX_MEM


def check_alloc(nbytes: int, max_mem: int | None = None, what: str = "array") -> None:
    cap = default_max_mem() if max_mem is None else max_mem
    if nbytes > cap:
        raise BudgetExceeded(f"{what} needs {nbytes} bytes, budget is {cap}")
