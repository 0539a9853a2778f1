"""Size caps for the exact (exponential-time) routines.

Defaults can be raised with the ``FRUSTRATA_CAP_OVERRIDE`` environment
variable, a comma separated list of ``name=value`` pairs, for example
``FRUSTRATA_CAP_OVERRIDE="brute_sites=28,search_len=16"``. This is meant
for experts: run time and memory grow exponentially with every cap.
"""
from __future__ import annotations

import os

from .errors import ParameterError

DEFAULT_CAPS = {
    "brute_sites": 26,       # brute_force_ground: 2**n configurations
    "dp_width": 20,          # dp_ground: 2**m profile states
    "search_len": 14,        # exhaustive separating-trail search depth
    "trail_count_len": 12,   # trail_count enumeration depth
    "census_exact": 10**7,   # number of m-subsets enumerated by census
}

ENV_VAR = "FRUSTRATA_CAP_OVERRIDE"


def _overrides() -> dict[str, int]:
    raw = os.environ.get(ENV_VAR, "").strip()
    if not raw:
        return {}
    out = {}
    for item in raw.split(","):
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in DEFAULT_CAPS:
            raise ParameterError(f"bad {ENV_VAR} entry {item!r}")
        try:
            out[name] = int(value)
        except ValueError:
            raise ParameterError(f"bad {ENV_VAR} value {item!r}") from None
    return out


def get_cap(name: str) -> int:
    return _overrides().get(name, DEFAULT_CAPS[name])
