"""JSON readers and writers for spin systems and period cells."""
from __future__ import annotations

import json

import numpy as np

from .errors import ParameterError
from .lattice import PeriodCell, SpinSystem


def system_to_dict(system: SpinSystem) -> dict:
    return {
        "width": system.width,
        "height": system.height,
        "h": system.h.astype(int).tolist(),
        "v": system.v.astype(int).tolist(),
        "provenance": system.provenance,
    }


def system_from_dict(d: dict) -> SpinSystem:
    try:
        return SpinSystem(int(d["width"]), int(d["height"]), np.array(d["h"]), np.array(d["v"]),
                          dict(d.get("provenance", {"kind": "explicit"})))
    except KeyError as exc:
        raise ParameterError(f"spin-system JSON lacks field {exc}") from None


def dumps_system(system: SpinSystem) -> str:
    return json.dumps(system_to_dict(system)) + "\n"


def loads_system(text: str) -> SpinSystem:
    return system_from_dict(json.loads(text))


def cell_to_dict(cell: PeriodCell) -> dict:
    """``h`` and ``v`` are flat lists in canonical bond order (row-major)."""
    return {"N": cell.N, "h": cell.h.ravel().astype(int).tolist(),
            "v": cell.v.ravel().astype(int).tolist()}


def cell_from_dict(d: dict) -> PeriodCell:
    N = int(d["N"])
    return PeriodCell(N, np.array(d["h"]).reshape(N, N), np.array(d["v"]).reshape(N, N))


def dumps_cell(cell: PeriodCell) -> str:
    return json.dumps(cell_to_dict(cell)) + "\n"


def loads_cell(text: str) -> PeriodCell:
    return cell_from_dict(json.loads(text))
