"""Hot kernels with a numba path and a pure numpy fallback.

Set ``TOSIPP_DISABLE_NUMBA=1`` before import to force the numpy backend. The
numba backend is also skipped if numba cannot be imported.
"""
import os

from . import _numpy
from ._scalar import EPS, EPS_D2, INF

_disabled = os.environ.get("TOSIPP_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

if _disabled:
    _backend = _numpy
    BACKEND = "numpy"
else:
    try:
        from . import _numba as _backend
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _backend = _numpy
        BACKEND = "numpy"

los_clear = _backend.los_clear
vertex_window = _backend.vertex_window
departure_window = _backend.departure_window
visible_from = _backend.visible_from
perfect_dist = _backend.perfect_dist
earliest_departure = _backend.earliest_departure
earliest_departures = _backend.earliest_departures

__all__ = [
    "BACKEND", "EPS", "EPS_D2", "INF",
    "los_clear", "vertex_window", "departure_window", "visible_from", "perfect_dist",
    "earliest_departure", "earliest_departures",
]
