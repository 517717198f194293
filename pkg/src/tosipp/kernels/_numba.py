"""numba backend: recompiles the scalar and loop kernels with ``@njit``.

The plain-Python originals stay untouched, so both backends can live in one
process (the equivalence tests and the kernel benchmark rely on that).
"""
import types

from numba import njit

from . import _loops, _scalar


def _jit_modules(*modules):
    ns = {}
    for mod in modules:
        ns.update(mod.__dict__)
    funcs = {}
    for mod in modules:
        for name, obj in vars(mod).items():
            if isinstance(obj, types.FunctionType) and obj.__module__ == mod.__name__:
                funcs[name] = types.FunctionType(obj.__code__, ns, name, obj.__defaults__)
    # globals are resolved at first compile, so rebinding before any call
    # makes jitted kernels call jitted helpers
    for name, fn in funcs.items():
        ns[name] = njit(cache=True)(fn)
    return types.SimpleNamespace(**{k: ns[k] for k in funcs})


_k = _jit_modules(_scalar, _loops)

los_clear = _k.los_clear
seg_box_dist2 = _k.seg_box_dist2
vertex_window = _k.vertex_window
departure_window = _k.departure_window
visible_from = _k.visible_from
perfect_dist = _k.perfect_dist
earliest_departure = _k.earliest_departure
earliest_departures = _k.earliest_departures
