"""Field-ionization detector model for cavity QED measurements."""
from .core import (AtomCavityState, CavitySpace, ClickRecord, Outcome, entangled_state,
                   make_state, trace_atom, trace_cavity)
from .kernels import BACKEND
from .spectral import ContinuumGrid, DetectorSpec, EigenSystem, Zone

__version__ = "0.1.0"

__all__ = [
    "AtomCavityState", "BACKEND", "CavitySpace", "ClickRecord", "ContinuumGrid",
    "DetectorSpec", "EigenSystem", "Outcome", "Zone", "entangled_state", "make_state",
    "trace_atom", "trace_cavity",
]
