"""Simulator for measurement-induced decoherence in current-biased
Josephson-junction qubit readout: Gaussian component evolution, coherence
coefficient dynamics with closed-form oracles, a truncated charge-basis
master-equation validator, and the thermal-noise dephasing budget."""

__version__ = "0.1.0"

from .params import PhysicalInputs, SystemParams, build_system, map_dcsquid, quantronium_inputs

__all__ = [
    "PhysicalInputs",
    "SystemParams",
    "build_system",
    "map_dcsquid",
    "quantronium_inputs",
    "__version__",
]
