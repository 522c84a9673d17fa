"""Physical constants (CODATA 2018) and unit conversions.

Internal unit system: hbar = 1, every energy is stored as an angular
frequency in rad/s, times are in seconds.  The CLI layer converts to
nanoseconds for display only.
"""

K_B = 1.380649e-23          # J/K
HBAR = 1.054571817e-34      # J s
H_PLANCK = 6.62607015e-34   # J s
E_CHARGE = 1.602176634e-19  # C
PHI_0 = H_PLANCK / (2 * E_CHARGE)  # flux quantum, Wb

# 1 k_B kelvin expressed as an angular frequency
KELVIN_TO_RADS = K_B / HBAR


def convert_energy(value_kelvin: float) -> float:
    """Convert an energy given in k_B kelvin to an angular frequency (rad/s)."""
    if not (value_kelvin == value_kelvin and abs(value_kelvin) != float("inf")):
        raise ValueError(f"energy must be finite, got {value_kelvin}")
    return value_kelvin * KELVIN_TO_RADS
