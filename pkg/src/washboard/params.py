"""Physical inputs and derived model constants.

Single source of truth for every scaling used downstream: the quadrature
scalings lambda/Gamma of the three oscillator frames (plus / minus for the
two qubit-conditioned branches, cross for the coherence component), the
branch frequencies, the bias energy and the separation time t0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import PHI_0, K_B, convert_energy
from .errors import ParameterError

# tolerance for the I_bias <-> E_b cross check
_BIAS_CONSISTENCY_RTOL = 5e-3


@dataclass(frozen=True)
class PhysicalInputs:
    """Device energies as quoted in experiments, in k_B kelvin.

    e_c (island charging energy) is carried along for config round-trips
    but does not enter the reduced two-frame model.  i_bias, when given,
    must be consistent with e_b_ratio via E_b = I_bias * Phi_0 / (2 pi).
    """

    e_j: float          # qubit Josephson energy
    e_c0: float         # readout-junction charging energy
    e_j0: float         # readout-junction Josephson energy
    e_b_ratio: float    # dimensionless bias strength E_b / E_J0
    e_c: float = 0.0    # island charging energy (informational)
    i_bias: float | None = None  # bias current in ampere (optional)

    def __post_init__(self):
        if self.e_j0 <= 0 or self.e_c0 <= 0:
            raise ParameterError(
                f"E_J0 and E_C0 must be positive, got E_J0={self.e_j0}, E_C0={self.e_c0}"
            )
        if self.e_j < 0:
            raise ParameterError(f"E_J must be non-negative, got {self.e_j}")
        if self.i_bias is not None:
            e_b_joule = abs(self.i_bias) * PHI_0 / (2 * math.pi)
            e_b_stated = abs(self.e_b_ratio) * self.e_j0 * K_B
            if e_b_stated == 0.0:
                consistent = e_b_joule == 0.0
            else:
                consistent = abs(e_b_joule - e_b_stated) / e_b_stated <= _BIAS_CONSISTENCY_RTOL
            if not consistent:
                raise ParameterError(
                    f"i_bias={self.i_bias} A implies E_b={e_b_joule:.6e} J but "
                    f"e_b_ratio={self.e_b_ratio} gives {e_b_stated:.6e} J "
                    f"(>{_BIAS_CONSISTENCY_RTOL:.1%} apart)"
                )


@dataclass(frozen=True)
class SystemParams:
    """Derived constants in internal units (rad/s, seconds).

    t0 = pi/(omega_plus - omega_minus) is the time at which the two
    conditioned Gaussian components are maximally separated; it is
    infinite when the qubit is decoupled (mu = 0).
    """

    nu: float             # E_C0 / E_J0
    mu: float             # E_J / E_J0
    lambda_plus: float
    lambda_minus: float
    lambda_cross: float
    gamma_plus: float     # sqrt(lambda/2) quadrature scale
    gamma_minus: float
    gamma_cross: float
    omega_plus: float     # rad/s
    omega_minus: float
    omega_cross: float
    e_b: float            # signed bias energy, rad/s
    e_j: float            # qubit energy, rad/s
    e_j0: float           # readout Josephson energy, rad/s
    e_c0: float           # readout charging energy, rad/s
    t0: float             # seconds (inf when mu = 0)
    inputs: PhysicalInputs

    def branch(self, which: str) -> tuple[float, float, float]:
        """(lambda, Gamma, omega) for branch 'plus', 'minus' or 'cross'."""
        if which == "plus":
            return self.lambda_plus, self.gamma_plus, self.omega_plus
        if which == "minus":
            return self.lambda_minus, self.gamma_minus, self.omega_minus
        if which == "cross":
            return self.lambda_cross, self.gamma_cross, self.omega_cross
        raise ParameterError(f"unknown branch {which!r}")


def build_system(inputs: PhysicalInputs) -> SystemParams:
    """Derive all model constants from the physical inputs.

    Raises ParameterError for non-positive junction energies or mu >= 4
    (the minus-branch scaling is undefined when the qubit term overwhelms
    the readout junction).
    """
    nu = inputs.e_c0 / inputs.e_j0
    mu = inputs.e_j / inputs.e_j0
    if mu >= 4.0:
        raise ParameterError(f"mu = E_J/E_J0 = {mu} >= 4: minus branch undefined")

    lam_cross = math.sqrt(2 * nu)
    lam_plus = math.sqrt(2 * nu / (1 + mu / 4))
    lam_minus = math.sqrt(2 * nu / (1 - mu / 4))

    w_cross = convert_energy(math.sqrt(2 * inputs.e_c0 * inputs.e_j0))
    w_plus = w_cross * math.sqrt(1 + mu / 4)
    w_minus = w_cross * math.sqrt(1 - mu / 4)
    t0 = math.pi / (w_plus - w_minus) if mu > 0 else math.inf

    return SystemParams(
        nu=nu,
        mu=mu,
        lambda_plus=lam_plus,
        lambda_minus=lam_minus,
        lambda_cross=lam_cross,
        gamma_plus=math.sqrt(lam_plus / 2),
        gamma_minus=math.sqrt(lam_minus / 2),
        gamma_cross=math.sqrt(lam_cross / 2),
        omega_plus=w_plus,
        omega_minus=w_minus,
        omega_cross=w_cross,
        e_b=inputs.e_b_ratio * convert_energy(inputs.e_j0),
        e_j=convert_energy(inputs.e_j),
        e_j0=convert_energy(inputs.e_j0),
        e_c0=convert_energy(inputs.e_c0),
        t0=t0,
        inputs=inputs,
    )


def reduce_dcsquid(
    eps0: float,
    e_j0: float,
    e_c0: float,
    phi_x: float,
    delta_phi: float,
    e_b_ratio: float = 0.0,
) -> PhysicalInputs:
    """Map a flux-detector SQUID (energies in k_B kelvin, phases in rad)
    onto the reduced readout model.

    The effective potential well requires cos(phi_x) > 0.  A warning is
    emitted when the qubit level splitting eps0 is not resonant with the
    quadratic coupling, i.e. eps0/2 != E_J0*delta_phi*sin(phi_x) within 1%.
    """
    cos_x = math.cos(phi_x)
    if cos_x <= 0:
        raise ParameterError(f"cos(phi_x) = {cos_x:.4f} <= 0: inverted well")
    coupling = e_j0 * delta_phi * math.sin(phi_x)
    if coupling != 0.0 and abs(eps0 / 2 - coupling) > 0.01 * abs(coupling):
        warnings.warn(
            f"eps0/2 = {eps0 / 2:.6g} not resonant with E_J0*dphi*sin(phi_x) "
            f"= {coupling:.6g} (>1% off); reduced model still built",
            stacklevel=2,
        )
    elif coupling == 0.0 and eps0 != 0.0:
        warnings.warn(
            f"qubit splitting eps0 = {eps0:.6g} but coupling vanishes",
            stacklevel=2,
        )
    return PhysicalInputs(
        e_j=4 * e_j0 * delta_phi * math.sin(phi_x),
        e_c0=e_c0,
        e_j0=e_j0 * cos_x,
        e_b_ratio=e_b_ratio,
    )


def map_dcsquid(
    eps0: float,
    e_j0: float,
    e_c0: float,
    phi_x: float,
    delta_phi: float,
    e_b_ratio: float = 0.0,
) -> SystemParams:
    """reduce_dcsquid followed by build_system."""
    return build_system(reduce_dcsquid(eps0, e_j0, e_c0, phi_x, delta_phi, e_b_ratio))


def quantronium_inputs(
    e_b_ratio: float = 0.97,
    e_j_factor: float = 1.0,
    i_bias: float | None = None,
) -> PhysicalInputs:
    """Inputs of the reference charge-phase qubit experiment.

    e_j_factor scales the qubit energy (x25 exaggerates the branch
    separation for surface plots).
    """
    return PhysicalInputs(
        e_j=0.86 * e_j_factor,
        e_c=0.68,
        e_c0=0.0037,
        e_j0=18.4,
        e_b_ratio=e_b_ratio,
        i_bias=i_bias,
    )
