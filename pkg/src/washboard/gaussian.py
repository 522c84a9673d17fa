"""Closed-form evolution of the diagonal Wigner components.

Each qubit-conditioned component W+/W- is a Gaussian whose mean rotates
on an ellipse and whose second moments follow the Wang-Uhlenbeck solution
of a linear-drift Fokker-Planck equation.  In reversible mode the
covariance is a pure rotation of the initial one; in irreversible mode a
diffusion term grows the off-diagonal (alpha, alpha*) covariance entry as
|E_b| Gamma^2 t / 2, broadening the components as they separate.

All densities returned here are normalised to unit integral over
d(gamma) d(N); consumers that need population-weighted components apply
their own 1/2 factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .params import SystemParams

MODES = ("reversible", "irreversible")


@dataclass(frozen=True)
class GaussianState:
    """Mean and second central moments in real (gamma, N) coordinates."""

    mean_gamma: float
    mean_n: float
    var_gamma: float
    var_n: float
    cov_gamma_n: float

    @property
    def det_cov(self) -> float:
        return self.var_gamma * self.var_n - self.cov_gamma_n**2

    def validate(self) -> None:
        if not (self.var_gamma > 0 and self.var_n > 0):
            raise ParameterError("variances must be positive")
        if self.det_cov < 0.25 - 1e-9:
            raise ParameterError(
                f"covariance below the Heisenberg floor: det = {self.det_cov!r}"
            )

    def density(self, gamma, n) -> np.ndarray:
        """Normalised Gaussian density at (gamma, n); broadcasts."""
        dg = np.asarray(gamma) - self.mean_gamma
        dn = np.asarray(n) - self.mean_n
        det = self.det_cov
        # inverse covariance, 2x2 by hand
        a = self.var_n / det
        b = -self.cov_gamma_n / det
        c = self.var_gamma / det
        q = a * dg * dg + 2 * b * dg * dn + c * dn * dn
        return np.exp(-0.5 * q) / (2 * np.pi * np.sqrt(det))


@dataclass(frozen=True)
class FokkerPlanckSpec:
    """Linear Fokker-Planck problem in the doubled (alpha, alpha*) variables.

    drift M must be diagonal (the model only needs pure rotation); the
    covariance obeys dC/dt = M C + C M^T + diffusion.
    """

    drift: np.ndarray        # 2x2 complex, diagonal
    diffusion: np.ndarray    # 2x2 complex, symmetric
    displacement: complex    # fixed point of the mean flow

    def __post_init__(self):
        m = np.asarray(self.drift)
        n = np.asarray(self.diffusion)
        if m.shape != (2, 2) or n.shape != (2, 2):
            raise ParameterError("drift and diffusion must be 2x2")
        if abs(m[0, 1]) != 0 or abs(m[1, 0]) != 0:
            raise ParameterError("only diagonal drift is supported")
        if not np.allclose(n, n.T):
            raise ParameterError("diffusion matrix must be symmetric")


def wang_uhlenbeck(
    spec: FokkerPlanckSpec, mean0: complex, cov0: np.ndarray, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Propagate mean and covariance for time t >= 0 in closed form.

    mean(t) = displacement + e^{Mt} (mean0 - displacement), applied to the
    doubled vector (alpha, alpha*); cov(t) = e^{Mt} cov0 e^{M^T t} plus the
    accumulated diffusion integral, evaluated exactly for diagonal M.
    """
    if t < 0:
        raise ParameterError(f"t must be >= 0, got {t}")
    m = np.asarray(spec.drift, dtype=complex)
    b = np.asarray(spec.diffusion, dtype=complex)
    c0 = np.asarray(cov0, dtype=complex)
    m1, m2 = m[0, 0], m[1, 1]
    prop = np.array([np.exp(m1 * t), np.exp(m2 * t)])

    zc = spec.displacement
    z0 = np.array([mean0 - zc, np.conj(mean0) - np.conj(zc)], dtype=complex)
    mean = np.array([zc, np.conj(zc)], dtype=complex) + prop * z0

    cov = np.outer(prop, prop) * c0
    rates = np.array([[2 * m1, m1 + m2], [m1 + m2, 2 * m2]], dtype=complex)
    integ = np.empty((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            r = rates[i, j]
            if abs(r) * t < 1e-12:
                integ[i, j] = t
            else:
                integ[i, j] = (np.exp(r * t) - 1.0) / r
    cov = cov + b * integ
    return mean, cov


def initial_cov(params: SystemParams, branch: str) -> np.ndarray:
    """Initial (alpha, alpha*) covariance of the cross-frame vacuum seen in
    the branch frame.  For E_J0 >> E_J it tends to [[0, 1/2], [1/2, 0]]."""
    lam, _, _ = params.branch(branch)
    lx = params.lambda_cross
    diag = (lx**2 - lam**2) / (4 * lam * lx)
    off = (lam**2 + lx**2) / (4 * lam * lx)
    return np.array([[diag, off], [off, diag]], dtype=complex)


def make_fp_spec(params: SystemParams, branch: str, mode: str) -> FokkerPlanckSpec:
    """Drift / diffusion / displacement for one diagonal component."""
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    lam, gam, omega = params.branch(branch)
    drift = np.array([[-1j * omega, 0.0], [0.0, 1j * omega]], dtype=complex)
    if mode == "irreversible":
        d = abs(params.e_b) * gam**2 / 2.0
        diffusion = np.array([[-d, d], [d, -d]], dtype=complex)
    else:
        diffusion = np.zeros((2, 2), dtype=complex)
    displacement = params.e_b * gam / omega
    return FokkerPlanckSpec(drift=drift, diffusion=diffusion, displacement=displacement)


def to_phase_charge(alpha_mean: complex, alpha_cov: np.ndarray, lam: float) -> GaussianState:
    """Convert doubled-variable moments to real (gamma, N) moments.

    gamma = sqrt(2 lam) Re alpha, N = sqrt(2/lam) Im alpha; the covariance
    passed in is the symmetric-ordering one, so the vacuum contribution is
    already contained in its entries.
    """
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    c = np.asarray(alpha_cov, dtype=complex)
    c11, c12, c22 = c[0, 0], c[0, 1], c[1, 1]
    var_g = lam * (c11 + c22 + 2 * c12) / 2.0
    var_n = (2 * c12 - c11 - c22) / (2.0 * lam)
    cov_gn = (c11 - c22) / 2j
    return GaussianState(
        mean_gamma=float(np.sqrt(2 * lam) * np.real(alpha_mean)),
        mean_n=float(np.sqrt(2 / lam) * np.imag(alpha_mean)),
        var_gamma=float(np.real(var_g)),
        var_n=float(np.real(var_n)),
        cov_gamma_n=float(np.real(cov_gn)),
    )


def from_phase_charge(state: GaussianState, lam: float) -> tuple[complex, np.ndarray]:
    """Inverse of to_phase_charge (used for round-trip checks)."""
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    mean = state.mean_gamma / np.sqrt(2 * lam) + 1j * state.mean_n * np.sqrt(lam / 2)
    q = state.var_gamma / (2 * lam) + lam * state.var_n / 2.0
    p = state.var_gamma / lam - lam * state.var_n
    r = 2j * state.cov_gamma_n
    cov = np.array([[(p + r) / 2, q], [q, (p - r) / 2]], dtype=complex)
    return complex(mean), cov


def evolve_diagonal(params: SystemParams, branch: str, mode: str, t: float) -> GaussianState:
    """Closed-form diagonal component at time t, in real coordinates.

    The mean orbit is identical in both modes (decoherence only feeds the
    second moments); it circles the displaced centre
    gamma_c = sqrt(2 lam) E_b Gamma / omega at frequency omega.
    """
    if branch not in ("plus", "minus"):
        raise ParameterError(f"branch must be 'plus' or 'minus', got {branch!r}")
    lam, _, _ = params.branch(branch)
    spec = make_fp_spec(params, branch, mode)
    mean, cov = wang_uhlenbeck(spec, 0.0 + 0.0j, initial_cov(params, branch), t)
    state = to_phase_charge(complex(mean[0]), cov, lam)
    state.validate()
    return state
