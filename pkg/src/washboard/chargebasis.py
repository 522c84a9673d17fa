"""Truncated charge-basis integrator for the unexpanded master equation.

Validates the classical-limit behaviour of the jump description of the
bias current (time-averaged junction current equals the applied current)
and the second-order phase expansion used by the Gaussian/coefficient
modules.  The charge window n in [-n_max, n_max] is truncated with
annihilating boundaries: wrap-around would create spurious coherence, so
leakage is monitored instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, TruncationError

_HERMITICITY_TOL = 1e-12
_TRACE_TOL = 1e-10
_POSITIVITY_SOFT = 1e-8
_POSITIVITY_HARD = 1e-6


@dataclass(frozen=True, eq=False)
class JunctionOps:
    """Charge-basis operators on the truncated window.

    H = E_C0 N^2 + E_J0 (1 - (eta + eta^dag)/2); the shift operators obey
    [N, eta^dag] = eta^dag and [N, eta] = -eta on the window interior.
    """

    n_max: int
    e_c0: float   # rad/s
    e_j0: float   # rad/s
    n_values: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, n_max: int, e_c0: float, e_j0: float) -> "JunctionOps":
        if n_max < 2:
            raise ParameterError(f"n_max must be >= 2, got {n_max}")
        if e_c0 <= 0 or e_j0 < 0:
            raise ParameterError("E_C0 must be positive and E_J0 non-negative")
        return cls(n_max=n_max, e_c0=e_c0, e_j0=e_j0,
                   n_values=np.arange(-n_max, n_max + 1, dtype=float))

    @property
    def dim(self) -> int:
        return 2 * self.n_max + 1

    @property
    def number_op(self) -> np.ndarray:
        return np.diag(self.n_values)

    @property
    def eta(self) -> np.ndarray:
        """Lowering shift, eta|n> = |n-1>, annihilating at the lower edge."""
        return np.diag(np.ones(self.dim - 1), 1)

    @property
    def eta_dag(self) -> np.ndarray:
        return np.diag(np.ones(self.dim - 1), -1)

    @property
    def hamiltonian(self) -> np.ndarray:
        h = np.diag(self.e_c0 * self.n_values**2 + self.e_j0)
        h -= self.e_j0 / 2 * (self.eta + self.eta_dag)
        return h

    @property
    def h_diag(self) -> np.ndarray:
        return self.e_c0 * self.n_values**2 + self.e_j0

    def h_norm_estimate(self) -> float:
        return float(np.max(np.abs(self.h_diag)) + self.e_j0)


def build_operators(n_max: int, e_c0: float, e_j0: float) -> JunctionOps:
    return JunctionOps.build(n_max, e_c0, e_j0)


def default_n_max(nu: float) -> int:
    """Window sized so the ground-state charge spread 3 nu^(-1/4) fits."""
    return int(math.ceil(3.0 * nu**-0.25)) + 2


@dataclass
class DenseState:
    """Truncated density matrix with its validity checks."""

    matrix: np.ndarray
    boundary_max: float = 0.0   # largest edge population seen while evolving

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_max(self) -> int:
        return (self.dim - 1) // 2

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def boundary_population(self) -> float:
        return float(self.matrix[0, 0].real + self.matrix[-1, -1].real)

    def validate(self, positivity_tol: float = _POSITIVITY_SOFT,
                 trace_tol: float = _TRACE_TOL) -> None:
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T))
        if herm > _HERMITICITY_TOL:
            raise TruncationError(f"state not Hermitian: max deviation {herm:.3e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > trace_tol:
            raise TruncationError(f"trace drifted to {tr!r}")
        lo = float(np.linalg.eigvalsh(m).min())
        if lo < -positivity_tol:
            raise TruncationError(
                f"negative eigenvalue {lo:.3e}; increase n_max (truncation too tight)"
            )


def _h_rho(ops: JunctionOps, rho: np.ndarray) -> np.ndarray:
    """H @ rho using the tridiagonal structure."""
    out = ops.h_diag[:, None] * rho
    half = ops.e_j0 / 2
    out[:-1, :] -= half * rho[1:, :]
    out[1:, :] -= half * rho[:-1, :]
    return out


def _rho_h(ops: JunctionOps, rho: np.ndarray) -> np.ndarray:
    out = rho * ops.h_diag[None, :]
    half = ops.e_j0 / 2
    out[:, :-1] -= half * rho[:, 1:]
    out[:, 1:] -= half * rho[:, :-1]
    return out


def _jump(rho: np.ndarray, raising: bool) -> np.ndarray:
    """eta^dag rho eta (raising) or eta rho eta^dag (lowering)."""
    out = np.zeros_like(rho)
    if raising:
        out[1:, 1:] = rho[:-1, :-1]
    else:
        out[:-1, :-1] = rho[1:, 1:]
    return out


def rhs(rho: np.ndarray, ops: JunctionOps, e_b: float, out: np.ndarray | None = None) -> np.ndarray:
    """Master-equation right-hand side, -i[H, rho] + |E_b| (L rho L^dag - rho).

    The jump channel raises the pair number for e_b >= 0 and lowers it
    otherwise.  Trace is conserved up to population at the window edges.
    Pass a work array as out to avoid reallocating in stepping loops.
    """
    hd = ops.h_diag
    half = ops.e_j0 / 2
    if out is None:
        out = np.empty_like(rho)
    # commutator, diagonal part of H
    np.multiply(hd[:, None], rho, out=out)
    out -= rho * hd[None, :]
    # commutator, hopping part of H
    out[:-1, :] -= half * rho[1:, :]
    out[1:, :] -= half * rho[:-1, :]
    out[:, :-1] += half * rho[:, 1:]
    out[:, 1:] += half * rho[:, :-1]
    out *= -1j
    if e_b != 0.0:
        ab = abs(e_b)
        if e_b >= 0:
            out[1:, 1:] += ab * rho[:-1, :-1]
        else:
            out[:-1, :-1] += ab * rho[1:, 1:]
        out -= ab * rho
    return out


def evolve(
    state: DenseState,
    ops: JunctionOps,
    e_b: float,
    t_final: float,
    dt: float,
    current_samples: bool = False,
    i_c: float = 1.0,
) -> DenseState | tuple[DenseState, np.ndarray, np.ndarray]:
    """Fixed-step RK4 propagation to t_final.

    Enforces the stability heuristic dt (||H|| + |E_b|) < 0.1.  When
    current_samples is set, returns (state, times, current) with the
    junction current recorded at every step.
    """
    rate = ops.h_norm_estimate() + abs(e_b)
    if dt * rate >= 0.1:
        raise ParameterError(
            f"dt too large: dt*(|H|+|E_b|) = {dt * rate:.3f} >= 0.1"
        )
    n_steps = int(round(t_final / dt))
    rho = state.matrix.astype(complex, copy=True)
    times = np.empty(n_steps + 1)
    currents = np.empty(n_steps + 1)
    times[0] = 0.0
    boundary_max = DenseState(rho).boundary_population()
    if current_samples:
        currents[0] = current_expectation(DenseState(rho), ops, i_c)
    k1, k2, k3, k4 = (np.empty_like(rho) for _ in range(4))
    stage = np.empty_like(rho)
    for step in range(n_steps):
        rhs(rho, ops, e_b, out=k1)
        np.multiply(k1, 0.5 * dt, out=stage)
        stage += rho
        rhs(stage, ops, e_b, out=k2)
        np.multiply(k2, 0.5 * dt, out=stage)
        stage += rho
        rhs(stage, ops, e_b, out=k3)
        np.multiply(k3, dt, out=stage)
        stage += rho
        rhs(stage, ops, e_b, out=k4)
        k2 += k3
        k2 *= 2.0
        k2 += k1
        k2 += k4
        k2 *= dt / 6.0
        rho += k2
        times[step + 1] = (step + 1) * dt
        boundary_max = max(boundary_max, rho[0, 0].real + rho[-1, -1].real)
        if current_samples:
            currents[step + 1] = current_expectation(DenseState(rho), ops, i_c)
    out = DenseState(rho)
    # trace preservation only holds while the window contains the state
    out.validate(positivity_tol=_POSITIVITY_HARD,
                 trace_tol=max(_TRACE_TOL, 100.0 * abs(e_b) * t_final * boundary_max))
    out.boundary_max = boundary_max
    if current_samples:
        return out, times, currents
    return out


def current_expectation(state: DenseState, ops: JunctionOps, i_c: float) -> float:
    """I_C <(eta^dag - eta)/(2i)>; the first off-diagonal carries it all."""
    rho = state.matrix
    # tr(rho eta^dag) = sum_n rho[n, n+1]; tr(rho eta) is its conjugate
    upper = np.sum(np.diagonal(rho, offset=1))
    val = i_c * (upper - np.conj(upper)) / 2j
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise TruncationError(f"current expectation not real: {val!r}")
    return float(val.real)


def gaussian_phase_state(n_max: int, gamma0: float, var_gamma: float) -> DenseState:
    """Pure state localised at phase gamma0 with the given phase variance.

    Charge amplitudes are exp(-var_gamma n^2 - i n gamma0), the Fourier
    pair of a phase-space Gaussian (charge variance 1/(4 var_gamma)).
    """
    if var_gamma <= 0:
        raise ParameterError("phase variance must be positive")
    n = np.arange(-n_max, n_max + 1, dtype=float)
    amps = np.exp(-var_gamma * n**2 - 1j * n * gamma0)
    amps /= np.linalg.norm(amps)
    return DenseState(np.outer(amps, amps.conj()))


def phase_matrix(n_max: int) -> np.ndarray:
    """Phase operator on the truncated window via the discrete transform.

    Acts as multiplication by gamma on states localised well inside
    (-pi, pi); used to compare the exact jump dissipator with its
    second-order expansion.
    """
    dim = 2 * n_max + 1
    k = np.arange(dim)
    gammas = -np.pi + 2 * np.pi * (k + 0.5) / dim
    n = np.arange(-n_max, n_max + 1, dtype=float)
    # F[k, m] = exp(-i gamma_k n_m)/sqrt(dim) maps charge to phase basis
    f = np.exp(-1j * np.outer(gammas, n)) / np.sqrt(dim)
    return f.conj().T @ np.diag(gammas) @ f


def dissipator_exact(rho: np.ndarray, raising: bool) -> np.ndarray:
    """Jump dissipator L rho L^dag - rho for the unit-rate shift channel."""
    return _jump(rho, raising) - rho


def dissipator_quadratic(rho: np.ndarray, gamma_mat: np.ndarray, raising: bool) -> np.ndarray:
    """Second-order expansion of the jump dissipator in the phase operator."""
    sign = 1.0 if raising else -1.0
    comm = gamma_mat @ rho - rho @ gamma_mat
    g2 = gamma_mat @ gamma_mat
    return sign * 1j * comm + gamma_mat @ rho @ gamma_mat - 0.5 * (g2 @ rho + rho @ g2)


# ---------------------------------------------------------------------------
# classical-limit experiment
# ---------------------------------------------------------------------------

def classical_limit_error(
    nu: float,
    e_b_ratio: float = 0.25,
    periods: float = 1.0,
    n_max: int | None = None,
    dt_margin: float = 0.095,
) -> dict:
    """Relative error of the time-averaged current against the applied bias.

    Runs the full master equation in units where E_J0 = I_C = 1, starting
    from a Gaussian phase state sitting at the tilted-well minimum, and
    averages the current over an integer number of plasma periods.

    Returns a dict with keys rel_error, n_max, steps, trace_drift,
    boundary_population.
    """
    if not (0 < abs(e_b_ratio) < 1):
        raise ParameterError("classical limit needs 0 < |E_b|/E_J0 < 1")
    e_j0 = 1.0
    e_c0 = nu
    e_b = e_b_ratio * e_j0
    gamma0 = math.asin(e_b_ratio)
    cos0 = math.cos(gamma0)
    # effective well curvature at the tilted minimum
    lam_eff = math.sqrt(2 * nu / cos0)
    omega_eff = math.sqrt(2 * e_c0 * e_j0 * cos0)
    t_final = periods * 2 * math.pi / omega_eff

    if n_max is None:
        # the pair-transfer shot noise has a heavy upward tail, so the
        # window must hold ~7.5 sqrt(jump count), not just 3 sigma
        sigma_n0 = 1.0 / math.sqrt(2 * lam_eff)
        jumps = abs(e_b) * t_final
        n_max = int(math.ceil(3.0 * sigma_n0 + 7.5 * math.sqrt(jumps))) + 8
    ops = build_operators(n_max, e_c0, e_j0)
    dt = dt_margin / (ops.h_norm_estimate() + abs(e_b))
    n_steps = int(math.ceil(t_final / dt))
    dt = t_final / n_steps

    state = gaussian_phase_state(n_max, gamma0, lam_eff / 2)
    tr0 = state.trace()
    final, times, currents = evolve(
        state, ops, e_b, t_final, dt, current_samples=True, i_c=1.0
    )
    avg = float(np.trapezoid(currents, times) / t_final)
    return {
        "nu": nu,
        "rel_error": abs(avg - e_b_ratio) / abs(e_b_ratio),
        "avg_current": avg,
        "n_max": n_max,
        "steps": n_steps,
        "trace_drift": abs(final.trace() - tr0),
        "boundary_population": final.boundary_max,
    }
