"""Numerical integration of the coherence-component coefficient equations.

The off-diagonal Wigner component is an exponential of a quadratic form,
W_x = exp(a g + b N + c g^2 + d g N + e N^2 + f), whose six complex
coefficients obey coupled Riccati-type ODEs.  The reversible and
irreversible modes share the same right-hand side and differ only in the
damping constant I (0 versus -2|E_b|), so setting i_damp = 0 in the
irreversible path reproduces the reversible one bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrabilityError, ParameterError
from .gaussian import MODES
from .params import SystemParams

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


@dataclass(frozen=True)
class CoeffState:
    """Coefficients of the exponential ansatz at one instant."""

    a: complex
    b: complex
    c: complex
    d: complex
    e: complex
    f: complex

    def as_vector(self) -> np.ndarray:
        z = np.array([self.a, self.b, self.c, self.d, self.e, self.f])
        out = np.empty(12)
        out[0::2] = z.real
        out[1::2] = z.imag
        return out

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "CoeffState":
        z = y[0::2] + 1j * y[1::2]
        return cls(*(complex(v) for v in z))

    @property
    def integrable(self) -> bool:
        """Gaussian integral of W_x converges on this branch."""
        return self.c.real < 0 and self.e.real < 0


@dataclass(frozen=True)
class DriveConstants:
    """Constants entering the coefficient equations, all in rad/s."""

    g_drive: float   # -E_b
    e_drive: float   # E_J / 4
    i_damp: float    # 0 (reversible) or -2|E_b| (irreversible)
    omega: float     # cross-frame frequency
    lam: float       # cross-frame scaling (dimensionless)

    def __post_init__(self):
        if self.i_damp > 0:
            raise ParameterError("positive i_damp (anti-damping) is unphysical")


def make_drive_constants(params: SystemParams, mode: str) -> DriveConstants:
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    return DriveConstants(
        g_drive=-params.e_b,
        e_drive=params.e_j / 4.0,
        i_damp=0.0 if mode == "reversible" else -2.0 * abs(params.e_b),
        omega=params.omega_cross,
        lam=params.lambda_cross,
    )


def initial_coeffs(params: SystemParams) -> CoeffState:
    """Cross-frame vacuum: a = b = d = 0, c = -1/lam, e = -lam, f = ln(1/pi)."""
    lam = params.lambda_cross
    return CoeffState(0.0, 0.0, -1.0 / lam, 0.0, -lam, np.log(1.0 / np.pi))


def derivative(s: CoeffState, k: DriveConstants) -> CoeffState:
    """Right-hand side of the six coefficient equations."""
    g, e_drv, i_damp = k.g_drive, k.e_drive, k.i_damp
    w, lam = k.omega, k.lam
    kk = -i_damp + 1j * e_drv
    da = (w / lam) * s.b + g * s.d + kk / 2 * s.b * s.d
    db = -lam * w * s.a + 2 * g * s.e + kk * s.e * s.b
    dc = (w / lam) * s.d - 1j * e_drv + kk / 4 * s.d * s.d
    dd = -2 * lam * w * s.c + (2 * w / lam) * s.e + kk * s.e * s.d
    de = -lam * w * s.d + kk * s.e * s.e
    df = g * s.b + kk / 4 * (2 * s.e + s.b * s.b)
    return CoeffState(da, db, dc, dd, de, df)


class CoeffTrajectory:
    """Dense solution of one integration run.

    Wraps the adaptive-integrator dense output so observables can sample
    the coefficients at arbitrary times within [0, t_final].
    """

    def __init__(self, params: SystemParams, mode: str, t_grid: np.ndarray, sol):
        self.params = params
        self.mode = mode
        self.times = np.asarray(t_grid, dtype=float)
        self._sol = sol
        self.states = [self.at(t) for t in self.times]

    @property
    def t_final(self) -> float:
        return float(self._sol.t_max)

    def at(self, t: float) -> CoeffState:
        if t < 0 or t > self._sol.t_max * (1 + 1e-12):
            raise ParameterError(f"t={t} outside integrated range [0, {self._sol.t_max}]")
        return CoeffState.from_vector(self._sol(min(t, self._sol.t_max)))

    def sample(self, times: np.ndarray) -> np.ndarray:
        """(6, n) complex array of coefficients at the given times."""
        times = np.asarray(times, dtype=float)
        if times.size and (times.min() < 0 or times.max() > self._sol.t_max * (1 + 1e-12)):
            raise ParameterError("sample times outside integrated range")
        y = self._sol(np.clip(times, 0.0, self._sol.t_max))
        return y[0::2] + 1j * y[1::2]


def integrate(
    params: SystemParams,
    mode: str,
    t_grid: np.ndarray,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> CoeffTrajectory:
    """Integrate the coefficient equations over an ascending grid starting at 0.

    Uses an adaptive embedded Runge-Kutta 4(5) pair with dense output.
    Raises IntegrabilityError (with the offending time) if Re(c) or Re(e)
    crosses zero, i.e. the quadratic form stops being integrable.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0 or t_grid[0] != 0.0:
        raise ParameterError("t_grid must start at 0")
    if np.any(np.diff(t_grid) < 0):
        raise ParameterError("t_grid must be ascending")
    k = make_drive_constants(params, mode)
    y0 = initial_coeffs(params).as_vector()

    def rhs(t, y):
        return derivative(CoeffState.from_vector(y), k).as_vector()

    def integrability(t, y):
        # re(c) and re(e) must stay negative
        return min(-y[4], -y[8])

    integrability.terminal = True
    integrability.direction = -1

    t_final = float(t_grid[-1]) if t_grid[-1] > 0 else 0.0
    if t_final == 0.0:
        # degenerate single-point grid; fabricate a constant solution
        t_final = 1.0e-30
    sol = solve_ivp(
        rhs,
        (0.0, t_final),
        y0,
        method="RK45",
        rtol=rtol,
        atol=atol,
        dense_output=True,
        events=integrability,
    )
    if sol.status == 1:
        raise IntegrabilityError(
            f"coefficients left the integrable branch at t = {sol.t_events[0][0]:.6e} s",
            time=float(sol.t_events[0][0]),
        )
    if not sol.success:
        raise IntegrabilityError(f"integration failed: {sol.message}")
    return CoeffTrajectory(params, mode, t_grid, sol.sol)
