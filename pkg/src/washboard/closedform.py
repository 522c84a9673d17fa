"""Independent closed-form oracles for the coherence component.

Two routes cross-check the numerical coefficient integration:

* moment route: both conditioned branch wavefunctions stay Gaussian, so
  their means and complex width parameters follow elementary formulas in
  the cross frame; the coherence component is then assembled from the two
  branches.  Includes the relative dynamical phase between the branches,
  which the width/mean formulas alone do not carry (it is the integral of
  the branch zero-point energy difference plus the drive work, both in
  closed form).
* resolvent route: after a symmetrising change of variables the quadratic
  coefficients reduce to a single scalar ratio P that satisfies a linear
  fourth-order ODE with constant coefficients, hence is a sum of four
  exponentials.  In reversible mode the initial state sits exactly on the
  pole of P (the quantity S = (4ce - d^2)/16 is conserved at the pole
  value), so the closed form is refused there and a direct numerical
  integration of the transformed variables is used instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .coeffode import CoeffState, DriveConstants, initial_coeffs, make_drive_constants
from .errors import ParameterError, PoleError, RegimeError
from .params import SystemParams

_POLE_TOL = 1e-10


# ---------------------------------------------------------------------------
# moment route
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussMoments:
    """Mean and width of one branch wavefunction in the cross frame."""

    mean_gamma: float
    mean_n: float
    sigma: complex        # complex width, Re sigma = 1/(2 var_gamma)
    var_gamma: float
    phase: float          # accumulated global phase (rad)


def _branch_constants(params: SystemParams, sign: int):
    """(omega, chi, eps, Omega) of the branch-conditioned oscillator."""
    w = params.omega_cross
    chi = params.e_j * params.lambda_cross / 16.0
    eps = -params.e_b * params.gamma_cross
    om2 = w * w + sign * 4 * w * chi
    if om2 <= 0:
        raise RegimeError(
            f"omega^2 {'+' if sign > 0 else '-'} 4 omega chi = {om2:.4e} <= 0: "
            "inverted effective well"
        )
    return w, chi, eps, np.sqrt(om2)


def _continuous_atan(ratio: float, x) -> np.ndarray:
    """Continuous extension of atan(ratio * tan(x)) across tan poles."""
    x = np.asarray(x, dtype=float)
    k = np.floor(x / np.pi + 0.5)
    return k * np.pi + np.arctan(ratio * np.tan(x - k * np.pi))


def _branch_phase(params: SystemParams, sign: int, t) -> np.ndarray:
    """Global wavefunction phase of one branch (closed form).

    d(phase)/dt = -2 E_C0 Re(sigma) + E_b <gamma>; both pieces integrate
    to elementary functions.  For chi = 0 this reduces to the oscillator
    zero-point phase -omega t / 2.
    """
    w, chi, eps, om = _branch_constants(params, sign)
    t = np.asarray(t, dtype=float)
    ratio = np.sqrt(w / (w + sign * 4 * chi))
    int_sigma1 = _continuous_atan(ratio, om * t) / (params.lambda_cross * w)
    lam = params.lambda_cross
    int_gamma = np.sqrt(2 * lam) * eps * (np.sin(om * t) / om - t) / (w + sign * 4 * chi)
    return -2 * params.e_c0 * int_sigma1 + params.e_b * int_gamma


def moments_reversible(params: SystemParams, branch: str, t: float) -> GaussMoments:
    """Closed-form branch moments at time t (reversible evolution)."""
    if branch not in ("plus", "minus"):
        raise ParameterError(f"branch must be 'plus' or 'minus', got {branch!r}")
    sign = +1 if branch == "plus" else -1
    w, chi, eps, om = _branch_constants(params, sign)
    lam = params.lambda_cross
    cos_t, sin_t = np.cos(om * t), np.sin(om * t)
    cos2, sin2 = np.cos(2 * om * t), np.sin(2 * om * t)
    mean_g = np.sqrt(2 * lam) * eps * (cos_t - 1) / (w + sign * 4 * chi)
    mean_n = -np.sqrt(2) * eps * sin_t / np.sqrt(lam * om * om)
    sigma = (w * w + sign * 2 * chi * (2 * w + 1j * om * sin2)) / (
        lam * w * (w + sign * 2 * chi * (1 + cos2))
    )
    var_g = lam * (w + sign * 2 * chi * (1 + cos2)) / (2 * (w + sign * 4 * chi))
    return GaussMoments(
        mean_gamma=float(mean_g),
        mean_n=float(mean_n),
        sigma=complex(sigma),
        var_gamma=float(var_g),
        phase=float(_branch_phase(params, sign, t)),
    )


def offdiag_closedform(params: SystemParams, t: float) -> CoeffState:
    """Coherence-component coefficients assembled from the two branches.

    Normalised so that at t = 0 this reproduces initial_coeffs exactly
    (a = b = d = 0, c = -1/lam, e = -lam, f = ln(1/pi)).
    """
    mp = moments_reversible(params, "plus", t)
    mm = moments_reversible(params, "minus", t)
    sp = mp.sigma
    smc = np.conj(mm.sigma)
    gp, gm = mp.mean_gamma, mm.mean_gamma
    np_, nm = mp.mean_n, mm.mean_n
    ssum = sp + smc
    if abs(ssum) < 1e-300:
        raise RegimeError("degenerate width denominator sigma_plus + conj(sigma_minus) = 0")

    theta0 = 1j * np_ + 1j * nm + sp * gp - smc * gm
    a = theta0 * (smc - sp) / ssum + 1j * (np_ - nm) + sp * gp + smc * gm
    b = (2 * (np_ + nm) - 2j * sp * gp + 2j * smc * gm) / ssum
    c = -sp / 2 - smc / 2 + (sp - smc) ** 2 / (2 * ssum)
    d = 2j * (sp - smc) / ssum
    e = -2 / ssum
    f = (
        np.log(4.0 / (np.pi * np.sqrt(ssum) * (mp.var_gamma * mm.var_gamma) ** 0.25))
        - 0.5j * (np_ * gp - nm * gm)
        - sp * gp**2 / 2
        - smc * gm**2 / 2
        + theta0**2 / (2 * ssum)
        - np.log(4.0)                      # unit-trace normalisation anchor
        + 0.5j * (mp.phase - mm.phase)     # relative dynamical phase
    )
    return CoeffState(complex(a), complex(b), complex(c), complex(d), complex(e), complex(f))


# ---------------------------------------------------------------------------
# resolvent route
# ---------------------------------------------------------------------------

def _symmetric_initials(params: SystemParams) -> tuple[complex, complex, complex]:
    """(z, zbar, u) of the initial vacuum in the symmetrised scaling."""
    s0 = initial_coeffs(params)
    lam = params.lambda_cross
    ct, et, dt = lam * s0.c, s0.e / lam, s0.d
    z0 = (dt + 1j * (ct - et)) / 4j
    zb0 = (dt - 1j * (ct - et)) / 4j
    u0 = (ct + et) / 4
    return complex(z0), complex(zb0), complex(u0)


def resolvent_rates(k: DriveConstants) -> tuple[complex, complex]:
    """Eigenrates of the quartic resolvent ODE.

    Pure imaginary when i_damp = 0 (oscillatory regime holds whenever
    lam * e_drive < omega, which the vacuum scalings guarantee by a wide
    margin for weak qubit coupling).
    """
    w, lam = k.omega, k.lam
    kk = -k.i_damp + 1j * k.e_drive
    disc = np.sqrt(w * w + 1j * lam * lam * k.e_drive * kk + 0j)
    lam1 = np.sqrt(-2 * w * w + 2 * w * disc + 0j)
    lam2 = np.sqrt(-2 * w * w - 2 * w * disc + 0j)
    return complex(lam1), complex(lam2)


@dataclass(frozen=True)
class ResolventSolution:
    """Closed-form resolvent P(t) = sum of four exponentials."""

    lambda1: complex
    lambda2: complex
    c1: complex
    c2: complex
    c3: complex
    c4: complex
    pole: complex      # the invariant value of S at which P diverges
    kappa: complex     # lam * (-i_damp + i e_drive)
    omega: float
    lam: float
    g_drive: float

    def _terms(self, t):
        t = np.asarray(t, dtype=float)
        rates = (self.lambda1, -self.lambda1, self.lambda2, -self.lambda2)
        amps = (self.c1, self.c2, self.c3, self.c4)
        return amps, rates, [np.exp(r * t) for r in rates]

    def p(self, t, order: int = 0) -> np.ndarray:
        """P(t) or its time derivative of the given order."""
        amps, rates, exps = self._terms(t)
        return sum(a * r**order * ex for a, r, ex in zip(amps, rates, exps))


def resolvent(params: SystemParams, mode: str) -> ResolventSolution:
    """Closed-form resolvent for the quadratic coefficients.

    Refused in reversible mode: there S = (4ce - d^2)/16 is conserved at
    exactly the pole value of P (equivalently, the printed amplitudes
    carry a 1/i_damp factor), so P is identically singular and carries no
    information; use quadratic_coeffs, which integrates the transformed
    variables directly instead.
    """
    k = make_drive_constants(params, mode)
    if k.i_damp == 0.0:
        raise RegimeError(
            "resolvent is singular for i_damp = 0: the reversible flow conserves "
            "S = (4ce - d^2)/16 at the pole value of P"
        )
    kk = -k.i_damp + 1j * k.e_drive
    kap = k.lam * kk
    qt = 1j * k.e_drive / (4 * kk)
    z0, zb0, u0 = _symmetric_initials(params)
    s0 = z0 * zb0 + u0 * u0
    v0 = s0 - qt
    if abs(v0) < _POLE_TOL:
        raise PoleError("initial condition sits on the resolvent pole", time=0.0)
    g0 = z0 - zb0 - 2 * u0
    h0 = z0 + zb0
    w = k.omega
    p0 = (s0 + qt) / v0
    dp0 = 2 * kap * qt * g0 / v0
    d2p0 = 4j * w * kap * qt * h0 / v0
    d3p0 = -8 * w * w * kap * qt * (z0 - zb0) / v0
    lam1, lam2 = resolvent_rates(k)
    a = np.array(
        [
            [1, 1, 1, 1],
            [lam1, -lam1, lam2, -lam2],
            [lam1**2, lam1**2, lam2**2, lam2**2],
            [lam1**3, -lam1**3, lam2**3, -lam2**3],
        ],
        dtype=complex,
    )
    c1, c2, c3, c4 = np.linalg.solve(a, np.array([p0, dp0, d2p0, d3p0]))
    return ResolventSolution(
        lambda1=lam1,
        lambda2=lam2,
        c1=complex(c1),
        c2=complex(c2),
        c3=complex(c3),
        c4=complex(c4),
        pole=complex(qt),
        kappa=complex(kap),
        omega=w,
        lam=k.lam,
        g_drive=k.g_drive,
    )


def _z_system_coeffs(params: SystemParams, mode: str, times: np.ndarray, rtol=1e-11, atol=1e-13):
    """(c, d, e) via direct integration of the transformed variables."""
    k = make_drive_constants(params, mode)
    kk = -k.i_damp + 1j * k.e_drive
    kap = k.lam * kk
    e4 = k.lam * k.e_drive / 4.0
    w = k.omega
    z0, zb0, u0 = _symmetric_initials(params)

    def rhs(t, y):
        z = y[0] + 1j * y[1]
        zb = y[2] + 1j * y[3]
        u = y[4] + 1j * y[5]
        dz = 2j * w * z - kap * (z - u) ** 2 - 1j * e4
        dzb = -2j * w * zb + kap * (zb + u) ** 2 + 1j * e4
        du = -kap * (z - u) * (zb + u) - 1j * e4
        return [dz.real, dz.imag, dzb.real, dzb.imag, du.real, du.imag]

    y0 = [z0.real, z0.imag, zb0.real, zb0.imag, u0.real, u0.imag]
    t_end = float(np.max(times)) if np.max(times) > 0 else 1e-30
    sol = solve_ivp(rhs, (0.0, t_end), y0, rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise RegimeError(f"transformed-variable integration failed: {sol.message}")
    y = sol.sol(np.clip(times, 0.0, t_end))
    z = y[0] + 1j * y[1]
    zb = y[2] + 1j * y[3]
    u = y[4] + 1j * y[5]
    ct = (z - zb) + 2 * u
    et = 2 * u - (z - zb)
    dt = 2j * (z + zb)
    lam = k.lam
    return ct / lam, dt, lam * et


def quadratic_coeffs(params: SystemParams, mode: str, times) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(c, d, e) over the given times from the resolvent route.

    Irreversible mode evaluates the closed form; reversible mode falls
    back to numerical integration of the transformed variables (see
    resolvent for why).  Raises PoleError if the closed form is evaluated
    within _POLE_TOL of a pole of the back-substitution.
    """
    times = np.asarray(times, dtype=float)
    if mode == "reversible":
        return _z_system_coeffs(params, mode, times)
    sol = resolvent(params, mode)
    p = sol.p(times)
    one_minus = 1.0 - p
    bad = np.abs(one_minus) < _POLE_TOL
    if np.any(bad):
        t_bad = float(times[np.argmax(bad)])
        raise PoleError(f"|1 - P| < {_POLE_TOL} at t = {t_bad:.6e} s", time=t_bad)
    dp = sol.p(times, 1)
    d2p = sol.p(times, 2)
    d3p = sol.p(times, 3)
    w, kap, lam = sol.omega, sol.kappa, sol.lam
    ct = (d3p + 2 * w * w * dp) / (2 * w * w * kap * one_minus)
    dt = -d2p / (w * kap * one_minus)
    et = dp / (kap * one_minus)
    return ct / lam, dt, lam * et


def linear_coeffs(params: SystemParams, mode: str, times, g_scale: float = 1.0,
                  rtol: float = 1e-11, atol: float = 1e-13) -> tuple[np.ndarray, np.ndarray]:
    """(a, b) over the given times via the forced-oscillator reconstruction.

    The pair (a, b) obeys a driven linear system whose homogeneous part is
    parametrically excited by the resolvent; with W the reduced unknown,
    W'' + [omega^2 + 2 Q''/Q - (Q'/Q)^2] W = forcing * g_drive, Q^2 = 1 - P.
    Both start at zero and scale linearly with the drive (g_scale doubles
    them).  Requires the closed-form resolvent, hence irreversible mode;
    with no drive the result is identically zero in either mode.
    """
    times = np.asarray(times, dtype=float)
    k = make_drive_constants(params, mode)
    if k.g_drive == 0.0 or g_scale == 0.0:
        return np.zeros(times.shape, complex), np.zeros(times.shape, complex)
    if mode == "reversible":
        raise RegimeError("linear-coefficient reconstruction needs the resolvent; "
                          "it is singular in reversible mode")
    sol = resolvent(params, mode)
    w, kap, lam = sol.omega, sol.kappa, sol.lam
    gt = np.sqrt(lam) * k.g_drive * g_scale

    def pieces(t):
        p = sol.p(t)
        dp = sol.p(t, 1)
        d2p = sol.p(t, 2)
        om_p = 1.0 - p
        r = -dp / (2 * om_p)                      # Q'/Q
        dr = -d2p / (2 * om_p) - dp**2 / (2 * om_p**2)
        qq = dr + r * r                           # Q''/Q
        return p, om_p, r, qq

    p0, om_p0, r0, _ = pieces(0.0)
    q0 = np.sqrt(om_p0 + 0j)
    w0 = -2 * gt * p0 / (kap * q0)

    def rhs(t, y):
        wv = y[0] + 1j * y[1]
        dwv = y[2] + 1j * y[3]
        qv = y[4] + 1j * y[5]
        p, om_p, r, qq = pieces(t)
        force = -(2 * gt / kap) * (p * w * w + qq + r * r) / qv
        d2w = force - (w * w + 2 * qq - r * r) * wv
        dq = r * qv
        return [dwv.real, dwv.imag, d2w.real, d2w.imag, dq.real, dq.imag]

    y0 = [w0.real, w0.imag, (-r0 * w0).real, (-r0 * w0).imag, q0.real, q0.imag]
    t_end = float(np.max(times)) if np.max(times) > 0 else 1e-30
    ivp = solve_ivp(rhs, (0.0, t_end), y0, rtol=rtol, atol=atol, dense_output=True)
    if not ivp.success:
        raise RegimeError(f"forced-oscillator integration failed: {ivp.message}")
    y = ivp.sol(np.clip(times, 0.0, t_end))
    wv = y[0] + 1j * y[1]
    dwv = y[2] + 1j * y[3]
    qv = y[4] + 1j * y[5]
    p = sol.p(times)
    dp = sol.p(times, 1)
    om_p = 1.0 - p
    r = -dp / (2 * om_p)
    b_t = (qv * wv + (2 * gt / kap) * p) / om_p
    a_t = -qv * (r * wv + dwv) / (w * om_p)
    return a_t / np.sqrt(lam), b_t * np.sqrt(lam)
