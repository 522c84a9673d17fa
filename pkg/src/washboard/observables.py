"""Physical outputs: Wigner surfaces, marginals, Pauli expectations and
the Bloch-vector length.

Pauli expectations and the Bloch length use the closed-form Gaussian
integral of the coherence component, never grid quadrature; quadrature is
kept as a cross-check.  The complex square root in the integral is
tracked continuously along the time series (the discriminant 4ce - d^2
can wind around the origin in irreversible mode), so series observables
are computed on an internal dense grid and sampled at the requested
times.

The assembled surface uses population-weighted components,
W_s = (W+ + W-)/4 + Re(W_x)/2 with W+- normalised to unit integral, so
that its integral equals the probability (1 + <sigma_x>)/2 of remaining
in the initial symmetric superposition.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .coeffode import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    CoeffState,
    CoeffTrajectory,
    integrate,
)
from .errors import BranchError, CoverageError, IntegrabilityError, ParameterError
from .gaussian import evolve_diagonal
from .params import SystemParams

_EXP_CLAMP = 500.0
_MAX_PHASE_STEP = 0.45   # rad, between adjacent internal samples
_MAX_INTERNAL = 1 << 21


@dataclass(frozen=True)
class GridSpec:
    """Uniform rectangular grid over (gamma, N)."""

    gamma_min: float
    gamma_max: float
    n_min: float
    n_max: float
    num_gamma: int = 401
    num_n: int = 401

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        if self.gamma_max <= self.gamma_min or self.n_max <= self.n_min:
            raise ParameterError("grid bounds must be ascending")
        if self.num_gamma < 2 or self.num_n < 2:
            raise ParameterError("grids need at least 2 points per axis")
        return (
            np.linspace(self.gamma_min, self.gamma_max, self.num_gamma),
            np.linspace(self.n_min, self.n_max, self.num_n),
        )


@dataclass(frozen=True)
class WignerGrid:
    """Assembled surface on a rectangular grid; values[i, j] is the point
    (gamma_axis[i], n_axis[j])."""

    gamma_axis: np.ndarray
    n_axis: np.ndarray
    values: np.ndarray
    t: float
    metadata: dict = field(default_factory=dict)

    def integral(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.n_axis, axis=1), self.gamma_axis))


@dataclass(frozen=True)
class BlochSeries:
    times: np.ndarray      # seconds
    lengths: np.ndarray
    sx: np.ndarray
    sy: np.ndarray

    def __post_init__(self):
        # symmetric initial state is pure
        if self.times.size and self.times[0] == 0.0 and abs(self.lengths[0] - 1.0) > 1e-9:
            raise ParameterError(
                f"symmetric initial state must have unit Bloch length, got {self.lengths[0]!r}"
            )


def eval_offdiag(s: CoeffState, gamma, n) -> np.ndarray:
    """Coherence component exp(a g + b N + c g^2 + d g N + e N^2 + f).

    The real part of the exponent is clamped (with a warning) to avoid
    overflow on grids that extend far outside the state.
    """
    g = np.asarray(gamma, dtype=float)
    nn = np.asarray(n, dtype=float)
    expo = s.a * g + s.b * nn + s.c * g * g + s.d * g * nn + s.e * nn * nn + s.f
    re = expo.real
    if np.any(re > _EXP_CLAMP):
        warnings.warn(
            f"coherence-component exponent clamped at {_EXP_CLAMP} "
            f"(max was {float(np.max(re)):.1f})",
            stacklevel=2,
        )
        expo = np.minimum(re, _EXP_CLAMP) + 1j * expo.imag
    return np.exp(expo)


def _integral_pieces(coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(discriminant X, exponent f + Y) of the closed-form integral."""
    a, b, c, d, e, f = coeffs
    x = 4 * c * e - d * d
    y = (b * b * c - a * b * d + a * a * e) / (d * d - 4 * c * e)
    return x, f + y


def bloch_length(s: CoeffState) -> float:
    """|integral of W_x| in closed form; branch-free for the modulus."""
    if not s.integrable:
        raise IntegrabilityError("coefficients not on the integrable branch")
    x = 4 * s.c * s.e - s.d * s.d
    y = (s.b * s.b * s.c - s.a * s.b * s.d + s.a * s.a * s.e) / (s.d * s.d - 4 * s.c * s.e)
    return float(2 * np.pi * abs(x) ** -0.5 * np.exp((s.f + y).real))


def _tracked_sqrt(x: np.ndarray) -> np.ndarray:
    """sqrt with the branch continued along the sample sequence.

    Starts on the principal branch at the first sample; raises BranchError
    if adjacent samples jump by more than _MAX_PHASE_STEP radians, which
    signals an unresolvably coarse sampling.
    """
    ang = np.angle(x)
    steps = np.diff(ang)
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    if steps.size and np.max(np.abs(steps)) > np.pi - 0.2:
        raise BranchError("phase steps close to pi cannot be unwrapped reliably")
    unwrapped = np.concatenate([[ang[0]], ang[0] + np.cumsum(steps)])
    return np.abs(x) ** 0.5 * np.exp(0.5j * unwrapped)


def coherence_integral_series(
    traj: CoeffTrajectory, times: np.ndarray
) -> np.ndarray:
    """Complex integral of W_x at the given times, branch tracked.

    Evaluates on an internal dense grid (doubled until the discriminant's
    phase advances by < _MAX_PHASE_STEP per step) and samples the
    requested times from it.
    """
    times = np.asarray(times, dtype=float)
    t_end = traj.t_final
    n_dense = 4096
    while True:
        dense = np.unique(np.concatenate([np.linspace(0.0, t_end, n_dense), times]))
        coeffs = traj.sample(dense)
        x, _ = _integral_pieces(coeffs)
        steps = np.diff(np.angle(x))
        steps = (steps + np.pi) % (2 * np.pi) - np.pi
        if steps.size == 0 or np.max(np.abs(steps)) < _MAX_PHASE_STEP:
            break
        if n_dense >= _MAX_INTERNAL:
            raise BranchError(
                f"discriminant phase still jumps by {np.max(np.abs(steps)):.2f} rad "
                f"at {n_dense} samples"
            )
        n_dense *= 2
    coeffs = traj.sample(dense)
    x, expo = _integral_pieces(coeffs)
    root = _tracked_sqrt(x)
    vals = 2 * np.pi * np.exp(expo) / root
    idx = np.searchsorted(dense, times)
    return vals[idx]


def bloch_series(
    params: SystemParams,
    mode: str,
    times,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    traj: CoeffTrajectory | None = None,
) -> BlochSeries:
    """Bloch length and in-plane Pauli expectations over a time grid."""
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ParameterError("empty time grid")
    grid = times if times[0] == 0.0 else np.concatenate([[0.0], times])
    if traj is None:
        traj = integrate(params, mode, grid, rtol=rtol, atol=atol)
    vals = coherence_integral_series(traj, times)
    return BlochSeries(
        times=times,
        lengths=np.abs(vals),
        sx=vals.real,
        sy=vals.imag,
    )


def pauli_expectations(
    params: SystemParams, mode: str, t: float,
    rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
) -> tuple[float, float, float]:
    """(sx, sy, sz) at time t.

    sz vanishes identically for the symmetric initial state because the
    two diagonal components keep equal populations.
    """
    series = bloch_series(params, mode, np.array([0.0, float(t)]), rtol=rtol, atol=atol)
    return float(series.sx[-1]), float(series.sy[-1]), 0.0


# ---------------------------------------------------------------------------
# surfaces
# ---------------------------------------------------------------------------

def auto_grid_spec(
    params: SystemParams, mode: str, t: float, num: int = 401, pad: float = 6.0
) -> GridSpec:
    """Grid covering both diagonal components out to pad standard deviations."""
    gmin = gmax = nmin = nmax = None
    for branch in ("plus", "minus"):
        st = evolve_diagonal(params, branch, mode, t)
        sg, sn = np.sqrt(st.var_gamma), np.sqrt(st.var_n)
        lo_g, hi_g = st.mean_gamma - pad * sg, st.mean_gamma + pad * sg
        lo_n, hi_n = st.mean_n - pad * sn, st.mean_n + pad * sn
        gmin = lo_g if gmin is None else min(gmin, lo_g)
        gmax = hi_g if gmax is None else max(gmax, hi_g)
        nmin = lo_n if nmin is None else min(nmin, lo_n)
        nmax = hi_n if nmax is None else max(nmax, hi_n)
    return GridSpec(gmin, gmax, nmin, nmax, num, num)


def _check_coverage(params: SystemParams, mode: str, t: float, spec: GridSpec) -> None:
    required = auto_grid_spec(params, mode, t, num=2, pad=5.0)
    if (
        spec.gamma_min > required.gamma_min
        or spec.gamma_max < required.gamma_max
        or spec.n_min > required.n_min
        or spec.n_max < required.n_max
    ):
        raise CoverageError(
            "grid does not cover 5 sigma of both components; required at least "
            f"gamma in [{required.gamma_min:.4g}, {required.gamma_max:.4g}], "
            f"N in [{required.n_min:.4g}, {required.n_max:.4g}]"
        )


def assemble_ws(
    params: SystemParams,
    mode: str,
    t: float,
    grid_spec: GridSpec | None = None,
    coeffs: CoeffState | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> WignerGrid:
    """Assembled Wigner surface at time t.

    The coherence coefficients are integrated on demand unless supplied.
    The grid must cover at least 5 sigma of both diagonal components.
    """
    if grid_spec is None:
        grid_spec = auto_grid_spec(params, mode, t)
    else:
        _check_coverage(params, mode, t, grid_spec)
    g_ax, n_ax = grid_spec.axes()
    gg, nn = np.meshgrid(g_ax, n_ax, indexing="ij")
    if coeffs is None:
        coeffs = integrate(params, mode, np.array([0.0, t]), rtol=rtol, atol=atol).at(t)
    w_plus = evolve_diagonal(params, "plus", mode, t).density(gg, nn)
    w_minus = evolve_diagonal(params, "minus", mode, t).density(gg, nn)
    w_cross = eval_offdiag(coeffs, gg, nn)
    values = 0.25 * (w_plus + w_minus) + 0.5 * w_cross.real
    meta = {
        "t_s": t,
        "mode": mode,
        "e_b_rads": params.e_b,
        "mu": params.mu,
        "nu": params.nu,
    }
    return WignerGrid(gamma_axis=g_ax, n_axis=n_ax, values=values, t=t, metadata=meta)


def marginal(grid: WignerGrid, axis: str) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the surface over the other coordinate.

    Returns (axis_values, density); the density of a physical surface is
    nonnegative up to quadrature error.
    """
    if axis == "gamma":
        return grid.gamma_axis, np.trapezoid(grid.values, grid.n_axis, axis=1)
    if axis == "n":
        return grid.n_axis, np.trapezoid(grid.values, grid.gamma_axis, axis=0)
    raise ParameterError(f"axis must be 'gamma' or 'n', got {axis!r}")
