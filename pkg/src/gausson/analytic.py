"""Closed-form and semi-exact dynamics of the Gaussian reduction.

For Gaussian initial data the full wave equation collapses onto four
ordinary degrees of freedom: the packet center xbar(t) (damped free
motion), and the width delta(t) governed by

    delta'' + (nu - 2 kappa) delta' + (kappa^2 - kappa nu) delta
        = hbar^2 / (4 m^2 delta^3).

Everything else here (velocity field, Bohmian trajectories, quantum
potential and force, the density itself) is a closed form in those four
variables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bohmian import TrajectoryEnsemble
from .errors import AlignmentError, ParameterError, WidthCollapseError
from .params import PhysicalParams

# Width below which the ODE integration aborts: the 1/delta^3 term is
# singular and collapsing-width regimes carry no physical meaning here.
DELTA_FLOOR = 1e-6

# Default dimensionless RK4 step for the width equation.
WIDTH_STEP = 1e-3


@dataclass(frozen=True)
class GaussonState:
    """Instantaneous Gaussian packet data: center, width, and their rates."""

    t: float
    xbar: float
    xbar_dot: float
    delta: float
    delta_dot: float

    def __post_init__(self):
        if self.delta <= 0:
            raise ParameterError(f"packet width must be positive, got {self.delta}")


@dataclass(frozen=True)
class WidthSeries:
    """Width trace delta(t), delta'(t) on a strictly increasing time grid."""

    times: np.ndarray
    deltas: np.ndarray
    delta_dots: np.ndarray

    def __post_init__(self):
        if not (len(self.times) == len(self.deltas) == len(self.delta_dots)):
            raise ParameterError("width series arrays must share one length")
        if np.any(np.diff(self.times) <= 0):
            raise ParameterError("width series times must be strictly increasing")


def classical_trajectory(p: PhysicalParams, t):
    """Center motion xbar(t), xbar_dot(t) for xbar'' + nu xbar' = 0.

    Vectorized over t.  The nu -> 0 limit is continuous (expm1 keeps the
    drift branch accurate for nu*t down to machine precision).
    """
    t = np.asarray(t, dtype=float)
    if p.nu == 0.0:
        xbar = p.x0 + p.v0 * t
        xbar_dot = np.full_like(t, p.v0)
    else:
        decay = np.exp(-p.nu * t)
        xbar = p.x0 - p.v0 * np.expm1(-p.nu * t) / p.nu
        xbar_dot = p.v0 * decay
    if xbar.ndim == 0:
        return float(xbar), float(xbar_dot)
    return xbar, xbar_dot


def _width_rhs(p: PhysicalParams, y: np.ndarray) -> np.ndarray:
    delta, ddot = y
    quantum = p.hbar**2 / (4.0 * p.mass**2 * delta**3)
    acc = -(p.nu - 2.0 * p.kappa) * ddot - (p.kappa**2 - p.kappa * p.nu) * delta + quantum
    return np.array([ddot, acc])


def _rk4_width_step(p: PhysicalParams, y: np.ndarray, h: float, t_now: float) -> np.ndarray:
    k1 = _width_rhs(p, y)
    k2 = _width_rhs(p, _checked(y + 0.5 * h * k1, t_now))
    k3 = _width_rhs(p, _checked(y + 0.5 * h * k2, t_now))
    k4 = _width_rhs(p, _checked(y + h * k3, t_now))
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _checked(y: np.ndarray, t_now: float) -> np.ndarray:
    if y[0] <= DELTA_FLOOR:
        raise WidthCollapseError(t_now)
    return y


def integrate_width(
    p: PhysicalParams,
    initial: GaussonState,
    t_grid,
    step: float = WIDTH_STEP,
) -> WidthSeries:
    """Fixed-step RK4 solution of the width equation sampled on t_grid.

    Each t_grid interval is subdivided into equal RK4 steps no longer
    than `step`, so the trace is deterministic for a given grid and step.
    Aborts with WidthCollapseError if delta reaches the floor.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0:
        raise ParameterError("t_grid must be a non-empty 1-D array")
    if t_grid[0] < initial.t:
        raise ParameterError("t_grid must start at or after the initial time")
    if np.any(np.diff(t_grid) <= 0):
        raise ParameterError("t_grid must be strictly increasing")

    y = np.array([initial.delta, initial.delta_dot])
    t_now = initial.t
    deltas = np.empty(len(t_grid))
    ddots = np.empty(len(t_grid))
    for i, t_target in enumerate(t_grid):
        span = t_target - t_now
        if span > 0.0:
            n_sub = max(1, int(np.ceil(span / step - 1e-12)))
            h = span / n_sub
            for _ in range(n_sub):
                y = _rk4_width_step(p, _checked(y, t_now), h, t_now)
                t_now += h
            t_now = t_target
        _checked(y, t_now)
        deltas[i] = y[0]
        ddots[i] = y[1]
    return WidthSeries(times=t_grid.copy(), deltas=deltas, delta_dots=ddots)


def stationary_width_residual(p: PhysicalParams, delta: float) -> float:
    """(kappa^2 - kappa nu) delta - hbar^2/(4 m^2 delta^3).

    Zero exactly when kappa is the stationary (Gausson) value for this
    width; the sign tells whether the packet initially spreads (<0) or
    contracts (>0) from rest.
    """
    if delta <= 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    return (p.kappa**2 - p.kappa * p.nu) * delta - p.hbar**2 / (4.0 * p.mass**2 * delta**3)


def bohmian_trajectories_analytic(
    p: PhysicalParams,
    x0i_list,
    width: WidthSeries,
    t_grid,
) -> TrajectoryEnsemble:
    """Closed-form ensemble x_i(t) = xbar(t) + (x0i - xbar0) (delta/delta0) e^{-kappa t}.

    x0i_list holds absolute initial particle positions; times are measured
    from the release of the packet (width.times[0]).  For a stationary
    width the formula reduces to the pure e^{-t/tau_B} convergence law.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    x0 = np.asarray(x0i_list, dtype=float)
    t_release = width.times[0]
    if t_grid.min() < width.times[0] - 1e-12 or t_grid.max() > width.times[-1] + 1e-12:
        raise AlignmentError(
            f"t_grid spans [{t_grid.min():.6g}, {t_grid.max():.6g}] but the "
            f"width series covers [{width.times[0]:.6g}, {width.times[-1]:.6g}]"
        )
    deltas = np.interp(t_grid, width.times, width.deltas)
    xbar, _ = classical_trajectory(p, t_grid)
    xbar0, _ = classical_trajectory(p, t_release)
    offsets = x0 - xbar0
    shrink = (deltas / width.deltas[0]) * np.exp(-p.kappa * (t_grid - t_release))
    positions = xbar[:, None] + offsets[None, :] * shrink[:, None]
    return TrajectoryEnsemble(x0=x0, times=t_grid.copy(), positions=positions)


def velocity_field_analytic(state: GaussonState, kappa: float, x):
    """Hydrodynamic velocity (delta'/delta - kappa)(x - xbar) + xbar'."""
    x = np.asarray(x, dtype=float)
    v = (state.delta_dot / state.delta - kappa) * (x - state.xbar) + state.xbar_dot
    return float(v) if v.ndim == 0 else v


def quantum_potential_gausson(p: PhysicalParams, state: GaussonState, x):
    """Quantum potential of the Gaussian packet, with instantaneous width.

    -hbar^2/(8 m delta^4) (x - xbar)^2 + hbar^2/(4 m delta^2); written for
    delta = delta(t), which reduces to the stationary form when the width
    is constant.
    """
    x = np.asarray(x, dtype=float)
    d2 = state.delta**2
    vqu = (
        -(p.hbar**2) / (8.0 * p.mass * d2 * d2) * (x - state.xbar) ** 2
        + p.hbar**2 / (4.0 * p.mass * d2)
    )
    return float(vqu) if vqu.ndim == 0 else vqu


def quantum_force_gausson(p: PhysicalParams, x0i: float, t, tau_b: float):
    """Force pulling particle i toward the center: hbar^2 x0i e^{-t/tau_B}/(4 m delta0^4)."""
    if tau_b <= 0:
        raise ParameterError(f"tau_b must be positive, got {tau_b}")
    t = np.asarray(t, dtype=float)
    force = p.hbar**2 / (4.0 * p.mass * p.delta0**4) * x0i * np.exp(-t / tau_b)
    return float(force) if force.ndim == 0 else force


def density_gausson(state: GaussonState, x):
    """Normalized Gaussian density with width delta and center xbar."""
    x = np.asarray(x, dtype=float)
    d2 = state.delta**2
    rho = np.exp(-((x - state.xbar) ** 2) / (2.0 * d2)) / np.sqrt(2.0 * np.pi * d2)
    return float(rho) if rho.ndim == 0 else rho
