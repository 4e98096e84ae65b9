"""Observable extraction and solver cross-checks.

Expectations use the trapezoid rule on the periodic grid (a plain
rectangle sum there, spectrally consistent with the kinetic step);
momentum and kinetic energy go through spectral derivatives.  The
continuity residual certifies that stored snapshot pairs satisfy the
transport law with the measurement sink,

    d rho/dt + d(rho v)/dx + 2 kappa (ln rho - <ln rho>) rho = 0,

to second order; the factor 2 is what the density inherits from a
multiplicative rate on the amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analytic import WidthSeries
from .errors import AlignmentError, ConfigError
from .params import PhysicalParams
from .pde import DENSITY_FLOOR, WavepacketState, unwrap_phase

# Fit window (in dimensionless time units from the first record) for the
# momentum-decay exponent; fixed for reproducibility.
P_FIT_WINDOW = 2.0

OBSERVABLE_KINDS = ("position", "momentum", "kinetic_energy", "ln_rho", "phase_S")


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-snapshot observables emitted as one CSV row."""

    t: float
    norm: float
    mean_x: float
    mean_p: float
    width: float
    mean_ln_rho: float
    mean_S: float
    energy: float
    continuity_residual_norm: float
    gaussianity: float


def _rho_mean(field_values: np.ndarray, rho: np.ndarray, dx: float) -> float:
    return float(np.sum(field_values * rho) * dx)


def _spectral_dx(psi: np.ndarray, k: np.ndarray) -> np.ndarray:
    return np.fft.ifft(1j * k * np.fft.fft(psi))


def expectation(state: WavepacketState, observable_kind: str, p: PhysicalParams) -> float:
    """Expectation value of one of the supported observables."""
    grid = state.grid
    rho = state.density()
    if observable_kind == "position":
        return _rho_mean(grid.x, rho, grid.dx)
    if observable_kind == "momentum":
        dpsi = _spectral_dx(state.psi, grid.k)
        return float(p.hbar * np.sum(np.imag(np.conj(state.psi) * dpsi)) * grid.dx)
    if observable_kind == "kinetic_energy":
        dpsi = _spectral_dx(state.psi, grid.k)
        return float(p.hbar**2 / (2.0 * p.mass) * np.sum(np.abs(dpsi) ** 2) * grid.dx)
    if observable_kind == "ln_rho":
        ln_rho = np.log(np.maximum(rho, DENSITY_FLOOR))
        return _rho_mean(ln_rho, rho, grid.dx)
    if observable_kind == "phase_S":
        return p.hbar * _rho_mean(unwrap_phase(state), rho, grid.dx)
    raise ConfigError(f"unknown observable kind {observable_kind!r}")


def measured_width(state: WavepacketState) -> float:
    """Square root of the second central moment of |psi|^2."""
    grid = state.grid
    rho = state.density()
    n = float(np.sum(rho) * grid.dx)
    mean = float(np.sum(grid.x * rho) * grid.dx) / n
    var = float(np.sum((grid.x - mean) ** 2 * rho) * grid.dx) / n
    return math.sqrt(var)


def excess_kurtosis(state: WavepacketState) -> float:
    """Fourth-moment Gaussianity check: 0 for an exact Gaussian."""
    grid = state.grid
    rho = state.density()
    n = float(np.sum(rho) * grid.dx)
    mean = float(np.sum(grid.x * rho) * grid.dx) / n
    u = grid.x - mean
    m2 = float(np.sum(u**2 * rho) * grid.dx) / n
    m4 = float(np.sum(u**4 * rho) * grid.dx) / n
    return m4 / m2**2 - 3.0


def continuity_residual(
    state_prev: WavepacketState,
    state_next: WavepacketState,
    p: PhysicalParams,
) -> tuple[np.ndarray, float]:
    """Discrete transport residual from a snapshot pair, and its norm.

    Centered at the midpoint of the pair: d(rho)/dt by finite difference,
    flux divergence and sink averaged between the two snapshots.  Returns
    (residual field, density-weighted L2 norm); both shrink ~4x when dx
    and dt are halved.
    """
    grid = state_prev.grid
    if state_next.grid is not grid and (
        state_next.grid.n_points != grid.n_points
        or state_next.grid.x_min != grid.x_min
        or state_next.grid.x_max != grid.x_max
    ):
        raise AlignmentError("snapshot pair lives on different grids")
    dt_pair = state_next.t - state_prev.t
    if dt_pair <= 0:
        raise AlignmentError("snapshots must be ordered in time")

    def flux_div(state: WavepacketState) -> np.ndarray:
        dpsi = _spectral_dx(state.psi, grid.k)
        j = (p.hbar / p.mass) * np.imag(np.conj(state.psi) * dpsi)
        return np.real(_spectral_dx(j, grid.k))

    def sink(state: WavepacketState) -> np.ndarray:
        rho = state.density()
        ln_rho = np.log(np.maximum(rho, DENSITY_FLOOR))
        centered = ln_rho - _rho_mean(ln_rho, rho, grid.dx)
        return 2.0 * p.kappa * centered * rho

    rho_prev = state_prev.density()
    rho_next = state_next.density()
    rho_t = (rho_next - rho_prev) / dt_pair
    residual = (
        rho_t
        + 0.5 * (flux_div(state_prev) + flux_div(state_next))
        + 0.5 * (sink(state_prev) + sink(state_next))
    )
    rho_mid = 0.5 * (rho_prev + rho_next)
    norm = math.sqrt(float(np.sum(residual**2 * rho_mid) * grid.dx))
    return residual, norm


def diagnostics_series(
    states: Sequence[WavepacketState],
    p: PhysicalParams,
) -> list[DiagnosticsRecord]:
    """One record per snapshot; the residual column uses adjacent pairs.

    The first record has no preceding snapshot, so its residual is NaN.
    """
    records = []
    for i, s in enumerate(states):
        if i == 0:
            res_norm = float("nan")
        else:
            _, res_norm = continuity_residual(states[i - 1], s, p)
        records.append(
            DiagnosticsRecord(
                t=s.t,
                norm=s.norm(),
                mean_x=expectation(s, "position", p),
                mean_p=expectation(s, "momentum", p),
                width=measured_width(s),
                mean_ln_rho=expectation(s, "ln_rho", p),
                mean_S=expectation(s, "phase_S", p),
                energy=expectation(s, "kinetic_energy", p),
                continuity_residual_norm=res_norm,
                gaussianity=excess_kurtosis(s),
            )
        )
    return records


@dataclass(frozen=True)
class ComparisonReport:
    """Machine-readable cross-validation of a wave run against closed forms."""

    times: np.ndarray
    width_rel_errors: np.ndarray
    max_width_rel_error: float
    max_norm_drift_per_time: float
    max_gaussianity: float
    p_fit_exponent: float
    p_fit_target: float
    trajectory_max_abs_error: float = field(default=float("nan"))

    def to_dict(self) -> dict:
        return {
            "max_width_rel_error": self.max_width_rel_error,
            "max_norm_drift_per_time": self.max_norm_drift_per_time,
            "max_gaussianity": self.max_gaussianity,
            "p_fit_exponent": self.p_fit_exponent,
            "p_fit_target": self.p_fit_target,
            "trajectory_max_abs_error": self.trajectory_max_abs_error,
        }


def fit_momentum_exponent(times: np.ndarray, mean_p: np.ndarray) -> float:
    """Least-squares slope of ln|<p>| over the fixed fit window.

    NaN when the momentum is numerically zero (nothing to fit).
    """
    times = np.asarray(times, dtype=float)
    mean_p = np.asarray(mean_p, dtype=float)
    window = times <= times[0] + P_FIT_WINDOW + 1e-12
    tt = times[window]
    pp = np.abs(mean_p[window])
    if np.any(pp < 1e-300) or pp.max() < 1e-14:
        return float("nan")
    slope = np.polyfit(tt, np.log(pp), 1)[0]
    return float(slope)


def compare_runs(
    pde_series: Sequence[DiagnosticsRecord],
    analytic_series: WidthSeries,
    p: PhysicalParams,
    trajectories_numeric=None,
    trajectories_analytic=None,
) -> ComparisonReport:
    """Per-time width errors, momentum-decay fit, optional trajectory errors."""
    times = np.array([r.t for r in pde_series])
    if len(times) != len(analytic_series.times) or not np.allclose(
        times, analytic_series.times, rtol=0.0, atol=1e-9
    ):
        raise AlignmentError("wave-run and width-series time stamps differ")
    widths = np.array([r.width for r in pde_series])
    width_err = np.abs(widths - analytic_series.deltas) / analytic_series.deltas

    norms = np.array([r.norm for r in pde_series])
    span = max(times[-1] - times[0], 1e-300)
    norm_drift = float(np.max(np.abs(norms - 1.0))) / span

    mean_p = np.array([r.mean_p for r in pde_series])
    exponent = fit_momentum_exponent(times, mean_p)

    traj_err = float("nan")
    if trajectories_numeric is not None and trajectories_analytic is not None:
        if not np.allclose(
            trajectories_numeric.times, trajectories_analytic.times, rtol=0.0, atol=1e-9
        ):
            raise AlignmentError("trajectory ensembles have different time stamps")
        traj_err = float(
            np.max(np.abs(trajectories_numeric.positions - trajectories_analytic.positions))
        )

    return ComparisonReport(
        times=times,
        width_rel_errors=width_err,
        max_width_rel_error=float(width_err.max()),
        max_norm_drift_per_time=norm_drift,
        max_gaussianity=float(max(abs(r.gaussianity) for r in pde_series)),
        p_fit_exponent=exponent,
        p_fit_target=-p.nu,
        trajectory_max_abs_error=traj_err,
    )
