"""Bohmian velocity extraction and ensemble trajectory integration.

Particle velocities come from the probability current, v = j/rho with
j = (hbar/m) Im(psi* dpsi/dx); trajectories integrate dx_i/dt = v(x_i, t)
through a stack of stored snapshots.  Ensemble integration is therefore
pure post-processing: re-running with a different ensemble never
re-solves the wave equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.stats import norm as normal_dist

from .errors import ConfigError, NumericalError
from .params import PhysicalParams

if TYPE_CHECKING:  # pragma: no cover
    from .pde import WavepacketState

# Particles may stray this fraction of the support half-width beyond the
# high-density region before being flagged.
ESCAPE_MARGIN = 0.05


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Particle positions per snapshot; positions[0] equals x0."""

    x0: np.ndarray
    times: np.ndarray
    positions: np.ndarray
    escaped: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.escaped is None:
            object.__setattr__(self, "escaped", np.zeros(len(self.x0), dtype=bool))
        if self.positions.shape != (len(self.times), len(self.x0)):
            raise ConfigError("positions must have shape (n_times, n_particles)")
        if not np.allclose(self.positions[0], self.x0, rtol=0.0, atol=1e-12):
            raise ConfigError("positions[0] must equal the initial positions")
        if not np.all(np.isfinite(self.positions)):
            raise NumericalError("trajectory ensemble contains non-finite positions")


def sample_initial_positions(delta0: float, n: int, scheme: str) -> np.ndarray:
    """Deterministic packet-relative starting offsets.

    "quantile" places particles at the Gaussian quantiles (i-1/2)/n scaled
    by delta0; "symmetric" uses fixed offsets +-k*delta0/2 (plus 0 when n
    is odd).  Both are reproducible by construction.
    """
    if n < 1:
        raise ConfigError(f"ensemble size must be >= 1, got {n}")
    if scheme == "quantile":
        probs = (np.arange(1, n + 1) - 0.5) / n
        return normal_dist.ppf(probs) * delta0
    if scheme == "symmetric":
        half = n // 2
        offsets = [k * delta0 / 2.0 for k in range(1, half + 1)]
        out = [-o for o in reversed(offsets)]
        if n % 2 == 1:
            out.append(0.0)
        out.extend(offsets)
        return np.asarray(out)
    raise ConfigError(f"unknown sampling scheme {scheme!r}")


def velocity_field_numeric(state: "WavepacketState", p: PhysicalParams) -> np.ndarray:
    """Current velocity j/rho on the grid, linearly extrapolated in the tails.

    The spectral derivative keeps v accurate wherever the density is
    meaningful; below the support threshold j/rho is noise-dominated, so
    the field is continued linearly from the edges of the support region
    (exact for Gaussian packets, whose v is linear in x).
    """
    from .pde import _support_interval  # local import avoids a module cycle

    grid = state.grid
    psi = state.psi
    rho = np.abs(psi) ** 2
    dpsi = np.fft.ifft(1j * grid.k * np.fft.fft(psi))
    j = (p.hbar / p.mass) * np.imag(np.conj(psi) * dpsi)
    a, b = _support_interval(rho, grid)
    v = np.empty(grid.n_points)
    v[a : b + 1] = j[a : b + 1] / rho[a : b + 1]
    w = min(8, (b - a + 1) // 2)
    if a > 0:
        sl = slice(a, a + w)
        slope, intercept = np.polyfit(grid.x[sl], v[sl], 1)
        v[:a] = slope * grid.x[:a] + intercept
    if b < grid.n_points - 1:
        sl = slice(b - w + 1, b + 1)
        slope, intercept = np.polyfit(grid.x[sl], v[sl], 1)
        v[b + 1 :] = slope * grid.x[b + 1 :] + intercept
    return v


def _support_bounds(state: "WavepacketState") -> tuple[float, float]:
    from .pde import _support_interval

    a, b = _support_interval(np.abs(state.psi) ** 2, state.grid)
    lo, hi = state.grid.x[a], state.grid.x[b]
    margin = ESCAPE_MARGIN * 0.5 * (hi - lo)
    return lo - margin, hi + margin


def advance_ensemble(
    x0,
    states: Sequence["WavepacketState"],
    p: PhysicalParams,
) -> TrajectoryEnsemble:
    """RK4 trajectory integration through the snapshot stack.

    Velocity fields are interpolated cubically in space and linearly in
    time between consecutive snapshots, so the snapshot interval should
    stay within ~10 wave-equation steps.  A particle that leaves the
    high-density region (plus margin) is flagged in `escaped` but keeps
    integrating on the extrapolated field.
    """
    if len(states) < 2:
        raise ConfigError("trajectory integration needs at least two snapshots")
    x0 = np.asarray(x0, dtype=float)
    times = np.array([s.t for s in states])
    if np.any(np.diff(times) <= 0):
        raise ConfigError("snapshots must be strictly increasing in time")

    grid = states[0].grid
    splines = [CubicSpline(grid.x, velocity_field_numeric(s, p)) for s in states]

    n_times = len(states)
    positions = np.empty((n_times, len(x0)))
    positions[0] = x0
    escaped = np.zeros(len(x0), dtype=bool)
    x = x0.copy()
    for kk in range(n_times - 1):
        h = times[kk + 1] - times[kk]
        va, vb = splines[kk], splines[kk + 1]

        def v_at(xx: np.ndarray, w: float) -> np.ndarray:
            return (1.0 - w) * va(xx) + w * vb(xx)

        k1 = v_at(x, 0.0)
        k2 = v_at(x + 0.5 * h * k1, 0.5)
        k3 = v_at(x + 0.5 * h * k2, 0.5)
        k4 = v_at(x + h * k3, 1.0)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise NumericalError(f"trajectory integration produced non-finite positions at t={times[kk + 1]:.6g}")
        lo, hi = _support_bounds(states[kk + 1])
        escaped |= (x < lo) | (x > hi)
        positions[kk + 1] = x
    return TrajectoryEnsemble(x0=x0, times=times, positions=positions, escaped=escaped)
