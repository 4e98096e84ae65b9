"""Split-step evolution of the logarithmic nonlinear wave equation.

The equation combines free kinetics with two multiplicative logarithmic
terms: a real measurement term

    W_c = -kappa (ln|psi|^2 - <ln|psi|^2>)

that acts as a density sink/source localizing the packet, and an
imaginary friction term proportional to the centered unwrapped phase
that damps the mean momentum.  The friction sign is fixed by the
requirement d<p>/dt = -nu <p>; the opposite sign anti-damps.

Time stepping is Strang splitting: a half-step multiplicative update
with W_c, W_f frozen at the current state, the exact free propagator in
Fourier space, then a second half-step with both terms re-evaluated.
Each multiplicative half-step rescales the state back to unit norm; the
subtraction constants inside W_c and W_f are defined only up to the
requirement that the norm (and the global phase) stay fixed, and the
rescaling pins that constant at finite dt.  Without it the frozen
exponential injects norm at O(dt^2 <W_c^2>) per step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .analytic import GaussonState
from .errors import (
    BoundaryTouchError,
    ConfigError,
    InstabilityError,
    ParameterError,
    PhaseUnwrapError,
)
from .params import PhysicalParams

# Floor applied inside ln(rho): rho*ln(rho) -> 0, so nodes at the floor
# contribute <= ~1e-28 to any density-weighted integral.
DENSITY_FLOOR = 1e-30

# Relative density threshold defining the high-density (support) region
# used for phase unwrapping and velocity extraction.
SUPPORT_REL = 1e-12

# Hard limit on |psi|^2 at the two outermost grid cells; beyond this the
# periodic images start to interact and the run is unusable.
BOUNDARY_DENSITY_MAX = 1e-10

# Initial packets must fit with this many widths of clearance.
SUPPORT_SIGMA = 6.0

# Norm tolerance checked after every step (post-rescaling, so only NaN,
# Inf, or FFT breakdown can trip it).
STEP_NORM_TOL = 1e-6


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid and the fixed time step used on it."""

    x_min: float
    x_max: float
    n_points: int
    dt: float

    def __post_init__(self):
        if self.x_max <= self.x_min:
            raise ConfigError("x_max must exceed x_min")
        n = self.n_points
        if n < 64 or (n & (n - 1)) != 0:
            raise ConfigError(f"n_points must be a power of two >= 64, got {n}")
        if self.dt <= 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")

    @cached_property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        # periodic grid: x_max is the image of x_min and is not stored
        return self.x_min + self.dx * np.arange(self.n_points)

    @cached_property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)


@dataclass(frozen=True)
class WavepacketState:
    """Complex amplitudes on a grid at one time stamp."""

    t: float
    psi: np.ndarray
    grid: Grid

    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dx)


def init_gaussian(grid: Grid, p: PhysicalParams, initial: GaussonState) -> WavepacketState:
    """Gaussian packet with the quadratic phase matching its width rate.

    The phase S = (m/2)(delta'/delta - kappa)(x-xbar)^2 + m v (x-xbar) is
    what makes a Gausson stationary: a purely real Gaussian is not a
    fixed point unless kappa = 0.
    """
    lo = initial.xbar - SUPPORT_SIGMA * initial.delta
    hi = initial.xbar + SUPPORT_SIGMA * initial.delta
    if lo < grid.x_min or hi > grid.x_max:
        raise ConfigError(
            f"packet support [{lo:.3g}, {hi:.3g}] does not fit inside "
            f"[{grid.x_min:.3g}, {grid.x_max:.3g}]; enlarge the domain"
        )
    u = grid.x - initial.xbar
    amp = (2.0 * np.pi * initial.delta**2) ** -0.25 * np.exp(-(u**2) / (4.0 * initial.delta**2))
    curvature = 0.5 * p.mass * (initial.delta_dot / initial.delta - p.kappa)
    phase = (curvature * u**2 + p.mass * initial.xbar_dot * u) / p.hbar
    psi = amp * np.exp(1j * phase)
    psi = psi / np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    return WavepacketState(t=initial.t, psi=psi, grid=grid)


# Support region half-width in units of the measured packet width; the
# Gaussian density at 7.5 sigma is ~6e-13 of the peak (cf. SUPPORT_REL).
MASK_SIGMA = 7.5

# Width, in ln(rho) units, of the sigmoid that switches the logarithmic
# terms off below SUPPORT_REL of the peak density.
GAIN_LN_WIDTH = 2.0

# Relative density level at which a second packet counts as real rather
# than tail noise.
SPLIT_REL = 1e-6


def _check_single_packet(rho: np.ndarray) -> None:
    significant = np.nonzero(rho >= SPLIT_REL * rho.max())[0]
    if np.any(np.diff(significant) != 1):
        raise PhaseUnwrapError(
            "high-density region is not contiguous; the dynamics assumes a "
            "single Gaussian packet"
        )


def _moments(rho: np.ndarray, grid: Grid) -> tuple[float, float]:
    m0 = float(np.sum(rho))
    mean = float(np.sum(grid.x * rho)) / m0
    var = float(np.sum((grid.x - mean) ** 2 * rho)) / m0
    return mean, np.sqrt(var)


def _support_interval(rho: np.ndarray, grid: Grid) -> tuple[int, int]:
    """Indices [a, b] of the high-density region around the packet.

    Geometric, +- MASK_SIGMA measured widths around the measured center:
    dispersive ripples in the far tail can never drag it outward, while
    a density-threshold interval would chase amplified roundoff.
    """
    _check_single_packet(rho)
    mean, sigma = _moments(rho, grid)
    half = MASK_SIGMA * sigma
    a = int(np.searchsorted(grid.x, mean - half, side="left"))
    b = int(np.searchsorted(grid.x, mean + half, side="right")) - 1
    return max(a, 0), min(b, len(rho) - 1)


def _gain_window(ln_rho: np.ndarray, rho_max: float) -> np.ndarray:
    """Sigmoid in ln(rho) switching the logarithmic terms off in the tail.

    The log terms are gain terms: on the coherent packet the gain is
    balanced by transport, but on tail nodes whose density is roundoff
    junk (no coherent phase, no transport) the same gain relaxes ln(rho)
    straight up toward <ln rho>, i.e. amplifies noise to bulk level.
    Gating on the density itself keeps the balance exact wherever the
    packet genuinely lives and suppresses gain double-exponentially
    below the support threshold; being smooth in ln(rho) (quadratic in x
    for a Gaussian), it adds no high-k content that a sharp spatial mask
    would radiate.
    """
    cut = np.log(rho_max * SUPPORT_REL)
    arg = np.clip((ln_rho - cut) / GAIN_LN_WIDTH, -500.0, 500.0)
    return 1.0 / (1.0 + np.exp(-arg))


# The tail sponge turns on between these many measured widths from the
# packet center and absorbs at ABSORBER_RATE * kappa beyond.
ABSORBER_SIGMA_ON = 8.5
ABSORBER_SIGMA_FULL = 9.5
ABSORBER_RATE = 25.0


def _absorber(rho: np.ndarray, grid: Grid, kappa: float) -> np.ndarray | None:
    """Smooth loss term confining tail debris when the gain term is active.

    Where the gain window shuts off (true density below ~1e-12 of the
    peak), the packet fringe is out of balance and continuously sheds
    weak dispersive waves at fringe density.  Left alone they coat the
    domain, cross the window threshold, and the gain blows them up to
    bulk level.  The sponge sits beyond ABSORBER_SIGMA_ON measured
    widths, far outside every observable (the true density there is
    below double-precision representability relative to the peak), and
    scales with kappa, so purely kinetic or friction-only dynamics is
    untouched.
    """
    if kappa == 0.0:
        return None
    mean, sigma = _moments(rho, grid)
    r = np.abs(grid.x - mean) / sigma
    ramp = np.zeros(len(rho))
    ramp[r >= ABSORBER_SIGMA_FULL] = 1.0
    band = (r > ABSORBER_SIGMA_ON) & (r < ABSORBER_SIGMA_FULL)
    ramp[band] = np.sin(
        0.5 * np.pi * (r[band] - ABSORBER_SIGMA_ON) / (ABSORBER_SIGMA_FULL - ABSORBER_SIGMA_ON)
    ) ** 2
    return ABSORBER_RATE * kappa * ramp


def _mean(field: np.ndarray, rho: np.ndarray, dx: float) -> float:
    return float(np.sum(field * rho) * dx)


def _unwrap(psi: np.ndarray, rho: np.ndarray, grid: Grid) -> np.ndarray:
    peak = int(np.argmax(rho))
    a, b = _support_interval(rho, grid)
    seg = np.angle(psi[a : b + 1])
    diffs = np.diff(seg)
    wrapped = (diffs + np.pi) % (2.0 * np.pi) - np.pi
    if np.any(np.abs(wrapped) > 0.95 * np.pi):
        raise PhaseUnwrapError(
            "phase step between adjacent high-density nodes is at the "
            "aliasing limit; refine the grid"
        )
    unwrapped = np.empty_like(seg)
    j = peak - a
    unwrapped[j] = seg[j]
    if j < len(seg) - 1:
        unwrapped[j + 1 :] = seg[j] + np.cumsum(wrapped[j:])
    if j > 0:
        unwrapped[:j] = seg[j] - np.cumsum(wrapped[:j][::-1])[::-1]
    out = np.empty(len(psi))
    out[a : b + 1] = unwrapped
    out[:a] = unwrapped[0]
    out[b + 1 :] = unwrapped[-1]
    return out


def unwrap_phase(state: WavepacketState) -> np.ndarray:
    """Continuous phase angle, anchored to arg(psi) at the density peak.

    Outside the high-density region the phase is held constant; its
    density weight there is negligible.  Multiply by hbar for the
    action-valued phase.
    """
    return _unwrap(state.psi, state.density(), state.grid)


def _windowed_centered(field: np.ndarray, window: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """window * (field - c), with c the window-weighted density mean.

    That choice of subtraction constant keeps the density-weighted mean
    of the result exactly zero, which is what conserves the norm.
    """
    weight = float(np.sum(window * rho))
    if weight <= 0.0:
        return np.zeros_like(field)
    c = float(np.sum(window * field * rho)) / weight
    return window * (field - c)


def _wc(psi: np.ndarray, grid: Grid, kappa: float) -> np.ndarray:
    if kappa == 0.0:
        return np.zeros(len(psi))
    rho = np.abs(psi) ** 2
    _check_single_packet(rho)
    ln_rho = np.log(np.maximum(rho, DENSITY_FLOOR))
    window = _gain_window(ln_rho, float(rho.max()))
    return -kappa * _windowed_centered(ln_rho, window, rho)


def _wf(psi: np.ndarray, grid: Grid, nu: float) -> np.ndarray:
    if nu == 0.0:
        return np.zeros(len(psi), dtype=complex)
    rho = np.abs(psi) ** 2
    s = _unwrap(psi, rho, grid)
    ln_rho = np.log(np.maximum(rho, DENSITY_FLOOR))
    window = _gain_window(ln_rho, float(rho.max()))
    return -1j * nu * _windowed_centered(s, window, rho)


def compute_wc(state: WavepacketState, kappa: float) -> np.ndarray:
    """Measurement term -kappa (ln rho - <ln rho>); density-weighted mean zero."""
    return _wc(state.psi, state.grid, kappa)


def compute_wf(state: WavepacketState, nu: float) -> np.ndarray:
    """Friction term -i nu (S - <S>) built from the unwrapped phase angle."""
    return _wf(state.psi, state.grid, nu)


def _nonlinear_half(psi: np.ndarray, grid: Grid, p: PhysicalParams, half_dt: float) -> np.ndarray:
    w = _wc(psi, grid, p.kappa) + _wf(psi, grid, p.nu)
    sponge = _absorber(np.abs(psi) ** 2, grid, p.kappa)
    if sponge is not None:
        w = w - sponge
    psi = psi * np.exp(w * half_dt)
    n = np.sum(np.abs(psi) ** 2) * grid.dx
    return psi / np.sqrt(n)


def step(state: WavepacketState, p: PhysicalParams) -> WavepacketState:
    """Advance one dt by Strang splitting; raises on instability."""
    grid = state.grid
    dt = grid.dt
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        psi = _nonlinear_half(state.psi, grid, p, 0.5 * dt)
        kinetic = np.exp(-1j * (p.hbar / (2.0 * p.mass)) * grid.k**2 * dt)
        psi = np.fft.ifft(kinetic * np.fft.fft(psi))
        psi = _nonlinear_half(psi, grid, p, 0.5 * dt)
    norm = np.sum(np.abs(psi) ** 2) * grid.dx
    if not np.isfinite(norm) or abs(norm - 1.0) > STEP_NORM_TOL:
        raise InstabilityError(
            f"norm drifted to {norm!r} in one step at t={state.t:.6g}; reduce dt"
        )
    rho_edge = max(abs(psi[0]) ** 2, abs(psi[-1]) ** 2)
    if rho_edge >= BOUNDARY_DENSITY_MAX:
        raise BoundaryTouchError(
            f"packet density {rho_edge:.3g} at the domain edge at "
            f"t={state.t + dt:.6g}; enlarge the domain"
        )
    return WavepacketState(t=state.t + dt, psi=psi, grid=grid)


def evolve(
    state: WavepacketState,
    p: PhysicalParams,
    t_end: float,
    snapshot_times,
) -> list[WavepacketState]:
    """March to t_end, returning copies of the state at the snapshot times.

    Snapshot times (and t_end) must sit on the step lattice t0 + n*dt.
    The result is bit-reproducible: a fixed config yields identical
    amplitudes on every run.
    """
    dt = state.grid.dt
    t0 = state.t
    if t_end < t0 - 1e-12 * dt:
        raise ConfigError("t_end must not precede the current state time")

    def to_steps(t: float) -> int:
        n = round((t - t0) / dt)
        if abs(t0 + n * dt - t) > 1e-9 * dt:
            raise ConfigError(f"time {t!r} is not a multiple of dt={dt!r} from t0={t0!r}")
        return n

    n_total = to_steps(t_end)
    snap_steps = sorted({to_steps(t) for t in np.atleast_1d(snapshot_times)})
    if snap_steps and (snap_steps[0] < 0 or snap_steps[-1] > n_total):
        raise ConfigError("snapshot times must lie within [state.t, t_end]")

    snapshots: list[WavepacketState] = []
    wanted = set(snap_steps)
    if 0 in wanted:
        snapshots.append(WavepacketState(t=t0, psi=state.psi.copy(), grid=state.grid))
    current = state
    for n in range(1, n_total + 1):
        current = step(current, p)
        # keep stamps exact: re-derive from the step count
        current = WavepacketState(t=t0 + n * dt, psi=current.psi, grid=current.grid)
        if n in wanted:
            snapshots.append(
                WavepacketState(t=current.t, psi=current.psi.copy(), grid=current.grid)
            )
    return snapshots
