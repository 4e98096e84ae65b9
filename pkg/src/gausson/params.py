"""Physical parameters, unit scales, and the closed-form rate constants.

All solver internals run in dimensionless units: lengths in units of the
initial packet width delta0 and times in units of 2*m*delta0^2/hbar.  In
those units the effective constants are hbar = 1 and mass = 1/2, so the
free spreading law is delta(t) = sqrt(1 + t^2).  Dimensional values only
appear at ingestion (config files) and emission (manifests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

# CODATA 2018 values used by the "electron" preset; the resolved numbers
# are echoed into run manifests so outputs remain auditable.
ELECTRON_MASS_KG = 9.1093837015e-31
HBAR_JS = 1.054571817e-34
ELECTRON_SIZE_M = 2.8e-15

# Constants realized by the nondimensionalization below.
SOLVER_HBAR = 1.0
SOLVER_MASS = 0.5

# Published upper-limit estimate for the electron transition time; runs in
# physical units compare their computed value against it (see manifests).
PUBLISHED_TAU_B_MAX_S = 1e-26


@dataclass(frozen=True)
class PhysicalParams:
    """Packet and coupling parameters in any consistent unit system.

    nu is the friction rate, kappa the resolution rate of the continuous
    measurement, delta0/x0/v0/deltadot0 the initial Gaussian data.
    """

    mass: float
    hbar: float
    nu: float
    kappa: float
    delta0: float
    x0: float = 0.0
    v0: float = 0.0
    deltadot0: float = 0.0

    def __post_init__(self):
        if self.mass <= 0:
            raise ParameterError(f"mass must be positive, got {self.mass}")
        if self.hbar <= 0:
            raise ParameterError(f"hbar must be positive, got {self.hbar}")
        if self.delta0 <= 0:
            raise ParameterError(f"delta0 must be positive, got {self.delta0}")
        if self.nu < 0:
            raise ParameterError(f"friction nu must be >= 0, got {self.nu}")
        if self.kappa < 0:
            raise ParameterError(f"resolution kappa must be >= 0, got {self.kappa}")


@dataclass(frozen=True)
class Scales:
    """Length/time/velocity units used to nondimensionalize a problem.

    Satisfies time_scale * hbar = 2 * mass * length_scale^2, which makes
    the dimensionless spreading rate hbar/(2 m delta0^2) equal one.  mass
    and hbar are carried along so the mapping can be inverted.
    """

    length_scale: float
    time_scale: float
    velocity_scale: float
    mass: float
    hbar: float

    def __post_init__(self):
        if min(self.length_scale, self.time_scale, self.velocity_scale) <= 0:
            raise ParameterError("all scales must be strictly positive")


@dataclass(frozen=True)
class DimensionlessParams:
    """PhysicalParams expressed in solver units (hbar=1, mass=1/2, delta0=1)."""

    nu_t: float
    kappa_t: float
    x0_t: float
    v0_t: float
    deltadot0_t: float


def nondimensionalize(p: PhysicalParams) -> tuple[DimensionlessParams, Scales]:
    """Map parameters onto solver units; returns the scales used."""
    length = p.delta0
    time = 2.0 * p.mass * p.delta0**2 / p.hbar
    velocity = length / time
    scales = Scales(length, time, velocity, p.mass, p.hbar)
    dp = DimensionlessParams(
        nu_t=p.nu * time,
        kappa_t=p.kappa * time,
        x0_t=p.x0 / length,
        v0_t=p.v0 / velocity,
        deltadot0_t=p.deltadot0 / velocity,
    )
    return dp, scales


def redimensionalize(dp: DimensionlessParams, scales: Scales) -> PhysicalParams:
    """Inverse of :func:`nondimensionalize`."""
    return PhysicalParams(
        mass=scales.mass,
        hbar=scales.hbar,
        nu=dp.nu_t / scales.time_scale,
        kappa=dp.kappa_t / scales.time_scale,
        delta0=scales.length_scale,
        x0=dp.x0_t * scales.length_scale,
        v0=dp.v0_t * scales.velocity_scale,
        deltadot0=dp.deltadot0_t * scales.velocity_scale,
    )


def solver_params(dp: DimensionlessParams) -> PhysicalParams:
    """View dimensionless parameters as PhysicalParams in solver units."""
    return PhysicalParams(
        mass=SOLVER_MASS,
        hbar=SOLVER_HBAR,
        nu=dp.nu_t,
        kappa=dp.kappa_t,
        delta0=1.0,
        x0=dp.x0_t,
        v0=dp.v0_t,
        deltadot0=dp.deltadot0_t,
    )


def gausson_kappa(p: PhysicalParams) -> float:
    """Resolution rate at which the packet width is exactly stationary.

    kappa = nu/2 + sqrt(nu^2/4 + hbar^2/(4 m^2 delta0^4)); the returned
    value satisfies kappa^2 - kappa*nu = hbar^2/(4 m^2 delta0^4).
    """
    spread = p.hbar / (2.0 * p.mass * p.delta0**2)
    return p.nu / 2.0 + math.sqrt(p.nu**2 / 4.0 + spread**2)


def bohmian_time_constant(kappa: float) -> float:
    """e-folding time of the quantum-to-classical trajectory gap, 1/kappa."""
    if kappa <= 0:
        raise ParameterError(
            "kappa must be positive: without measurement there is no "
            "quantum-classical transition"
        )
    return 1.0 / kappa


def bohmian_time_constant_approx(p: PhysicalParams) -> float:
    """Small-friction form (2 m delta0^2/hbar) * (1 - nu m delta0^2/hbar).

    Requires nu < hbar/(m delta0^2); first-order accurate in nu.
    """
    limit = p.hbar / (p.mass * p.delta0**2)
    if p.nu >= limit:
        raise ParameterError(
            f"small-friction condition nu < hbar/(m delta0^2) violated: "
            f"nu={p.nu:.6g} >= {limit:.6g}"
        )
    lead = 2.0 * p.mass * p.delta0**2 / p.hbar
    return lead * (1.0 - p.nu * p.mass * p.delta0**2 / p.hbar)
