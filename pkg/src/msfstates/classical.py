"""Classical mechanics of a charged particle in the uniform-field-plus-flux-line
configuration: circular cyclotron orbits, conserved quantities, and the
sector classification (does the orbit enclose the flux line or not).

Charge convention: q = -e with e > 0 and B > 0, so the cyclotron frequency
omega = eB/Mc is positive and the rotation is anticlockwise.  B, e, c enter
only through omega and the flux expressed in flux quanta.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ConfigError

__all__ = [
    "FluxConfig",
    "Units",
    "ClassicalOrbit",
    "BOUNDARY",
    "orbit_state",
    "classical_observables",
    "classical_a",
    "kinetic_to_a",
    "classify_orbit",
]

# Sector label for orbits passing exactly through the flux line (R == Rc).
BOUNDARY = "boundary"


@dataclass(frozen=True)
class FluxConfig:
    """Magnetic flux through the line in flux quanta, split into the integer
    part l0 and the mantissa mu in [0, 1).  Only mu carries quantum effects.
    """

    flux_quanta: float
    l0: int
    mu: float

    def __post_init__(self):
        if not 0.0 <= self.mu < 1.0:
            raise ConfigError(f"mu must lie in [0,1), got {self.mu}")
        if self.l0 != math.floor(self.flux_quanta):
            raise ConfigError("l0 must be floor(flux_quanta)")
        if abs(self.l0 + self.mu - self.flux_quanta) > 1e-12:
            raise ConfigError("flux_quanta must equal l0 + mu")

    @classmethod
    def from_flux(cls, flux_quanta: float) -> "FluxConfig":
        l0 = math.floor(flux_quanta)
        return cls(flux_quanta=flux_quanta, l0=l0, mu=flux_quanta - l0)

    @classmethod
    def from_parts(cls, l0: int, mu: float) -> "FluxConfig":
        return cls(flux_quanta=l0 + mu, l0=l0, mu=mu)


@dataclass(frozen=True)
class Units:
    """hbar, mass, and cyclotron frequency; natural units by default."""

    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0 or self.mass <= 0 or self.omega <= 0:
            raise ConfigError("hbar, mass, omega must all be > 0")

    @property
    def magnetic_length_sq(self) -> float:
        """2*hbar/(mass*omega), the square of the natural length scale."""
        return 2.0 * self.hbar / (self.mass * self.omega)


@dataclass(frozen=True)
class ClassicalOrbit:
    """Circular orbit of radius R about a center at distance Rc from the
    flux line, with initial phase psi0, center azimuth alpha_c, and free
    longitudinal motion (pz, z0)."""

    R: float
    Rc: float
    psi0: float = 0.0
    alpha_c: float = 0.0
    pz: float = 0.0
    z0: float = 0.0

    def __post_init__(self):
        if self.R < 0 or self.Rc < 0:
            raise ConfigError("R and Rc must be >= 0")

    @property
    def x0(self) -> float:
        return self.Rc * math.cos(self.alpha_c)

    @property
    def y0(self) -> float:
        return self.Rc * math.sin(self.alpha_c)

    @property
    def r_max(self) -> float:
        return self.R + self.Rc

    @property
    def r_min(self) -> float:
        return abs(self.R - self.Rc)

    @property
    def touches_flux_line(self) -> bool:
        """True when the orbit passes through the origin (R == Rc)."""
        scale = max(self.R, self.Rc, 1.0)
        return self.r_min <= 1e-12 * scale


def orbit_state(orbit: ClassicalOrbit, units: Units, t: float):
    """Position and kinetic momentum at time t.

    Returns (x, y, z, Px, Py) with x = x0 + R cos(psi), y = y0 + R sin(psi),
    psi = omega*t + psi0, z = (pz/M) t + z0, Px = -M omega R sin(psi),
    Py = M omega R cos(psi).
    """
    psi = units.omega * t + orbit.psi0
    x = orbit.x0 + orbit.R * math.cos(psi)
    y = orbit.y0 + orbit.R * math.sin(psi)
    z = orbit.pz / units.mass * t + orbit.z0
    p_scale = units.mass * units.omega * orbit.R
    return x, y, z, -p_scale * math.sin(psi), p_scale * math.cos(psi)


def classical_observables(orbit: ClassicalOrbit, units: Units,
                          flux: FluxConfig):
    """Rotation energy and angular momentum projection.

    E = M omega^2 R^2 / 2;  Lz = (M omega / 2)(R^2 - Rc^2) - hbar*(l0 + mu).
    """
    m, w = units.mass, units.omega
    energy = 0.5 * m * w * w * orbit.R**2
    lz = 0.5 * m * w * (orbit.R**2 - orbit.Rc**2) - units.hbar * flux.flux_quanta
    return energy, lz


def classical_a(orbit: ClassicalOrbit, units: Units, t: float):
    """Dimensionless complex orbit parameters.

    a1 = -sqrt(M omega / 2 hbar) R exp(-i psi) encodes the rotating radius
    vector; a2 = sqrt(M omega / 2 hbar) Rc exp(i alpha_c) encodes the fixed
    orbit center.  a1*exp(i psi) and a2 are integrals of the motion.
    """
    scale = math.sqrt(units.mass * units.omega / (2.0 * units.hbar))
    psi = units.omega * t + orbit.psi0
    a1 = -scale * orbit.R * cmath.exp(-1j * psi)
    a2 = scale * orbit.Rc * cmath.exp(1j * orbit.alpha_c)
    return a1, a2


def kinetic_to_a(x: float, y: float, px: float, py: float, units: Units):
    """Same quantities computed from the instantaneous phase-space point:
    a1 = (-i Px - Py)/sqrt(2 hbar M omega),
    a2 = (M omega (x+iy) + i Px - Py)/sqrt(2 hbar M omega)."""
    denom = math.sqrt(2.0 * units.hbar * units.mass * units.omega)
    a1 = (-1j * px - py) / denom
    a2 = (units.mass * units.omega * (x + 1j * y) + 1j * px - py) / denom
    return a1, a2


def classify_orbit(orbit: ClassicalOrbit, eps: float = 1e-12):
    """Sector of the orbit: 1 if it encloses the flux line (R^2 > Rc^2),
    0 if not, BOUNDARY when |R^2 - Rc^2| <= eps."""
    d = orbit.R**2 - orbit.Rc**2
    if d > eps:
        return 1
    if d < -eps:
        return 0
    return BOUNDARY
