"""Classical orbits, invariants, and sector classification."""

import cmath
import math

import numpy as np
import pytest

from msfstates.classical import (
    BOUNDARY,
    ClassicalOrbit,
    FluxConfig,
    Units,
    classical_a,
    classical_observables,
    classify_orbit,
    kinetic_to_a,
    orbit_state,
)
from msfstates.errors import ConfigError

RNG = np.random.default_rng(20260810)


def random_orbit(rng):
    return ClassicalOrbit(
        R=float(rng.uniform(0.1, 4.0)),
        Rc=float(rng.uniform(0.1, 4.0)),
        psi0=float(rng.uniform(-math.pi, math.pi)),
        alpha_c=float(rng.uniform(-math.pi, math.pi)),
        pz=float(rng.uniform(-1.0, 1.0)),
        z0=float(rng.uniform(-1.0, 1.0)),
    )


class TestFluxConfig:
    def test_decomposition(self):
        f = FluxConfig.from_flux(2.3)
        assert f.l0 == 2
        assert abs(f.mu - 0.3) < 1e-15
        assert f.l0 + f.mu == f.flux_quanta

    def test_negative_flux(self):
        f = FluxConfig.from_flux(-0.7)
        assert f.l0 == -1
        assert abs(f.mu - 0.3) < 1e-15

    def test_invalid(self):
        with pytest.raises(ConfigError):
            FluxConfig(flux_quanta=2.3, l0=2, mu=0.4)
        with pytest.raises(ConfigError):
            FluxConfig(flux_quanta=3.2, l0=2, mu=1.2)
        with pytest.raises(ConfigError):
            FluxConfig(flux_quanta=2.3, l0=1, mu=1.3)


class TestUnits:
    def test_positive_required(self):
        with pytest.raises(ConfigError):
            Units(hbar=0.0)
        with pytest.raises(ConfigError):
            Units(mass=-1.0)

    def test_length_scale(self):
        u = Units(hbar=2.0, mass=4.0, omega=0.5)
        assert u.magnetic_length_sq == 2.0 * 2.0 / (4.0 * 0.5)


class TestOrbitState:
    def test_direct_substitution(self):
        orb = ClassicalOrbit(R=2.0, Rc=3.0, psi0=0.0, alpha_c=0.0)
        u = Units()
        x, y, z, px, py = orbit_state(orb, u, 0.0)
        assert (x, y) == (5.0, 0.0)
        assert abs(px) == 0.0
        assert py == 2.0 * u.mass * u.omega

    def test_circle_identity(self):
        u = Units(hbar=0.7, mass=1.3, omega=2.1)
        orb = random_orbit(RNG)
        for t in RNG.uniform(-10, 10, size=20):
            x, y, _, _, _ = orbit_state(orb, u, float(t))
            assert abs((x - orb.x0) ** 2 + (y - orb.y0) ** 2 - orb.R**2) < 1e-12

    def test_touches_solenoid(self):
        orb = ClassicalOrbit(R=1.0, Rc=1.0, psi0=math.pi, alpha_c=0.0)
        x, y, _, _, _ = orbit_state(orb, Units(), 0.0)
        assert abs(x) < 1e-15 and abs(y) < 1e-15
        assert orb.touches_flux_line

    def test_longitudinal_motion(self):
        orb = ClassicalOrbit(R=1.0, Rc=0.5, pz=3.0, z0=-1.0)
        u = Units(mass=2.0)
        _, _, z, _, _ = orbit_state(orb, u, 4.0)
        assert z == 3.0 / 2.0 * 4.0 - 1.0


class TestObservables:
    def test_rest_orbit(self):
        u = Units()
        flux = FluxConfig.from_flux(2.3)
        e, lz = classical_observables(ClassicalOrbit(R=0.0, Rc=2.0), u, flux)
        assert e == 0.0
        assert lz == -0.5 * 2.0**2 - 2.3

    def test_boundary_orbit(self):
        u = Units()
        flux = FluxConfig.from_flux(1.6)
        _, lz = classical_observables(ClassicalOrbit(R=1.5, Rc=1.5), u, flux)
        assert abs(lz + 1.6) < 1e-14

    def test_canonical_momentum_oracle(self):
        # Lz = x p_y - y p_x with canonical p = P + (e/c)A; the gauge field
        # contributes -(hbar(l0+mu)/r^2 + M omega/2) r^2 to x p_y - y p_x
        u = Units(hbar=1.0, mass=1.0, omega=1.0)
        flux = FluxConfig.from_flux(2.3)
        orb = ClassicalOrbit(R=3.0, Rc=1.0)
        e, lz = classical_observables(orb, u, flux)
        assert abs(e - 4.5) < 1e-14
        assert abs(lz - 1.7) < 1e-14
        for t in RNG.uniform(0, 7, size=7):
            x, y, _, px, py = orbit_state(orb, u, float(t))
            r2 = x * x + y * y
            gauge = u.hbar * flux.flux_quanta / r2 + u.mass * u.omega / 2.0
            p_x = px + y * gauge
            p_y = py - x * gauge
            assert abs((x * p_y - y * p_x) - lz) < 1e-12


class TestComplexParameters:
    def test_degenerate_zeros(self):
        u = Units()
        a1, a2 = classical_a(ClassicalOrbit(R=0.0, Rc=2.0), u, 0.3)
        assert a1 == 0.0
        a1, a2 = classical_a(ClassicalOrbit(R=2.0, Rc=0.0), u, 0.3)
        assert a2 == 0.0

    def test_direct_value(self):
        a1, _ = classical_a(ClassicalOrbit(R=2.0, Rc=1.0, psi0=0.0), Units(), 0.0)
        assert abs(a1 - (-math.sqrt(2.0))) < 1e-14

    def test_two_paths_agree(self):
        u = Units(hbar=0.9, mass=1.4, omega=1.7)
        orb = random_orbit(RNG)
        for t in RNG.uniform(-5, 5, size=25):
            a1, a2 = classical_a(orb, u, float(t))
            x, y, _, px, py = orbit_state(orb, u, float(t))
            b1, b2 = kinetic_to_a(x, y, px, py, u)
            assert abs(a1 - b1) < 1e-12
            assert abs(a2 - b2) < 1e-12


class TestConservation:
    def test_invariants_constant(self):
        u = Units()
        flux = FluxConfig.from_flux(0.4)
        orb = random_orbit(RNG)
        ref = None
        for t in RNG.uniform(-20, 20, size=100):
            x, y, _, px, py = orbit_state(orb, u, float(t))
            a1, a2 = kinetic_to_a(x, y, px, py, u)
            psi = u.omega * float(t) + orb.psi0
            energy = (px * px + py * py) / (2 * u.mass)
            lz = (u.hbar * (abs(a1) ** 2 - abs(a2) ** 2)
                  - u.hbar * flux.flux_quanta)
            inv = (energy, lz, abs(a1), a2, a1 * cmath.exp(1j * psi))
            if ref is None:
                ref = inv
                continue
            assert abs(inv[0] - ref[0]) < 1e-12
            assert abs(inv[1] - ref[1]) < 1e-12
            assert abs(inv[2] - ref[2]) < 1e-12
            assert abs(inv[3] - ref[3]) < 1e-12
            assert abs(inv[4] - ref[4]) < 1e-12

    def test_quadratic_dictionary(self):
        # R^2, Rc^2, position, E, Lz reconstructed from (a1, a2)
        u = Units(hbar=1.2, mass=0.8, omega=1.9)
        flux = FluxConfig.from_flux(-1.55)
        orb = random_orbit(RNG)
        scale = 2.0 * u.hbar / (u.mass * u.omega)
        e_ref, lz_ref = classical_observables(orb, u, flux)
        for t in RNG.uniform(-3, 3, size=10):
            a1, a2 = classical_a(orb, u, float(t))
            x, y, _, _, _ = orbit_state(orb, u, float(t))
            assert abs(scale * abs(a1) ** 2 - orb.R**2) < 1e-12
            assert abs(scale * abs(a2) ** 2 - orb.Rc**2) < 1e-12
            assert abs(math.sqrt(scale) * (a2 - a1.conjugate()) - (x + 1j * y)) < 1e-12
            assert abs(u.omega * u.hbar * abs(a1) ** 2 - e_ref) < 1e-12
            lz = (u.hbar * (abs(a1) ** 2 - abs(a2) ** 2)
                  - u.hbar * flux.flux_quanta)
            assert abs(lz - lz_ref) < 1e-12

    def test_radial_range(self):
        from scipy.optimize import minimize_scalar

        u = Units()
        orb = random_orbit(RNG)
        period = 2.0 * math.pi / u.omega
        ts = np.linspace(0.0, period, 2001)
        r = np.array([math.hypot(*orbit_state(orb, u, float(t))[:2]) for t in ts])
        # r(t)^2 identity
        psi = u.omega * ts + orb.psi0
        r2 = (orb.R**2 + orb.Rc**2
              + 2 * orb.R * orb.Rc * np.cos(psi - orb.alpha_c))
        assert np.abs(r**2 - r2).max() < 1e-10

        def radius(t):
            return math.hypot(*orbit_state(orb, u, float(t))[:2])

        step = period / 2000.0
        for sign, target, seed in ((-1.0, orb.r_max, ts[r.argmax()]),
                                   (1.0, orb.r_min, ts[r.argmin()])):
            res = minimize_scalar(lambda t: sign * radius(t),
                                  bounds=(seed - step, seed + step),
                                  method="bounded",
                                  options={"xatol": 1e-13})
            assert abs(sign * res.fun - target) < 1e-10


class TestClassify:
    def test_sectors(self):
        assert classify_orbit(ClassicalOrbit(R=3.0, Rc=1.0)) == 1
        assert classify_orbit(ClassicalOrbit(R=1.0, Rc=3.0)) == 0
        assert classify_orbit(ClassicalOrbit(R=1.0, Rc=1.0)) == BOUNDARY

    def test_eps_window(self):
        orb = ClassicalOrbit(R=1.0, Rc=1.0 + 1e-9)
        assert classify_orbit(orb) == 0
        assert classify_orbit(orb, eps=1e-6) == BOUNDARY
