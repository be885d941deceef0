"""Stationary states: quantum numbers, energies, eigenfunctions, ladders."""

import math

import numpy as np
import pytest

from msfstates.classical import Units
from msfstates.errors import DomainError
from msfstates.spectrum import (
    IRREGULAR,
    ZERO,
    eigenfunction,
    energy_lz,
    inner_product,
    ladder_apply,
    level_diagram,
    make_qn,
    mean_r2_rc2,
    radial_alpha_index,
)
from msfstates.specfun import auto_rho_cut, laguerre_fn, radial_nodes

RNG = np.random.default_rng(7061138)


class TestQuantumNumbers:
    def test_enclosing_sector(self):
        qn = make_qn(1, 2, 3, 0.4)
        assert (qn.n1, qn.n2) == (5.4, 2.0)

    def test_non_enclosing_sector(self):
        qn = make_qn(0, 2, -3, 0.4)
        assert (qn.n1, qn.n2) == (2.0, 4.6)

    def test_range_violations(self):
        with pytest.raises(DomainError):
            make_qn(0, 1, 0, 0.3)
        with pytest.raises(DomainError):
            make_qn(1, 1, -1, 0.3)
        with pytest.raises(DomainError):
            make_qn(2, 0, 0, 0.3)
        with pytest.raises(DomainError):
            make_qn(1, -1, 0, 0.3)
        with pytest.raises(DomainError):
            make_qn(1, 0, 0, 1.0)


class TestEnergyLz:
    def test_shifted_level(self):
        e = energy_lz(make_qn(1, 0, 0, 0.3), l0=0)
        assert abs(e.energy_hw - 0.8) < 1e-15

    def test_plain_landau_level(self):
        for mu in (0.0, 0.3, 0.9):
            e = energy_lz(make_qn(0, 0, -1, mu), l0=0)
            assert e.energy_hw == 0.5

    def test_zero_mantissa(self):
        e = energy_lz(make_qn(1, 1, 2, 0.0), l0=0)
        assert e.energy_hw == 3.5

    def test_lz_offset(self):
        e = energy_lz(make_qn(0, 2, -4, 0.25), l0=2)
        assert e.lz_hbar == -6.0


class TestEigenfunction:
    def test_ground_cell_at_origin(self):
        val = eigenfunction(make_qn(1, 0, 0, 0.0), 0, 0.37, 0.0)
        assert abs(val - 1.0) < 1e-15

    def test_m0_closed_form(self):
        # n2 = m - l - mu = 0.7, so the radial part is I_{0.7,0}(rho) =
        # sqrt(1/Gamma(1.7)) exp(-rho/2) rho^0.35
        qn = make_qn(0, 0, -1, 0.3)
        assert abs(qn.n2 - 0.7) < 1e-15
        for rho in (0.2, 1.0, 3.7):
            want = (math.exp(0.5 * (-math.lgamma(1.7)))
                    * math.exp(-rho / 2.0) * rho ** 0.35)
            got = eigenfunction(qn, 0, 0.0, rho)
            assert abs(got - want) < 1e-13

    def test_normalization_by_quadrature(self):
        qn = make_qn(1, 2, 1, 0.4)
        alpha, _ = radial_alpha_index(qn)
        val = inner_product(
            lambda p, r: eigenfunction(qn, 0, p, r),
            lambda p, r: eigenfunction(qn, 0, p, r),
            singular_power=alpha,
        )
        assert abs(val - 1.0) <= 1e-9

    def test_phase_convention(self):
        # j=1 carries the extra (-1)^l factor
        qn = make_qn(1, 1, 3, 0.2)
        val = eigenfunction(qn, 0, 0.0, 1.0)
        alpha, m = radial_alpha_index(qn)
        assert abs(val - (-1.0) ** 3 * laguerre_fn(alpha, m, 1.0)) < 1e-14


class TestInnerProduct:
    def test_orthogonality_same_sector(self):
        a = make_qn(1, 1, 2, 0.3)
        b = make_qn(1, 3, 2, 0.3)  # same l, different m
        val = inner_product(
            lambda p, r: eigenfunction(a, 0, p, r),
            lambda p, r: eigenfunction(b, 0, p, r),
            singular_power=radial_alpha_index(a)[0],
        )
        assert abs(val) <= 1e-9

    def test_orthogonality_cross_sector(self):
        a = make_qn(0, 1, -2, 0.3)
        b = make_qn(1, 1, 2, 0.3)
        val = inner_product(
            lambda p, r: eigenfunction(a, 0, p, r),
            lambda p, r: eigenfunction(b, 0, p, r),
        )
        assert abs(val) <= 1e-9

    def test_thirty_state_gram(self):
        # radial Gram per angular harmonic on a shared quadrature grid;
        # distinct harmonics are exactly orthogonal under the phi rule
        mu = 0.3
        states = [make_qn(1, m, l, mu) for m in range(5) for l in (0, 1, 4)]
        states += [make_qn(0, m, l, mu) for m in range(5) for l in (-1, -2, -5)]
        assert len(states) == 30
        gram = np.zeros((30, 30))
        for i, a in enumerate(states):
            for k, b in enumerate(states):
                if (a.j, a.l) != (b.j, b.l):
                    continue  # angular orthogonality is exact
                alpha, _ = radial_alpha_index(a)
                rho, w = radial_nodes(auto_rho_cut(alpha + 2 * 5 + 4),
                                      nodes_per_panel=32,
                                      singular_power=alpha)
                fa = laguerre_fn(alpha, a.m, rho)
                fb = laguerre_fn(alpha, b.m, rho)
                gram[i, k] = float((fa * fb * w).sum())
        assert np.abs(gram - np.eye(30)).max() <= 1e-8


class TestLadder:
    def test_lowering_enclosing(self):
        coeff, target = ladder_apply("a1", make_qn(1, 0, 2, 0.5))
        assert abs(coeff - math.sqrt(2.5)) < 1e-15
        assert (target.j, target.m, target.l) == (1, 0, 1)

    def test_lowering_to_irregular(self):
        coeff, target = ladder_apply("a1", make_qn(1, 0, 0, 0.5))
        assert target is IRREGULAR
        coeff, target = ladder_apply("a2", make_qn(0, 2, -1, 0.3))
        assert target is IRREGULAR

    def test_annihilation(self):
        _, target = ladder_apply("a2", make_qn(1, 0, 3, 0.2))
        assert target is ZERO
        _, target = ladder_apply("a1", make_qn(0, 0, -2, 0.2))
        assert target is ZERO

    def test_raising(self):
        coeff, target = ladder_apply("a1_dag", make_qn(0, 3, -2, 0.1))
        assert abs(coeff - 2.0) < 1e-15
        assert (target.j, target.m, target.l) == (0, 4, -1)

    def test_raising_to_irregular(self):
        _, target = ladder_apply("a1_dag", make_qn(0, 1, -1, 0.3))
        assert target is IRREGULAR
        _, target = ladder_apply("a2_dag", make_qn(1, 1, 0, 0.3))
        assert target is IRREGULAR

    def test_roundtrip(self):
        qn = make_qn(1, 2, 3, 0.7)
        up_c, up = ladder_apply("a1_dag", qn)
        down_c, down = ladder_apply("a1", up)
        assert down == qn
        assert abs(up_c * down_c - (qn.n1 + 1.0)) < 1e-12

    def test_unknown_operator(self):
        with pytest.raises(ValueError):
            ladder_apply("a3", make_qn(1, 0, 0, 0.0))


def _cartesian_ladder(op, psi, x, y, units, flux_quanta, h=1e-6):
    """Differential ladder action evaluated by Cartesian finite differences.

    a1 = (-i Px - Py)/sqrt(2 hbar M omega), a2 = (M omega (x+iy) + i Px -
    Py)/sqrt(2 hbar M omega), with Px = -i hbar d/dx - y*g(r), Py = -i hbar
    d/dy + x*g(r), g = hbar*flux_quanta/r^2 + M omega/2.
    """
    hb, mass, om = units.hbar, units.mass, units.omega

    def dx(f):
        return (f(x + h, y) - f(x - h, y)) / (2 * h)

    def dy(f):
        return (f(x, y + h) - f(x, y - h)) / (2 * h)

    r2 = x * x + y * y
    g = hb * flux_quanta / r2 + mass * om / 2.0
    px = -1j * hb * dx(psi) - y * g * psi(x, y)
    py = -1j * hb * dy(psi) + x * g * psi(x, y)
    denom = math.sqrt(2.0 * hb * mass * om)
    if op == "a1":
        return (-1j * px - py) / denom
    if op == "a2":
        return (mass * om * (x + 1j * y) * psi(x, y) + 1j * px - py) / denom
    raise ValueError(op)


class TestDifferentialConsistency:
    @pytest.mark.parametrize("qn_args,op", [
        ((1, 1, 2, 0.3), "a1"),
        ((1, 2, 1, 0.3), "a2"),
        ((0, 2, -2, 0.6), "a1"),
        ((0, 1, -3, 0.6), "a2"),
    ])
    def test_ladder_matches_derivatives(self, qn_args, op):
        units = Units()
        l0 = 0
        qn = make_qn(*qn_args)

        def psi(xx, yy):
            r = math.hypot(xx, yy)
            phi = math.atan2(yy, xx)
            rho = units.mass * units.omega * r * r / (2.0 * units.hbar)
            return eigenfunction(qn, l0, phi, rho)

        coeff, target = ladder_apply(op, qn)
        assert target not in (ZERO, IRREGULAR)
        for _ in range(5):
            x = float(RNG.uniform(0.7, 2.0)) * (1 if RNG.random() < 0.5 else -1)
            y = float(RNG.uniform(0.7, 2.0)) * (1 if RNG.random() < 0.5 else -1)
            got = _cartesian_ladder(op, psi, x, y, units, qn.mu + l0)
            r = math.hypot(x, y)
            phi = math.atan2(y, x)
            rho = units.mass * units.omega * r * r / (2.0 * units.hbar)
            want = coeff * eigenfunction(target, l0, phi, rho)
            assert abs(got - want) <= 1e-6


class TestLevelDiagram:
    def test_zero_mantissa_half_integers(self):
        entries = level_diagram(0.0, 3, -3, 3)
        for e in entries:
            assert abs(e.energy_hw - (round(e.energy_hw - 0.5) + 0.5)) < 1e-12

    def test_two_ladders(self):
        entries = level_diagram(0.25, 3, -3, 3)
        for e in entries:
            if e.qn.j == 0:
                assert abs(e.energy_hw - (e.qn.m + 0.5)) < 1e-12
            else:
                assert abs(e.energy_hw - (e.qn.m + e.qn.l + 0.75)) < 1e-12

    def test_shift_above_landau(self):
        mu = 0.37
        for e in level_diagram(mu, 2, -2, 2):
            if e.qn.j == 1:
                landau = e.qn.m + e.qn.l + 0.5
                assert abs(e.energy_hw - landau - mu) < 1e-12

    def test_sorted_by_energy(self):
        entries = level_diagram(0.6, 4, -4, 4)
        energies = [e.energy_hw for e in entries]
        assert energies == sorted(energies)


class TestOperatorDictionary:
    @pytest.mark.parametrize("qn_args", [(1, 2, 1, 0.4), (0, 1, -2, 0.7),
                                         (1, 0, 3, 0.0), (0, 3, -1, 0.2)])
    def test_r2_rc2_vs_quadrature(self, qn_args):
        # <rho> by radial quadrature must reproduce the ladder dictionary
        # (hbar/M omega)(2 n_s + 1) after combining with the exact Lz
        # eigenvalue through the operator relation between R^2, Rc^2, r^2
        units = Units()
        qn = make_qn(*qn_args)
        alpha, m = radial_alpha_index(qn)
        rho, w = radial_nodes(auto_rho_cut(alpha + 2 * m + 6),
                              nodes_per_panel=40, singular_power=alpha)
        dens = laguerre_fn(alpha, m, rho) ** 2
        rho_mean = float((rho * dens * w).sum())
        scale = units.hbar / (units.mass * units.omega)
        r2_from_quad = scale * (rho_mean + (qn.l + qn.mu))
        rc2_from_quad = scale * (rho_mean - (qn.l + qn.mu))
        r2, rc2 = mean_r2_rc2(qn, units)
        assert abs(r2_from_quad - r2) <= 1e-9
        assert abs(rc2_from_quad - rc2) <= 1e-9

    def test_sector_indicator_sign(self):
        units = Units()
        for qn in (make_qn(1, 1, 0, 0.3), make_qn(1, 0, 4, 0.3)):
            r2, rc2 = mean_r2_rc2(qn, units)
            assert r2 - rc2 > 0
        for qn in (make_qn(0, 1, -1, 0.3), make_qn(0, 0, -4, 0.3)):
            r2, rc2 = mean_r2_rc2(qn, units)
            assert r2 - rc2 < 0
