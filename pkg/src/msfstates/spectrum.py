"""Stationary states in the uniform field plus flux line.

Two sectors of common eigenfunctions of the transverse Hamiltonian and Lz
exist: sector j=1 (angular quantum number l >= 0, orbits enclosing the flux
line) and sector j=0 (l <= -1, orbits not enclosing it).  Both are built
from the orthonormal Laguerre functions; the flux mantissa mu shifts the
j=1 energies off the evenly spaced Landau ladder.

All eigenfunctions here carry normalization constant 1, so they are
orthonormal in the inner product (1/2pi) int drho int dphi f* g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import Units
from .errors import DomainError, QuadratureError
from .specfun import auto_rho_cut, laguerre_fn, radial_nodes

__all__ = [
    "QuantumNumbers",
    "LevelEntry",
    "ZERO",
    "IRREGULAR",
    "make_qn",
    "energy_lz",
    "eigenfunction",
    "radial_alpha_index",
    "inner_product",
    "ladder_apply",
    "level_diagram",
    "mean_r2_rc2",
]


class _Sentinel:
    def __init__(self, name: str):
        self._name = name

    def __repr__(self):
        return self._name


# Ladder action annihilated the state (n_s = 0).
ZERO = _Sentinel("ZERO")
# Ladder action leaves the regular sector: the target function diverges at
# the flux line and is not part of the state space.  Never evaluated.
IRREGULAR = _Sentinel("IRREGULAR")


@dataclass(frozen=True)
class QuantumNumbers:
    """Sector j, integers (m, l), flux mantissa mu, and the derived real
    indices n1 (energy) and n2 (center distance)."""

    j: int
    m: int
    l: int
    mu: float
    n1: float
    n2: float


def make_qn(j: int, m: int, l: int, mu: float) -> QuantumNumbers:
    """Build quantum numbers, enforcing the sector ranges.

    j=1: l >= 0, n1 = m + l + mu, n2 = m.
    j=0: l <= -1, n1 = m, n2 = m - l - mu.
    """
    if j not in (0, 1):
        raise DomainError(f"sector j must be 0 or 1, got {j}")
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    if not 0.0 <= mu < 1.0:
        raise DomainError(f"mu must lie in [0,1), got {mu}")
    if j == 1:
        if l < 0:
            raise DomainError(f"sector j=1 requires l >= 0, got l={l}")
        return QuantumNumbers(j=1, m=m, l=l, mu=mu, n1=m + l + mu, n2=float(m))
    if l > -1:
        raise DomainError(f"sector j=0 requires l <= -1, got l={l}")
    return QuantumNumbers(j=0, m=m, l=l, mu=mu, n1=float(m), n2=m - l - mu)


@dataclass(frozen=True)
class LevelEntry:
    """One spectral level: energy in units hbar*omega, Lz in units hbar."""

    qn: QuantumNumbers
    energy_hw: float
    lz_hbar: float


def energy_lz(qn: QuantumNumbers, l0: int) -> LevelEntry:
    """Energy (n1 + 1/2, units hbar*omega) and Lz eigenvalue (l - l0, units
    hbar).  Sector j=0 keeps the plain Landau values m + 1/2; sector j=1 is
    shifted to m + l + mu + 1/2."""
    return LevelEntry(qn=qn, energy_hw=qn.n1 + 0.5, lz_hbar=float(qn.l - l0))


def radial_alpha_index(qn: QuantumNumbers):
    """(alpha, m) of the Laguerre function I_{m+alpha,m} entering the radial
    part: alpha = -l - mu for j=0, alpha = l + mu for j=1."""
    if qn.j == 0:
        return -qn.l - qn.mu, qn.m
    return qn.l + qn.mu, qn.m


def eigenfunction(qn: QuantumNumbers, l0: int, phi, rho):
    """Eigenfunction at (phi, rho), rho = M omega r^2 / (2 hbar).

    j=0: exp(i(l-l0) phi) I_{n2,n1}(rho),
    j=1: exp(i(l-l0) phi) (-1)^l I_{n1,n2}(rho),
    with the Laguerre-function indices ordered per sector (the lower index
    is the nonnegative integer one).  phi, rho may be scalars or arrays.
    """
    alpha, m = radial_alpha_index(qn)
    radial = laguerre_fn(alpha, m, rho)
    phase = np.exp(1j * (qn.l - l0) * np.asarray(phi, dtype=float))
    sign = (-1) ** qn.l if qn.j == 1 else 1
    out = sign * phase * radial
    return complex(out) if np.ndim(out) == 0 else out


def inner_product(f, g, n_phi: int = 256, rho_cut: float = None,
                  tol: float = 1e-9, singular_power: float = 0.0):
    """Inner product (1/2pi) int_0^inf drho int_0^2pi dphi f*(phi,rho) g(phi,rho).

    f and g must accept array arguments broadcast over a tensor grid.  The
    phi integral uses the uniform periodic rule (exact for integer angular
    harmonics below n_phi); the radial integral uses composite
    Gauss-Legendre panels, with the node count raised once to form an
    error estimate.  Raises QuadratureError when the estimate exceeds tol.
    Pass singular_power=beta when f* g carries an algebraic rho^beta branch
    point at the origin (e.g. beta = alpha for same-sector radial
    densities at non-integer angular index alpha).
    """
    if rho_cut is None:
        rho_cut = auto_rho_cut(80.0)
    phi = np.arange(n_phi) * (2.0 * math.pi / n_phi)

    def evaluate(nodes_per_panel: int) -> complex:
        x, w = radial_nodes(rho_cut, nodes_per_panel=nodes_per_panel,
                            singular_power=singular_power)
        pp = phi[:, None]
        rr = x[None, :]
        vals = np.conj(f(pp, rr)) * g(pp, rr)
        return complex((vals.mean(axis=0) * w).sum())

    coarse = evaluate(24)
    fine = evaluate(40)
    err = abs(fine - coarse)
    if err > tol:
        raise QuadratureError(
            f"inner product error estimate {err:.3e} exceeds tol {tol:.3e}",
            achieved=err,
        )
    return fine


def ladder_apply(op: str, qn: QuantumNumbers):
    """Action of a ladder operator on an eigenstate.

    Returns (coefficient, target) where target is a QuantumNumbers, ZERO
    (the state is annihilated, n_s = 0), or IRREGULAR (the target function
    diverges at the flux line and lies outside the regular sector).

    a1 lowers n1 by one with coefficient sqrt(n1); a1_dag raises it with
    sqrt(n1+1); a2/a2_dag do the same for n2.
    """
    j, m, l, mu = qn.j, qn.m, qn.l, qn.mu
    if op == "a1":
        if qn.n1 == 0:
            return 0.0, ZERO
        coeff = math.sqrt(qn.n1)
        if j == 1:
            if l == 0:
                return coeff, IRREGULAR
            return coeff, make_qn(1, m, l - 1, mu)
        return coeff, make_qn(0, m - 1, l - 1, mu)
    if op == "a1_dag":
        coeff = math.sqrt(qn.n1 + 1.0)
        if j == 1:
            return coeff, make_qn(1, m, l + 1, mu)
        if l == -1:
            return coeff, IRREGULAR
        return coeff, make_qn(0, m + 1, l + 1, mu)
    if op == "a2":
        if qn.n2 == 0:
            return 0.0, ZERO
        coeff = math.sqrt(qn.n2)
        if j == 1:
            return coeff, make_qn(1, m - 1, l + 1, mu)
        if l == -1:
            return coeff, IRREGULAR
        return coeff, make_qn(0, m, l + 1, mu)
    if op == "a2_dag":
        coeff = math.sqrt(qn.n2 + 1.0)
        if j == 1:
            if l == 0:
                return coeff, IRREGULAR
            return coeff, make_qn(1, m + 1, l - 1, mu)
        return coeff, make_qn(0, m, l - 1, mu)
    raise ValueError(f"unknown ladder operator {op!r}")


def level_diagram(mu: float, m_max: int, l_min: int, l_max: int,
                  l0: int = 0):
    """Levels of both sectors for m <= m_max and l_min <= l <= l_max,
    sorted by energy (then by (j, l, m) for determinism)."""
    entries = []
    for m in range(m_max + 1):
        for l in range(l_min, min(l_max, -1) + 1):
            entries.append(energy_lz(make_qn(0, m, l, mu), l0))
        for l in range(max(l_min, 0), l_max + 1):
            entries.append(energy_lz(make_qn(1, m, l, mu), l0))
    entries.sort(key=lambda e: (e.energy_hw, e.qn.j, e.qn.l, e.qn.m))
    return entries


def mean_r2_rc2(qn: QuantumNumbers, units: Units):
    """Expectation values of the squared orbit radius and squared center
    distance on an eigenstate: (hbar/M omega)(2 n_s + 1)."""
    scale = units.hbar / (units.mass * units.omega)
    return scale * (2.0 * qn.n1 + 1.0), scale * (2.0 * qn.n2 + 1.0)
