"""Acceptance suite: every library-level guarantee as a runnable criterion.

Each criterion returns a CriterionResult with the measured error and its
tolerance; run_all executes the whole battery.  The same functions back
both the CLI `verify` subcommand and the pytest acceptance module.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .classical import Units
from .coherent import (
    CoherentParams,
    apply_ladder,
    build_lattice,
    delta_fn,
    evolve,
    mean_a,
    mean_geometry,
    mean_n,
    observable_moments,
    q_minus,
    t_complement,
    transverse_state,
    y_fn,
)
from .spectrum import level_diagram, make_qn, mean_r2_rc2, radial_alpha_index
from .specfun import auto_rho_cut, laguerre_fn, laguerre_fn_sequence, radial_nodes

__all__ = ["CriterionResult", "run_all", "CRITERIA"]

DEFAULT_SEED = 20260810


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    measured: float
    tolerance: float
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.measured = float(self.measured)
        self.tolerance = float(self.tolerance)
        self.details = {k: (bool(v) if isinstance(v, (bool, np.bool_))
                            else float(v))
                        for k, v in self.details.items()}

    def row(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] criterion {self.cid:2d} {self.name}: "
                f"measured {self.measured:.3e} vs tolerance {self.tolerance:.3e}")


def laguerre_orthonormality(seed: int = DEFAULT_SEED,
                            tol: float = 1e-8) -> CriterionResult:
    """Radial basis Gram matrices are the identity."""
    worst = 0.0
    for alpha in (0.0, 0.3, 1.0, 1.7):
        m_max = 20
        rho, w = radial_nodes(auto_rho_cut(alpha + 2 * m_max),
                              nodes_per_panel=40, singular_power=alpha)
        basis = laguerre_fn_sequence(alpha, m_max, rho)
        gram = (basis * w) @ basis.T
        worst = max(worst, float(np.abs(gram - np.eye(m_max + 1)).max()))
    return CriterionResult(1, "laguerre orthonormality", worst <= tol,
                           worst, tol)


def y_series_vs_closed(seed: int = DEFAULT_SEED,
                       tol: float = 1e-9) -> CriterionResult:
    """Series and Bessel closed form of Y agree on a randomized grid."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(200):
        alpha = float(rng.uniform(-0.5, 3.0))
        z1 = float(rng.uniform(0.2, 2.2)) * cmath.exp(
            1j * float(rng.uniform(-1.4, 1.4)))
        z2 = float(rng.uniform(0.2, 2.2)) * cmath.exp(
            1j * float(rng.uniform(-1.4, 1.4)))
        rho = float(rng.uniform(1e-3, 8.0))
        a = y_fn(alpha, z1, z2, rho, mode="series")
        b = y_fn(alpha, z1, z2, rho, mode="closed")
        worst = max(worst, abs(a - b) / max(abs(a), abs(b)))
    return CriterionResult(2, "Y series vs closed form", worst <= tol,
                           worst, tol)


def q_consistency(seed: int = DEFAULT_SEED,
                  tol: float = 1e-8) -> CriterionResult:
    """Series Q^- equals exp(u^2+v^2)[1-T] across the parameter box."""
    worst = 0.0
    for alpha in (0.1, 0.55, 1.0, 1.45, 1.9):
        for u in np.linspace(0.5, 4.0, 5):
            for v in np.linspace(0.5, 4.0, 5):
                series = q_minus(alpha, float(u), float(v), as_log=True)
                integral = (u * u + v * v
                            + math.log(t_complement(alpha, float(u), float(v))))
                worst = max(worst, abs(math.expm1(integral - series)))
    return CriterionResult(3, "Q series vs integral form", worst <= tol,
                           worst, tol)


def semiclassical_means(seed: int = DEFAULT_SEED,
                        tol: float = 1e-3) -> CriterionResult:
    """Occupation means approach |z_s|^2 at (|z1|,|z2|) = (5,3), mu = 1/2.

    Known to fail at this parameter point: the constrained-sector
    correction scales as exp(-(|z1|-|z2|)^2), about 2.6e-2 here.  The
    measured residuals are reported either way.
    """
    p = CoherentParams(j=1, z1=5.0, z2=3.0, mu=0.5)
    r1 = abs(mean_n(p, 1) - 25.0)
    r2 = abs(mean_n(p, 2) - 9.0)
    worst = max(r1, r2)
    return CriterionResult(4, "semiclassical occupation means",
                           worst < tol, worst, tol,
                           details={"residual_n1": r1, "residual_n2": r2})


def _lattice_mean_ladder(lat, op):
    image = apply_ladder(lat.j, lat.mu, lat.coeffs, op)
    acc = sum(lat.coeffs[k].conjugate() * w
              for k, w in image.items() if k in lat.coeffs)
    return acc / lat.norm_sq()


def oracle_equivalence(seed: int = DEFAULT_SEED,
                       tol: float = 1e-7) -> CriterionResult:
    """Analytic means agree with the coefficient-lattice brute force."""
    rng = np.random.default_rng(seed + 5)
    units = Units()
    scale = math.sqrt(units.magnetic_length_sq)
    worst = 0.0
    for j in (0, 1):
        for mu in (0.0, 0.3, 0.7):
            for (m1, m2) in ((2.0, 1.0), (1.0, 2.0), (3.5, 2.0), (4.0, 4.0)):
                ph1 = float(rng.uniform(-2.0, 2.0))
                ph2 = float(rng.uniform(-2.0, 2.0))
                p = CoherentParams(j=j, z1=m1 * cmath.exp(1j * ph1),
                                   z2=m2 * cmath.exp(1j * ph2), mu=mu)
                lat = build_lattice(p)
                for s in (1, 2):
                    brute, _ = observable_moments(lat, f"N{s}")
                    worst = max(worst, abs(mean_n(p, s) - brute))
                    brute_a = _lattice_mean_ladder(lat, f"a{s}")
                    worst = max(worst, abs(mean_a(p, s) - brute_a))
                rep = mean_geometry(p, units)
                pos_brute, _ = observable_moments(lat, "X_plus_iY", units=units)
                worst = max(worst, abs(rep.position_mean - pos_brute))
                worst = max(worst, abs(rep.R_mean - scale * abs(
                    _lattice_mean_ladder(lat, "a1"))))
                worst = max(worst, abs(rep.Rc_mean - scale * abs(
                    _lattice_mean_ladder(lat, "a2"))))
    return CriterionResult(5, "analytic vs lattice oracle means",
                           worst <= tol, worst, tol)


def trajectory_circle(seed: int = DEFAULT_SEED,
                      tol: float = 1e-10) -> CriterionResult:
    """Position mean traces a circle at the cyclotron frequency."""
    units = Units()
    scale = math.sqrt(units.magnetic_length_sq)
    p = CoherentParams(j=1, z1=1.8 * cmath.exp(0.4j), z2=1.0, mu=0.5)
    ts = np.linspace(0.0, 2.0 * math.pi / units.omega, 64, endpoint=False)
    pos = np.array([
        scale * (mean_a(evolve(p, float(t), units), 2)
                 - mean_a(evolve(p, float(t), units), 1).conjugate())
        for t in ts
    ])
    center = scale * mean_a(p, 2)
    radii = np.abs(pos - center)
    fit_residual = float(radii.max() - radii.min())
    ang = np.unwrap(np.angle(pos - center))
    slope = float(np.polyfit(ts, ang, 1)[0])
    freq_err = abs(slope - units.omega) / units.omega
    worst = max(fit_residual, freq_err)
    return CriterionResult(6, "mean trajectory is a cyclotron circle",
                           worst < tol, worst, tol,
                           details={"fit_residual": fit_residual,
                                    "frequency_error": freq_err})


def delta_inequalities(seed: int = DEFAULT_SEED,
                       tol: float = 0.0) -> CriterionResult:
    """Delta < 1 strictly, hence the contracted mean radii."""
    rng = np.random.default_rng(seed + 7)
    units = Units()
    scale = math.sqrt(units.magnetic_length_sq)
    worst = -math.inf  # largest (Delta - 1); must stay negative
    for _ in range(25):
        mu = float(rng.uniform(0.05, 0.95))
        u = float(rng.uniform(0.3, 4.0))
        v = float(rng.uniform(0.3, 4.0))
        worst = max(worst, delta_fn(1.0 - mu, u, v) - 1.0)
        worst = max(worst, delta_fn(mu, v, u) - 1.0)
        p1 = CoherentParams(j=1, z1=v, z2=u, mu=mu)
        worst = max(worst, mean_geometry(p1, units).Rc_mean - scale * u)
        p0 = CoherentParams(j=0, z1=u, z2=v, mu=mu)
        worst = max(worst, mean_geometry(p0, units).R_mean - scale * u)
    return CriterionResult(7, "Delta contraction inequalities",
                           worst < tol, worst, tol)


def spectrum_splitting(seed: int = DEFAULT_SEED,
                       tol: float = 1e-12) -> CriterionResult:
    """Two energy ladders {m+1/2} and {m+l+mu+1/2}; pure Landau at mu=0."""
    worst = 0.0
    for e in level_diagram(0.3, 6, -6, 6):
        want = e.qn.m + 0.5 if e.qn.j == 0 else e.qn.m + e.qn.l + 0.8
        worst = max(worst, abs(e.energy_hw - want))
    for e in level_diagram(0.0, 6, -6, 6):
        worst = max(worst, abs(e.energy_hw - (round(e.energy_hw - 0.5) + 0.5)))
    return CriterionResult(8, "Landau level splitting ladders",
                           worst <= tol, worst, tol)


def sector_indicator(seed: int = DEFAULT_SEED,
                     tol: float = 1e-9) -> CriterionResult:
    """<R^2 - Rc^2> = 2 hbar (l+mu)/(M omega), positive iff l >= 0.

    The R^2 side comes from radial quadrature of the rho-weighted density
    combined with the exact Lz eigenvalue; the Rc^2 side from the ladder
    dictionary, so the comparison is a real quadrature test.
    """
    units = Units()
    scale = units.hbar / (units.mass * units.omega)
    worst = 0.0
    sign_ok = True
    for (j, m, l) in ((1, 0, 0), (1, 2, 1), (1, 1, 4), (0, 0, -1),
                      (0, 2, -2), (0, 1, -5)):
        for mu in (0.1, 0.5, 0.9):
            qn = make_qn(j, m, l, mu)
            alpha, mm = radial_alpha_index(qn)
            rho, w = radial_nodes(auto_rho_cut(alpha + 2 * mm + 6),
                                  nodes_per_panel=40, singular_power=alpha)
            dens = laguerre_fn(alpha, mm, rho) ** 2
            rho_mean = float((rho * dens * w).sum())
            r2_quad = scale * (rho_mean + (qn.l + qn.mu))
            rc2_dict = mean_r2_rc2(qn, units)[1]
            diff = r2_quad - rc2_dict
            want = 2.0 * units.hbar * (l + mu) / (units.mass * units.omega)
            worst = max(worst, abs(diff - want))
            sign_ok = sign_ok and ((diff > 0) == (l >= 0))
    return CriterionResult(9, "sector indicator mean", worst <= tol and sign_ok,
                           worst, tol, details={"sign_consistent": sign_ok})


def malkin_manko_reduction(seed: int = DEFAULT_SEED,
                           tol: float = 1e-8) -> CriterionResult:
    """mu=0: combined sectors equal the two-mode coherent state."""
    z1, z2 = 1.4, 1.1
    combined = {}
    for j in (0, 1):
        lat = build_lattice(CoherentParams(j=j, z1=z1, z2=z2, mu=0.0))
        for (m, l), c in lat.coeffs.items():
            n1, n2 = lat.n1n2(m, l)
            combined[(int(round(n1)), int(round(n2)))] = c
    brute = {}
    for n1 in range(28):
        for n2 in range(28):
            brute[(n1, n2)] = (z1 ** n1 * z2 ** n2
                               / math.sqrt(math.factorial(n1)
                                           * math.factorial(n2)))
    keys = set(combined) | set(brute)
    dot = sum(combined.get(k, 0.0) * np.conj(brute.get(k, 0.0)) for k in keys)
    na = math.sqrt(sum(abs(v) ** 2 for v in combined.values()))
    nb = math.sqrt(sum(abs(v) ** 2 for v in brute.values()))
    modulus = abs(dot) / (na * nb)
    return CriterionResult(10, "two-mode coherent state reduction at mu=0",
                           modulus >= 1.0 - tol, 1.0 - modulus, tol)


def near_solenoid_spread(seed: int = DEFAULT_SEED,
                         tol: float = 2.0) -> CriterionResult:
    """Position variance blows up near the critical orbit |z1| = |z2|.

    Compares period-averaged variances at (3,3) and (3,1); also checks the
    relative R^2 variance stays below the near-critical relative position
    spread.  The measured values are reported.
    """
    mu = 0.5

    def period_stats(z1m, z2m):
        var = 0.0
        r2 = 0.0
        for z1 in (z1m, -z1m):  # the oscillating term averages out
            lat = build_lattice(CoherentParams(j=1, z1=z1, z2=z2m, mu=mu))
            mean, v = observable_moments(lat, "X_plus_iY")
            var += v / 2.0
            r2 += (v + abs(mean) ** 2) / 2.0
        return var, r2

    var_near, r2_near = period_stats(3.0, 3.0)
    var_far, _ = period_stats(3.0, 1.0)
    ratio = var_near / var_far
    lat = build_lattice(CoherentParams(j=1, z1=3.0, z2=3.0, mu=mu))
    m_r2, v_r2 = observable_moments(lat, "R2")
    rel_r2 = v_r2 / m_r2 ** 2
    rel_pos = var_near / r2_near
    ok = ratio > tol and rel_r2 < rel_pos
    return CriterionResult(11, "near-critical position spread", ok, ratio, tol,
                           details={"var_near": var_near, "var_far": var_far,
                                    "rel_var_r2": rel_r2,
                                    "rel_var_position": rel_pos})


def schrodinger_residual(seed: int = DEFAULT_SEED,
                         tol: float = 1e-6) -> CriterionResult:
    """i dPhi/dt = omega N1 Phi by finite differences at random points."""
    rng = np.random.default_rng(seed + 12)
    units = Units()
    p = CoherentParams(j=1, z1=1.2, z2=0.8, mu=0.5)
    lat = build_lattice(p)
    h = 1e-5
    worst = 0.0
    for _ in range(50):
        r = float(rng.uniform(0.3, 2.5))
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
        t = float(rng.uniform(0.0, 3.0))

        def f(tt, s=1.0):
            pp = CoherentParams(j=p.j, z1=p.z1 * s, z2=p.z2, mu=p.mu)
            return transverse_state(pp, units, tt, r, phi,
                                    l_bounds=lat.l_bounds)

        d_t = (4 * (f(t + h / 2) - f(t - h / 2)) / h
               - (f(t + h) - f(t - h)) / (2 * h)) / 3
        n1_phi = (4 * (f(t, 1 + h / 2) - f(t, 1 - h / 2)) / h
                  - (f(t, 1 + h) - f(t, 1 - h)) / (2 * h)) / 3
        worst = max(worst, abs(1j * d_t - units.omega * n1_phi))
    return CriterionResult(12, "coherent-state equation of motion residual",
                           worst < tol, worst, tol)


CRITERIA = [
    laguerre_orthonormality,
    y_series_vs_closed,
    q_consistency,
    semiclassical_means,
    oracle_equivalence,
    trajectory_circle,
    delta_inequalities,
    spectrum_splitting,
    sector_indicator,
    malkin_manko_reduction,
    near_solenoid_spread,
    schrodinger_residual,
]


def run_all(seed: int = DEFAULT_SEED, tol_overrides: dict = None):
    """Run every acceptance criterion; returns the list of results."""
    tol_overrides = tol_overrides or {}
    results = []
    for fn in CRITERIA:
        cid = len(results) + 1
        if cid in tol_overrides:
            results.append(fn(seed=seed, tol=tol_overrides[cid]))
        else:
            results.append(fn(seed=seed))
    return results
