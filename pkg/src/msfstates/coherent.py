"""Coherent states in the uniform field plus flux line.

A coherent state of sector j is a Poisson-weighted superposition of the
sector's eigenstates over both quantum numbers,

    sum_{l,m} z1^n1 z2^n2 / sqrt(Gamma(1+n1) Gamma(1+n2)) * Phi^(j)_{n1,n2},

with complex parameters z1 (orbit radius/phase) and z2 (orbit center).
Everything observable about these states reduces to three special-function
families implemented here:

  * Y_alpha(z1, z2; rho): the radial profile of one angular component,
    with a closed form through the Bessel function J_alpha.
  * Q_alpha(u, v) and its partial series Q_alpha^-: overlaps and norms,
    built from modified Bessel functions I_{alpha+l}(2uv).
  * T(u, v): an integral representation of the same, used to evaluate the
    exponentially scaled form Q~ = exp(-u^2-v^2) Q without overflow.

A truncated coefficient lattice over the (m, l) basis grid serves as the
brute-force oracle for means and variances.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate
from scipy.special import gammaln, ive, iv, jv, logsumexp

from .classical import Units
from .errors import (
    BranchCutError,
    ConvergenceError,
    DomainError,
    QuadratureError,
    TruncationBudgetError,
)
from .spectrum import IRREGULAR, ZERO, ladder_apply, make_qn
from .specfun import SERIES_TOL, _laguerre_fn_seed, sum_series

__all__ = [
    "CoherentParams",
    "CoefficientLattice",
    "MeanReport",
    "y_fn",
    "t_fn",
    "t_complement",
    "q_minus",
    "q_fn",
    "q_tilde",
    "log_q_tilde",
    "delta_fn",
    "overlap",
    "mean_n",
    "mean_a",
    "mean_geometry",
    "build_lattice",
    "apply_ladder",
    "observable_moments",
    "evolve",
    "transverse_state",
    "wavefunction",
]

_LADDER_OPS = ("a1", "a1_dag", "a2", "a2_dag")


@dataclass(frozen=True)
class CoherentParams:
    """Sector j plus the complex parameters (z1, z2) of a coherent state."""

    j: int
    z1: complex
    z2: complex
    mu: float
    l0: int = 0

    def __post_init__(self):
        if self.j not in (0, 1):
            raise DomainError(f"sector j must be 0 or 1, got {self.j}")
        if not 0.0 <= self.mu < 1.0:
            raise DomainError(f"mu must lie in [0,1), got {self.mu}")
        if not (cmath.isfinite(complex(self.z1)) and cmath.isfinite(complex(self.z2))):
            raise DomainError("z1, z2 must be finite")


# ---------------------------------------------------------------------------
# Y functions
# ---------------------------------------------------------------------------

def _principal_pow(z: complex, a: float) -> complex:
    """z**a with the principal logarithm, Arg z in (-pi, pi]."""
    if z == 0:
        return 1.0 + 0j if a == 0.0 else 0.0 + 0j
    return cmath.exp(a * cmath.log(z))


def _rho_pow(rho: np.ndarray, half_alpha: float) -> np.ndarray:
    """rho**half_alpha with explicit rho=0 handling."""
    out = np.empty_like(rho)
    pos = rho > 0
    out[pos] = np.power(rho[pos], half_alpha)
    if np.any(~pos):
        if half_alpha > 0:
            out[~pos] = 0.0
        elif half_alpha == 0:
            out[~pos] = 1.0
        else:
            out[~pos] = math.inf
    return out


def _bessel_j_ratio(alpha: float, w: np.ndarray) -> np.ndarray:
    """J_alpha(2 sqrt(w)) / (sqrt(w))^alpha, entire in w.

    Both factors use the same principal square root, so their ratio is
    single-valued; near w=0 the ascending series is used directly.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    out = np.empty_like(w)
    small = np.abs(w) < 1e-6
    if np.any(small):
        ws = w[small]
        acc = np.zeros_like(ws)
        term = np.full_like(ws, 1.0 / math.gamma(alpha + 1.0))
        for k in range(6):
            acc = acc + term
            term = term * (-ws) / ((k + 1.0) * (alpha + k + 1.0))
        out[small] = acc
    big = ~small
    if np.any(big):
        zeta = 2.0 * np.sqrt(w[big])
        out[big] = jv(alpha, zeta) * np.exp(-alpha * np.log(0.5 * zeta))
    return out


def _y_series(alpha: float, z1: complex, z2: complex, rho: np.ndarray,
              tol: float) -> np.ndarray:
    if z2 == 0:
        if alpha == 0.0:
            return _laguerre_fn_seed(0.0, rho).astype(complex)
        return np.zeros_like(rho, dtype=complex)
    c0 = _principal_pow(z2, alpha) * math.exp(-0.5 * math.lgamma(1.0 + alpha))
    i_prev = _laguerre_fn_seed(alpha, rho)
    if z1 == 0:
        return c0 * i_prev.astype(complex)

    def terms():
        c = c0
        cur = i_prev
        nxt = (alpha + 1.0 - rho) / math.sqrt(alpha + 1.0) * cur
        m = 0
        while True:
            yield c * cur
            c = c * z1 * z2 / math.sqrt((m + 1.0) * (m + 1.0 + alpha))
            m += 1
            a = (2 * m + alpha + 1 - rho) / math.sqrt((m + 1) * (m + alpha + 1))
            b = math.sqrt(m * (m + alpha) / ((m + 1) * (m + alpha + 1)))
            cur, nxt = nxt, a * nxt - b * cur

    return sum_series(terms(), tol=tol, max_terms=20_000).value


def _y_closed(alpha: float, z1: complex, z2: complex,
              rho: np.ndarray) -> np.ndarray:
    if z1 == 0:
        if alpha != 0.0:
            raise BranchCutError(
                "closed form of Y is undefined at z1=0 for alpha != 0; "
                "use series mode"
            )
        return np.exp(-0.5 * rho).astype(complex)
    pref = (
        np.exp(z1 * z2 - 0.5 * rho)
        * _principal_pow(z2, alpha)
        * _rho_pow(rho, 0.5 * alpha)
    )
    return pref * _bessel_j_ratio(alpha, z1 * z2 * rho)


def y_fn(alpha: float, z1: complex, z2: complex, rho, mode: str = "closed",
         tol: float = SERIES_TOL):
    """Radial profile function of one angular component of a coherent state.

    Series mode sums z1^m z2^(m+alpha) I_{m+alpha,m}(rho) /
    sqrt(Gamma(1+m) Gamma(1+m+alpha)) over m under the package truncation
    rule.  Closed mode evaluates the equivalent Bessel form
    exp(z1 z2 - rho/2) (sqrt(z2/z1))^alpha J_alpha(2 sqrt(z1 z2 rho)),
    computed single-valued via the entire ratio J_alpha(zeta)/(zeta/2)^alpha
    so only the z2^alpha factor carries a branch choice (principal).
    rho may be a scalar or ndarray.
    """
    if not alpha > -1:
        raise DomainError(f"y_fn requires alpha > -1, got {alpha}")
    scalar = np.ndim(rho) == 0
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho_arr < 0):
        raise DomainError("y_fn requires rho >= 0")
    z1c, z2c = complex(z1), complex(z2)
    if mode == "series":
        out = _y_series(alpha, z1c, z2c, rho_arr, tol)
    elif mode == "closed":
        out = _y_closed(alpha, z1c, z2c, rho_arr)
    else:
        raise ValueError(f"mode must be 'series' or 'closed', got {mode!r}")
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Q functions and the T integral
# ---------------------------------------------------------------------------

def _check_uv(alpha: float, u: float, v: float):
    if not alpha > -1:
        raise DomainError(f"requires alpha > -1, got {alpha}")
    if not (u > 0 and v > 0):
        raise DomainError(f"requires u, v > 0, got u={u}, v={v}")


def _log_q_series(alpha: float, u: float, v: float, l_start: int,
                  tol: float = SERIES_TOL, max_terms: int = 20_000) -> float:
    """log of sum_{l >= l_start} (v/u)^(alpha+l) I_{alpha+l}(2uv).

    All terms are positive; each is computed in log space through the
    scaled Bessel function, so the result is exact to rounding even when
    the sum is exp(u^2+v^2)-large.
    """
    x = 2.0 * u * v
    log_ratio = math.log(v) - math.log(u)
    logs = []
    best = -math.inf
    small_run = 0
    prev = math.inf
    l = l_start
    while l - l_start < max_terms:
        nu = alpha + l
        lt = nu * log_ratio + math.log(ive(nu, x)) + x
        logs.append(lt)
        best = max(best, lt)
        if lt < best + math.log(tol):
            small_run += 1
            r = math.exp(lt - prev) if prev < math.inf else 0.0
            if small_run >= 3 and r < 1.0 and lt + math.log(r / (1 - r)) < best + math.log(tol):
                return float(logsumexp(logs))
        else:
            small_run = 0
        prev = lt
        l += 1
    raise ConvergenceError("Q series did not converge")


def _q_series_complex(alpha: float, u: complex, v: complex,
                      l_start: int) -> complex:
    """sum_{l >= l_start} (v/u)^(alpha+l) I_{alpha+l}(2uv) for complex u, v."""
    ratio_a = _principal_pow(v / u, alpha + l_start)
    ratio = v / u
    x = 2.0 * u * v

    def terms():
        c = ratio_a
        l = l_start
        while True:
            t = c * iv(alpha + l, x)
            if not np.all(np.isfinite([t.real, t.imag])):
                raise OverflowError(
                    "overlap series term overflowed; arguments too large"
                )
            yield t
            c = c * ratio
            l += 1

    return complex(sum_series(terms(), tol=SERIES_TOL, max_terms=20_000).value)


def _t_kernel(alpha: float, u: float):
    """Integrand of the T representation with the overflow factored out:
    2 exp(-(s-u)^2) (s/u)^alpha e^{-2us}I_alpha(2us) s."""

    def f(s: float) -> float:
        if s <= 0.0:
            return 0.0
        return (
            2.0
            * math.exp(-((s - u) ** 2) + alpha * (math.log(s) - math.log(u)))
            * ive(alpha, 2.0 * u * s)
            * s
        )

    return f


def _quad(f, a: float, b: float, interior: float = None) -> tuple:
    pts = [interior] if interior is not None and a < interior < b else None
    val, err = integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13,
                              limit=300, points=pts)
    return val, err


def t_fn(alpha: float, u: float, v: float) -> float:
    """Tail integral T(u,v) = 2 e^{-u^2} int_v^inf e^{-s^2}(s/u)^alpha
    I_alpha(2us) s ds, evaluated with the scaled Bessel kernel so the
    integrand never overflows."""
    _check_uv(alpha, u, v)
    cut = max(u, v) + 30.0  # kernel ~ exp(-(s-u)^2) is ~1e-390 past here
    val, err = _quad(_t_kernel(alpha, u), v, cut, interior=u)
    if err > max(1e-12, 1e-10 * abs(val)):
        raise QuadratureError(
            f"T(u,v) quadrature achieved {err:.3e}", achieved=err
        )
    return val


def t_complement(alpha: float, u: float, v: float) -> float:
    """1 - T(u,v), computed as the same kernel integrated over [0, v].

    The complete integral over [0, inf) equals 1, so this form avoids the
    catastrophic cancellation of 1 - T when T is close to 1.
    """
    _check_uv(alpha, u, v)
    val, err = _quad(_t_kernel(alpha, u), 0.0, v, interior=u)
    if err > max(1e-12, 1e-10 * abs(val)):
        raise QuadratureError(
            f"1-T(u,v) quadrature achieved {err:.3e}", achieved=err
        )
    return val


def _exp_or_overflow(log_val: float, what: str) -> float:
    if log_val > 709.0:
        raise OverflowError(
            f"{what} = exp({log_val:.1f}) exceeds float range; "
            "request the log-scaled value instead"
        )
    return math.exp(log_val)


def q_minus(alpha: float, u: float, v: float, as_log: bool = False) -> float:
    """Partial overlap series Q_alpha^-(u,v) = sum_{l>=1} (v/u)^(alpha+l)
    I_{alpha+l}(2uv).  With as_log=True returns its natural log."""
    _check_uv(alpha, u, v)
    lq = _log_q_series(alpha, u, v, l_start=1)
    return lq if as_log else _exp_or_overflow(lq, "Q^-")


def q_fn(alpha: float, u: float, v: float, as_log: bool = False) -> float:
    """Full overlap function Q_alpha(u,v) = Q_alpha^-(u,v) +
    (v/u)^alpha I_alpha(2uv)."""
    _check_uv(alpha, u, v)
    lq = _log_q_series(alpha, u, v, l_start=0)
    return lq if as_log else _exp_or_overflow(lq, "Q")


def log_q_tilde(alpha: float, u: float, v: float) -> float:
    """log of Q~_alpha(u,v) = exp(-u^2-v^2) Q_alpha(u,v).

    Evaluated from the positive-term series in log space (cancellation
    free); used where smooth derivatives of log Q~ are needed.
    """
    return q_fn(alpha, u, v, as_log=True) - u * u - v * v


def q_tilde(alpha: float, u: float, v: float) -> float:
    """Exponentially scaled overlap Q~_alpha(u,v) = 1 - T(u,v) +
    exp(-u^2-v^2)(v/u)^alpha I_alpha(2uv).

    Assembled from the [0,v] form of 1-T and the scaled Bessel boundary
    term: every piece is positive and O(1), nothing huge is multiplied by
    anything tiny.
    """
    _check_uv(alpha, u, v)
    boundary = (
        math.exp(-((u - v) ** 2) + alpha * (math.log(v) - math.log(u)))
        * ive(alpha, 2.0 * u * v)
    )
    return t_complement(alpha, u, v) + boundary


def delta_fn(alpha: float, u: float, v: float) -> float:
    """Contraction ratio Delta_alpha(u,v) = Q_alpha^-/Q_alpha, in (0,1)."""
    _check_uv(alpha, u, v)
    return math.exp(
        _log_q_series(alpha, u, v, l_start=1)
        - _log_q_series(alpha, u, v, l_start=0)
    )


# ---------------------------------------------------------------------------
# Overlaps and mean values
# ---------------------------------------------------------------------------

def _branch_checked_sqrt(w: complex, what: str) -> complex:
    if w.imag == 0.0 and w.real < 0.0:
        raise BranchCutError(
            f"{what} lies on the negative real axis; the principal branch "
            "is discontinuous there"
        )
    return cmath.sqrt(w)


def overlap(p: CoherentParams, p2: CoherentParams = None,
            as_log: bool = False) -> complex:
    """Inner product of two coherent states (unnormalized).

    Cross-sector overlaps vanish identically.  Within a sector the value is
    Q_{1-mu}(sqrt(z1* z1'), sqrt(z2* z2')) for j=0 and
    Q_mu(sqrt(z2* z2'), sqrt(z1* z1')) for j=1, with principal square
    roots; arguments on the negative real axis raise BranchCutError.
    With as_log=True returns the complex natural log (usable when the
    overlap itself would overflow; -inf real part for a vanishing overlap).
    """
    if p2 is None:
        p2 = p
    if p.mu != p2.mu or p.l0 != p2.l0:
        raise ValueError("overlap requires matching mu and l0")
    if p.j != p2.j:
        return complex(-math.inf, 0.0) if as_log else 0.0 + 0.0j
    a = complex(p.z1).conjugate() * complex(p2.z1)
    b = complex(p.z2).conjugate() * complex(p2.z2)
    if p.j == 0:
        alpha, first, second = 1.0 - p.mu, a, b
    else:
        alpha, first, second = p.mu, b, a
    if first.imag == 0 and second.imag == 0 and first.real >= 0 and second.real >= 0:
        # diagonal-type case: real nonnegative products, log-space path
        u = math.sqrt(first.real)
        v = math.sqrt(second.real)
        if u == 0.0 or v == 0.0:
            lat = build_lattice(p)
            lat2 = build_lattice(p2)
            val = complex(sum(
                lat.coeffs[k].conjugate() * lat2.coeffs[k]
                for k in sorted(set(lat.coeffs) & set(lat2.coeffs))
            ))
            if as_log:
                return cmath.log(val) if val != 0 else complex(-math.inf, 0.0)
            return val
        lq = q_fn(alpha, u, v, as_log=True)
        return complex(lq, 0.0) if as_log else complex(_exp_or_overflow(lq, "overlap"))
    u = _branch_checked_sqrt(first, "z-overlap product")
    v = _branch_checked_sqrt(second, "z-overlap product")
    val = _q_series_complex(alpha, u, v, l_start=0)
    return cmath.log(val) if as_log else val


def _d_log_qtilde(alpha: float, u: float, v: float, wrt: int) -> float:
    """Richardson-extrapolated centered difference of log Q~ in u (wrt=0)
    or v (wrt=1), relative step 1e-5."""
    x = (u, v)[wrt]
    h = 1e-5 * x

    def f(val: float) -> float:
        args = [u, v]
        args[wrt] = val
        return log_q_tilde(alpha, args[0], args[1])

    def diff(step: float) -> float:
        return (f(x + step) - f(x - step)) / (2.0 * step)

    return (4.0 * diff(0.5 * h) - diff(h)) / 3.0


def _sector_uv(p: CoherentParams):
    """(alpha, u, v, slot_of_z1) of the sector's Q function on the diagonal."""
    if p.j == 0:
        return 1.0 - p.mu, abs(p.z1), abs(p.z2), 0
    return p.mu, abs(p.z2), abs(p.z1), 1


def mean_n(p: CoherentParams, s: int) -> float:
    """Mean occupation <N_s> = |z_s|^2 + z_s d/dz_s' log R~ on the diagonal.

    The correction term is the scaled derivative of log Q~ with respect to
    the slot carrying z_s; it is computed by Richardson-extrapolated
    centered differences.  Degenerate parameters (z1=0 or z2=0) fall back
    to the lattice sum.
    """
    if s not in (1, 2):
        raise ValueError(f"s must be 1 or 2, got {s}")
    if abs(p.z1) == 0.0 or abs(p.z2) == 0.0:
        return _lattice_mean_n(p, s)
    alpha, u, v, z1_slot = _sector_uv(p)
    zs_mod = abs(p.z1) if s == 1 else abs(p.z2)
    slot = z1_slot if s == 1 else 1 - z1_slot
    corr = 0.5 * (u, v)[slot] * _d_log_qtilde(alpha, u, v, wrt=slot)
    return zs_mod * zs_mod + corr


def _lattice_mean_n(p: CoherentParams, s: int) -> float:
    lat = build_lattice(p)
    mean, _ = observable_moments(lat, f"N{s}")
    return mean


def mean_a(p: CoherentParams, s: int) -> complex:
    """Mean of the lowering operator a_s: z_s itself in the sector where the
    ladder stays inside the regular domain, contracted by Delta < 1 in the
    other (j=0: <a1> = z1 Delta_{1-mu}(|z1|,|z2|); j=1: <a2> =
    z2 Delta_mu(|z2|,|z1|))."""
    if s not in (1, 2):
        raise ValueError(f"s must be 1 or 2, got {s}")
    z1, z2 = complex(p.z1), complex(p.z2)
    if abs(z1) == 0.0 or abs(z2) == 0.0:
        return _lattice_mean_a(p, s)
    if p.j == 0:
        return z1 * delta_fn(1.0 - p.mu, abs(z1), abs(z2)) if s == 1 else z2
    return z1 if s == 1 else z2 * delta_fn(p.mu, abs(z2), abs(z1))


def _lattice_mean_a(p: CoherentParams, s: int) -> complex:
    lat = build_lattice(p)
    op = "a1" if s == 1 else "a2"
    norm = lat.norm_sq()
    if norm == 0.0:
        raise DomainError("coherent state is the zero vector")
    image = apply_ladder(p.j, p.mu, lat.coeffs, op)
    acc = 0.0 + 0.0j
    for k, w in image.items():
        c = lat.coeffs.get(k)
        if c is not None:
            acc += c.conjugate() * w
    return acc / norm


@dataclass(frozen=True)
class MeanReport:
    """Mean values and variances of one coherent state."""

    n1_mean: float
    n2_mean: float
    a1_mean: complex
    a2_mean: complex
    position_mean: complex
    R_mean: float
    Rc_mean: float
    var_R2: float
    var_Rc2: float
    var_position: float


def mean_geometry(p: CoherentParams, units: Units = Units()) -> MeanReport:
    """Geometric summary of a coherent state.

    Orbit radius mean: sqrt(2 hbar/M omega)|z1| for j=1, contracted by
    Delta_{1-mu} for j=0; center distance mean the mirror image.  The
    position mean is sqrt(2 hbar/M omega)(<a2> - <a1>*).  Variances come
    from the coefficient-lattice oracle.
    """
    scale = math.sqrt(units.magnetic_length_sq)
    a1 = mean_a(p, 1)
    a2 = mean_a(p, 2)
    lat = build_lattice(p)
    _, var_r2 = observable_moments(lat, "R2", units=units)
    _, var_rc2 = observable_moments(lat, "Rc2", units=units)
    _, var_pos = observable_moments(lat, "X_plus_iY", units=units)
    return MeanReport(
        n1_mean=mean_n(p, 1),
        n2_mean=mean_n(p, 2),
        a1_mean=a1,
        a2_mean=a2,
        position_mean=scale * (a2 - a1.conjugate()),
        R_mean=scale * abs(a1),
        Rc_mean=scale * abs(a2),
        var_R2=var_r2,
        var_Rc2=var_rc2,
        var_position=var_pos,
    )


# ---------------------------------------------------------------------------
# Coefficient lattice (brute-force oracle)
# ---------------------------------------------------------------------------

@dataclass
class CoefficientLattice:
    """Truncated expansion coefficients of a coherent state over the (m, l)
    eigenbasis grid.  tail_mass bounds the squared-norm fraction omitted by
    the truncation (relative to the retained norm)."""

    j: int
    mu: float
    l0: int
    z1: complex
    z2: complex
    coeffs: dict = field(default_factory=dict)
    m_max: int = -1
    l_bounds: tuple = (0, -1)
    tail_mass: float = 0.0

    def norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def n1n2(self, m: int, l: int):
        if self.j == 1:
            return m + l + self.mu, float(m)
        return float(m), m - l - self.mu

    def to_text(self) -> str:
        lines = [
            "# coherent-state coefficient lattice v1",
            f"# j={self.j} mu={self.mu!r} l0={self.l0}",
            f"# z1={self.z1.real!r},{self.z1.imag!r} "
            f"z2={self.z2.real!r},{self.z2.imag!r}",
            f"# m_max={self.m_max} l_min={self.l_bounds[0]} "
            f"l_max={self.l_bounds[1]} tail_mass={self.tail_mass!r}",
            "m,l,re,im",
        ]
        for (m, l) in sorted(self.coeffs):
            c = self.coeffs[(m, l)]
            lines.append(f"{m},{l},{c.real!r},{c.imag!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CoefficientLattice":
        header = {}
        coeffs = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line == "m,l,re,im":
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        header[k] = v
                continue
            m_s, l_s, re_s, im_s = line.split(",")
            coeffs[(int(m_s), int(l_s))] = complex(float(re_s), float(im_s))
        z1re, z1im = (float(t) for t in header["z1"].split(","))
        z2re, z2im = (float(t) for t in header["z2"].split(","))
        return cls(
            j=int(header["j"]),
            mu=float(header["mu"]),
            l0=int(header["l0"]),
            z1=complex(z1re, z1im),
            z2=complex(z2re, z2im),
            coeffs=coeffs,
            m_max=int(header["m_max"]),
            l_bounds=(int(header["l_min"]), int(header["l_max"])),
            tail_mass=float(header["tail_mass"]),
        )


def _tail_cut(lam: float, offset: float, log_threshold: float,
              start: int) -> tuple:
    """Smallest n with geometric tail bound of sum_{k>n} lam^(k+offset) /
    Gamma(k+offset+1) below exp(log_threshold).  Returns (n, log_bound)."""
    n = start
    while True:
        denom = n + 1.0 + offset + 1.0
        if lam < 0.5 * denom:
            r = lam / denom
            log_t = (n + 1 + offset) * math.log(lam) - math.lgamma(n + 2 + offset)
            log_bound = log_t - math.log(1.0 - r)
            if log_bound <= log_threshold:
                return n, log_bound
        n += max(2, n // 8)


def _log_pow(mod_sq: float, expo: float) -> float:
    return expo * math.log(mod_sq)


def build_lattice(p: CoherentParams, tol: float = 1e-10,
                  max_cells: int = 2_000_000) -> CoefficientLattice:
    """Truncated coefficient lattice of a coherent state.

    Coefficients are z1^n1 z2^n2 / sqrt(Gamma(1+n1) Gamma(1+n2)) with
    principal powers; the (m, l) ranges are grown until analytic geometric
    tail bounds fall below tol relative to the retained squared norm, then
    cells individually below tol/(10*cells) of the norm are pruned into
    tail_mass.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    j, mu = p.j, p.mu
    z1, z2 = complex(p.z1), complex(p.z2)
    x, y = abs(z1) ** 2, abs(z2) ** 2

    if x == 0.0 or y == 0.0:
        return _degenerate_lattice(p, tol)

    log_tol = math.log(tol)
    # first index: m; second index: k (l=k for j=1, l=-1-k for j=0)
    if j == 1:
        m_lam, m_off, k_lam, k_off = y, 0.0, x, mu
    else:
        m_lam, m_off, k_lam, k_off = x, 0.0, y, 1.0 - mu

    # the non-summed factor in each tail bound is itself bounded by a full
    # exponential series: e^x or e^y depending on sector and direction
    log_m_pref = x if j == 1 else y
    log_k_pref = y if j == 1 else x
    m_hi = int(m_lam + 8.0 * math.sqrt(m_lam) + 8.0)
    k_hi = int(k_lam + 8.0 * math.sqrt(k_lam) + 8.0)
    while True:
        m_hi, log_bm = _tail_cut(m_lam, m_off, log_tol, m_hi)
        k_hi, log_bk = _tail_cut(k_lam, k_off, log_tol, k_hi)
        n_cells = (m_hi + 1) * (k_hi + 1)
        if n_cells > max_cells:
            raise TruncationBudgetError(
                f"lattice needs {n_cells} cells, cap is {max_cells}"
            )
        m_idx = np.arange(m_hi + 1)[:, None]
        k_idx = np.arange(k_hi + 1)[None, :]
        if j == 1:
            n1 = m_idx + k_idx + mu
            n2 = (m_idx + np.zeros_like(k_idx)).astype(float)
        else:
            n1 = (m_idx + np.zeros_like(k_idx)).astype(float)
            n2 = m_idx + k_idx + 1.0 - mu
        logw = (
            n1 * math.log(x) + n2 * math.log(y)
            - gammaln(1.0 + n1) - gammaln(1.0 + n2)
        )
        log_norm = float(logw.max() + math.log(np.exp(logw - logw.max()).sum()))
        log_tail = np.logaddexp(log_m_pref + log_bm, log_k_pref + log_bk)
        if log_tail <= log_norm + log_tol + math.log(0.5):
            break
        m_hi += max(4, m_hi // 4)
        k_hi += max(4, k_hi // 4)

    # assemble complex coefficients, pruning negligible cells
    cell_cut = log_norm + log_tol - math.log(10.0 * n_cells)
    keep = logw >= cell_cut
    pruned_mass = float(np.exp(logw[~keep] - log_norm).sum()) if np.any(~keep) else 0.0

    log_z1 = cmath.log(z1)
    log_z2 = cmath.log(z2)
    half = 0.5 * logw  # = n1 ln|z1| + n2 ln|z2| - lgamma/2 - lgamma/2
    phase = n1 * log_z1.imag + n2 * log_z2.imag
    coeffs = {}
    mm, kk = np.nonzero(keep)
    vals = np.exp(half[keep] + 1j * phase[keep])
    for mi, ki, c in zip(mm.tolist(), kk.tolist(), vals.tolist()):
        l = ki if j == 1 else -1 - ki
        coeffs[(mi, l)] = c
    l_bounds = (0, k_hi) if j == 1 else (-1 - k_hi, -1)
    tail = math.exp(log_tail - log_norm) + pruned_mass
    return CoefficientLattice(
        j=j, mu=mu, l0=p.l0, z1=z1, z2=z2, coeffs=coeffs,
        m_max=m_hi, l_bounds=l_bounds, tail_mass=tail,
    )


def _single_line_lattice(p: CoherentParams, z: complex, offset: float,
                         tol: float, key_of):
    """One-row/one-column lattice: coefficients z^(k+offset) /
    sqrt(Gamma(1+k+offset)) for k = 0..cut, keyed by key_of(k)."""
    lam = abs(z) ** 2
    log_first = offset * math.log(lam) - math.lgamma(1.0 + offset) if lam > 0 else 0.0
    cut, log_bound = _tail_cut(lam, offset, math.log(tol) + log_first,
                               int(lam + 8 * math.sqrt(lam) + 8))
    coeffs = {}
    for k in range(cut + 1):
        n = k + offset
        coeffs[key_of(k)] = _principal_pow(z, n) * math.exp(
            -0.5 * math.lgamma(1.0 + n))
    norm = sum(abs(c) ** 2 for c in coeffs.values())
    ls = [key[1] for key in coeffs]
    return coeffs, (min(ls), max(ls)), math.exp(log_bound) / norm


def _degenerate_lattice(p: CoherentParams, tol: float) -> CoefficientLattice:
    """Lattices with z1=0 or z2=0: at most a single row or column survives.

    A zero base contributes only where its exponent vanishes exactly:
    j=1: n1 = m+l+mu = 0 needs mu=0, m=l=0; n2 = m = 0 keeps the m=0 row.
    j=0: n1 = m = 0 keeps the m=0 column; n2 = m-l-mu >= 1-mu never
    vanishes, so z2=0 gives the zero vector there.
    """
    j, mu = p.j, p.mu
    z1, z2 = complex(p.z1), complex(p.z2)
    x, y = abs(z1) ** 2, abs(z2) ** 2

    def make(coeffs, m_max, l_bounds, tail):
        return CoefficientLattice(j=j, mu=mu, l0=p.l0, z1=z1, z2=z2,
                                  coeffs=coeffs, m_max=m_max,
                                  l_bounds=l_bounds, tail_mass=tail)

    if j == 1:
        if x == 0.0:
            if mu == 0.0:
                return make({(0, 0): 1.0 + 0.0j}, 0, (0, 0), 0.0)
            return make({}, -1, (0, -1), 0.0)
        if y == 0.0:
            coeffs, l_bounds, tail = _single_line_lattice(
                p, z1, mu, tol, key_of=lambda k: (0, k))
            return make(coeffs, 0, l_bounds, tail)
    else:
        if y == 0.0:
            return make({}, -1, (0, -1), 0.0)
        if x == 0.0:
            coeffs, l_bounds, tail = _single_line_lattice(
                p, z2, 1.0 - mu, tol, key_of=lambda k: (0, -1 - k))
            return make(coeffs, 0, l_bounds, tail)
    raise AssertionError("not a degenerate case")


def apply_ladder(j: int, mu: float, coeffs: dict, op: str) -> dict:
    """Sparse action of a ladder operator on lattice coefficients.

    Uses the eigenstate ladder rules; targets flagged IRREGULAR (outside
    the regular sector) contribute nothing, ZERO entries are dropped.
    """
    if op not in _LADDER_OPS:
        raise ValueError(f"unknown ladder operator {op!r}")
    out = {}
    for (m, l), c in coeffs.items():
        coeff, target = ladder_apply(op, make_qn(j, m, l, mu))
        if target is ZERO or target is IRREGULAR or coeff == 0.0:
            continue
        key = (target.m, target.l)
        out[key] = out.get(key, 0.0 + 0.0j) + coeff * c
    return out


def _dot(a: dict, b: dict) -> complex:
    acc = 0.0 + 0.0j
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    swap = small is b
    for k, v in small.items():
        w = big.get(k)
        if w is not None:
            acc += (w.conjugate() * v) if swap else (v.conjugate() * w)
    return acc


def observable_moments(lat: CoefficientLattice, obs: str,
                       units: Units = Units()):
    """Mean and variance of an observable on a coefficient lattice.

    N1/N2 are diagonal; R2/Rc2 are their affine images (hbar/M omega)
    (2 N_s + 1); X_plus_iY applies the off-diagonal rule
    sqrt(2 hbar/M omega)(a2 - a1^dag), whose variance is
    <(x-iy)(x+iy)> - |<x+iy>|^2 >= 0.
    """
    if lat.tail_mass > 1e-8:
        raise ValueError(
            f"lattice tail mass {lat.tail_mass:.2e} too large for moments"
        )
    norm = lat.norm_sq()
    if norm == 0.0:
        raise DomainError("cannot take moments of the zero vector")
    if obs in ("N1", "N2", "R2", "Rc2"):
        idx = 0 if obs in ("N1", "R2") else 1
        mean = 0.0
        second = 0.0
        for (m, l), c in lat.coeffs.items():
            n = lat.n1n2(m, l)[idx]
            w = abs(c) ** 2
            mean += n * w
            second += n * n * w
        mean /= norm
        var = max(second / norm - mean * mean, 0.0)
        if obs in ("R2", "Rc2"):
            s = units.hbar / (units.mass * units.omega)
            return s * (2.0 * mean + 1.0), 4.0 * s * s * var
        return mean, var
    if obs == "X_plus_iY":
        scale = math.sqrt(units.magnetic_length_sq)
        img_a2 = apply_ladder(lat.j, lat.mu, lat.coeffs, "a2")
        img_dag = apply_ladder(lat.j, lat.mu, lat.coeffs, "a1_dag")
        w = dict(img_a2)
        for k, v in img_dag.items():
            w[k] = w.get(k, 0.0 + 0.0j) - v
        mean = scale * _dot(lat.coeffs, w) / norm
        second = scale * scale * sum(abs(v) ** 2 for v in w.values()) / norm
        return mean, max(second - abs(mean) ** 2, 0.0)
    raise ValueError(f"unknown observable {obs!r}")


# ---------------------------------------------------------------------------
# Time evolution
# ---------------------------------------------------------------------------

def evolve(p: CoherentParams, t: float, units: Units = Units()) -> CoherentParams:
    """Time evolution of the coherent state parameters: z1 rotates as
    exp(-i omega t), z2 is constant."""
    return replace(p, z1=complex(p.z1) * cmath.exp(-1j * units.omega * t))


def transverse_state(p: CoherentParams, units: Units, t: float, r, phi,
                     tol: float = 1e-10, l_bounds: tuple = None):
    """Transverse coherent-state profile Phi at time t and point (r, phi).

    The state at z1(t) = z1 exp(-i omega t) is summed over angular
    components l, each radial profile a closed-form Y call;
    rho = M omega r^2 / (2 hbar).  This is the part of the wavefunction
    obeying i dPhi/dt = omega N1 Phi; the longitudinal and zero-point
    phases are applied by wavefunction().  r may be a scalar or ndarray
    (phi broadcasts against it).
    """
    scalar = np.ndim(r) == 0 and np.ndim(phi) == 0
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    phi_arr = np.asarray(phi, dtype=float)
    rho = units.mass * units.omega * r_arr**2 / (2.0 * units.hbar)
    if l_bounds is None:
        lat = build_lattice(p, tol=tol)
        if not lat.coeffs:
            raise DomainError("coherent state is the zero vector")
        l_bounds = lat.l_bounds
    z1t = complex(p.z1) * cmath.exp(-1j * units.omega * t)
    z2 = complex(p.z2)
    acc = np.zeros(np.broadcast(rho, phi_arr).shape, dtype=complex)
    for l in range(l_bounds[0], l_bounds[1] + 1):
        if p.j == 0:
            alpha = -l - p.mu
            first, second = z1t, z2
            sign = 1.0
        else:
            alpha = l + p.mu
            first, second = z2, z1t
            sign = (-1.0) ** l
        mode = "series" if first == 0 else "closed"
        radial = y_fn(alpha, first, second, rho, mode=mode)
        acc = acc + sign * np.exp(1j * (l - p.l0) * phi_arr) * radial
    return complex(acc.reshape(-1)[0]) if scalar else acc


def wavefunction(p: CoherentParams, units: Units, pz: float, t: float,
                 r, phi, z, tol: float = 1e-10, l_bounds: tuple = None):
    """Full time-dependent coherent-state wavefunction at (r, phi, z).

    Evaluates exp(-(i/hbar)[(pz^2/2M + hbar omega/2) t - pz z]) times the
    transverse state at z1(t) = z1 exp(-i omega t)."""
    acc = transverse_state(p, units, t, r, phi, tol=tol, l_bounds=l_bounds)
    energy_phase = cmath.exp(
        -1j / units.hbar
        * ((pz * pz / (2.0 * units.mass) + 0.5 * units.hbar * units.omega) * t)
    )
    out = energy_phase * np.exp(
        1j * pz * np.asarray(z, dtype=float) / units.hbar) * acc
    return complex(out) if np.ndim(out) == 0 else out
