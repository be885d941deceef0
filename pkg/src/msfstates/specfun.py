"""Special functions used throughout the package.

Gamma (log), Bessel J and modified Bessel I of real order, generalized
Laguerre polynomials, and the orthonormal exponentially-weighted Laguerre
functions that form the radial basis.  Gamma and Bessel evaluation is
delegated to the cephes/Amos routines behind scipy.special; the Laguerre
evaluators and the series/quadrature helpers are implemented here because
the rest of the package needs them in normalized, overflow-safe form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np
from scipy import integrate
from scipy.special import ive, iv, jv, roots_jacobi

from .errors import ConvergenceError, DomainError, QuadratureError

__all__ = [
    "EvalResult",
    "log_gamma",
    "bessel_j",
    "bessel_i",
    "laguerre_poly",
    "laguerre_fn",
    "laguerre_fn_sequence",
    "sum_series",
    "auto_rho_cut",
    "radial_nodes",
    "integrate_radial",
]

# Default relative tolerance of the series truncation rule.
SERIES_TOL = 1e-12

# Largest x for which exp(x) is representable in float64.
_EXP_OVERFLOW = 709.0


@dataclass(frozen=True)
class EvalResult:
    """Value of a series or quadrature together with its error bookkeeping."""

    value: object  # float, complex, or ndarray
    abs_error_estimate: float
    terms_used: int

    def __post_init__(self):
        if self.abs_error_estimate < 0 or self.terms_used < 0:
            raise ValueError("error estimate and term count must be >= 0")


def _sup_abs(x) -> float:
    """Sup-norm of a scalar or array."""
    a = np.abs(x)
    return float(a.max()) if getattr(a, "ndim", 0) else float(a)


def sum_series(
    terms: Iterable,
    tol: float = SERIES_TOL,
    max_terms: int = 100_000,
) -> EvalResult:
    """Sum a series under the truncation rule used package-wide.

    Stops once |term| < tol*|partial sum| held for 3 consecutive terms AND
    the geometric tail bound |term|*r/(1-r) < tol*|partial sum| holds with
    the observed term ratio r < 1.  Terms may be scalars or ndarrays
    (sup-norm is used for the stopping test).
    """
    total = None
    small_run = 0
    prev_mag = math.inf
    it: Iterator = iter(terms)
    for k, term in enumerate(it):
        total = term if total is None else total + term
        if k >= max_terms:
            break
        mag = _sup_abs(term)
        scale = max(_sup_abs(total), np.finfo(float).tiny)
        r = mag / prev_mag if 0.0 < prev_mag < math.inf else 0.0
        prev_mag = mag if mag > 0 else prev_mag
        if mag < tol * scale:
            small_run += 1
            if small_run >= 3 and r < 1.0:
                tail = mag * r / (1.0 - r)
                if tail < tol * scale:
                    return EvalResult(total, tail, k + 1)
        else:
            small_run = 0
    raise ConvergenceError(
        f"series did not meet tol={tol} within {max_terms} terms"
    )


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def bessel_j(alpha: float, x: float) -> float:
    """Bessel function of the first kind J_alpha(x), alpha > -1, x >= 0."""
    if not alpha > -1:
        raise DomainError(f"bessel_j requires alpha > -1, got {alpha}")
    if x < 0:
        raise DomainError(f"bessel_j requires x >= 0, got {x}")
    if x == 0.0:
        return 1.0 if alpha == 0.0 else 0.0
    return float(jv(alpha, x))


def bessel_i(alpha: float, x: float, scaled: bool = False) -> float:
    """Modified Bessel I_alpha(x), alpha > -1, x >= 0.

    With scaled=True returns exp(-x)*I_alpha(x), usable for arbitrarily
    large x.  The unscaled value signals overflow instead of saturating.
    """
    if not alpha > -1:
        raise DomainError(f"bessel_i requires alpha > -1, got {alpha}")
    if x < 0:
        raise DomainError(f"bessel_i requires x >= 0, got {x}")
    if x == 0.0:
        return 1.0 if alpha == 0.0 else 0.0
    if scaled:
        return float(ive(alpha, x))
    if x > _EXP_OVERFLOW:
        raise OverflowError(
            f"I_{alpha}({x}) exceeds float range; use scaled=True"
        )
    val = float(iv(alpha, x))
    if math.isinf(val):
        raise OverflowError(
            f"I_{alpha}({x}) exceeds float range; use scaled=True"
        )
    return val


def laguerre_poly(m: int, alpha: float, rho):
    """Generalized Laguerre polynomial L_m^alpha(rho) by the three-term
    recurrence in m.  rho may be a scalar or ndarray."""
    if m < 0:
        raise DomainError(f"laguerre_poly requires m >= 0, got {m}")
    if not alpha > -1:
        raise DomainError(f"laguerre_poly requires alpha > -1, got {alpha}")
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("laguerre_poly requires rho >= 0")
    prev = np.ones_like(rho)
    if m == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - rho
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1 + alpha - rho) * cur - (k + alpha) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def _laguerre_fn_seed(alpha: float, rho: np.ndarray) -> np.ndarray:
    """I_{alpha,0}(rho) = exp(-rho/2) rho^{alpha/2} / sqrt(Gamma(alpha+1)),
    assembled in log space."""
    out = np.zeros_like(rho)
    pos = rho > 0
    lg = 0.5 * math.lgamma(alpha + 1.0)
    out[pos] = np.exp(-0.5 * rho[pos] + 0.5 * alpha * np.log(rho[pos]) - lg)
    if np.any(~pos):
        out[~pos] = 1.0 if alpha == 0.0 else 0.0
    return out


def laguerre_fn_sequence(alpha: float, m_max: int, rho) -> np.ndarray:
    """All Laguerre functions I_{m+alpha,m}(rho) for m = 0..m_max.

    Uses the recurrence for the normalized functions directly, which keeps
    every intermediate O(1) (no Gamma overflow) up to m ~ 1e4:

        I_{m+1} = (2m+alpha+1-rho)/sqrt((m+1)(m+alpha+1)) * I_m
                  - sqrt(m(m+alpha)/((m+1)(m+alpha+1))) * I_{m-1}

    Returns an array of shape (m_max+1,) + rho.shape.
    """
    if m_max < 0:
        raise DomainError(f"m_max must be >= 0, got {m_max}")
    if not alpha > -1:
        raise DomainError(f"requires alpha > -1, got {alpha}")
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho < 0):
        raise DomainError("requires rho >= 0")
    out = np.empty((m_max + 1,) + rho.shape)
    out[0] = _laguerre_fn_seed(alpha, rho)
    if m_max == 0:
        return out
    out[1] = (alpha + 1.0 - rho) / math.sqrt(alpha + 1.0) * out[0]
    for m in range(1, m_max):
        a = (2 * m + alpha + 1 - rho) / math.sqrt((m + 1) * (m + alpha + 1))
        b = math.sqrt(m * (m + alpha) / ((m + 1) * (m + alpha + 1)))
        out[m + 1] = a * out[m] - b * out[m - 1]
    return out


def laguerre_fn(alpha: float, m: int, rho):
    """Laguerre function I_{m+alpha,m}(rho) =
    sqrt(Gamma(m+1)/Gamma(m+alpha+1)) exp(-rho/2) rho^{alpha/2} L_m^alpha(rho).
    """
    if m < 0:
        raise DomainError(f"laguerre_fn requires m >= 0, got {m}")
    scalar = np.ndim(rho) == 0
    seq = laguerre_fn_sequence(alpha, m, rho)
    val = seq[m]
    return float(val[0]) if scalar else val


def auto_rho_cut(power: float, log_tol: float = math.log(1e-18)) -> float:
    """Radial cutoff beyond which the envelope exp(-rho) rho^power is below
    exp(log_tol) relative to its peak value."""
    s = max(power, 0.0)
    if s == 0.0:
        return -log_tol + 5.0
    rho = s + 10.0
    # envelope (relative to peak at rho=s): s*ln(rho/s) - (rho - s)
    while s * math.log(rho / s) - (rho - s) > log_tol:
        rho *= 1.25
    return rho


def radial_nodes(rho_cut: float, nodes_per_panel: int = 32,
                 panel_width: float = 8.0, singular_power: float = 0.0):
    """Composite Gauss-Legendre nodes and weights on [0, rho_cut].

    With singular_power = beta != 0 the first panel uses Gauss-Jacobi
    nodes built for the weight rho^beta, folded into plain-function
    weights; this recovers full accuracy for integrands with an algebraic
    rho^beta branch point at the origin (the case for radial densities at
    non-integer angular index).
    """
    n_panels = max(1, int(math.ceil(rho_cut / panel_width)))
    x0, w0 = np.polynomial.legendre.leggauss(nodes_per_panel)
    edges = np.linspace(0.0, rho_cut, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * x0[None, :])
    w = (half[:, None] * w0[None, :])
    if singular_power != 0.0:
        if singular_power <= -1.0:
            raise DomainError("singular_power must be > -1")
        a = edges[1]
        xj, wj = roots_jacobi(nodes_per_panel, 0.0, singular_power)
        rho_j = 0.5 * a * (1.0 + xj)
        scale = (0.5 * a) ** (singular_power + 1.0)
        x[0] = rho_j
        w[0] = scale * wj / rho_j ** singular_power
    return x.ravel(), w.ravel()


def integrate_radial(
    f: Callable[[float], float],
    rho_max: float,
    tol: float = 1e-11,
    points=None,
) -> EvalResult:
    """Adaptive quadrature of f on [0, rho_max] (scipy QUADPACK panels).

    Raises QuadratureError with the achieved estimate when the requested
    accuracy is not reached.
    """
    val, err = integrate.quad(
        f, 0.0, rho_max, epsabs=tol * 1e-2, epsrel=tol * 1e-2,
        limit=400, points=points,
    )
    if err > max(tol, tol * abs(val)):
        raise QuadratureError(
            f"radial quadrature achieved {err:.3e}, needed {tol:.3e}",
            achieved=err,
        )
    return EvalResult(val, err, 0)
