"""Extended-precision oracle implementations behind the frozen test values.

These are deliberately independent of the package: ascending series summed
with 50-digit mpmath arithmetic and exact symbolic Rodrigues differentiation
with sympy.  Run this file directly to regenerate the constants frozen in
the test modules.
"""

import mpmath as mp

mp.mp.dps = 50


def bessel_j_series(alpha, x, terms=60):
    """J_alpha(x) by the ascending series sum_k (-1)^k (x/2)^(alpha+2k) /
    (k! Gamma(alpha+k+1))."""
    s = mp.mpf(0)
    for k in range(terms):
        s += (-1) ** k * (mp.mpf(x) / 2) ** (alpha + 2 * k) / (
            mp.factorial(k) * mp.gamma(alpha + k + 1))
    return s


def bessel_i_series(alpha, x, terms=80):
    """I_alpha(x) by the ascending series (all-positive terms)."""
    s = mp.mpf(0)
    for k in range(terms):
        s += (mp.mpf(x) / 2) ** (alpha + 2 * k) / (
            mp.factorial(k) * mp.gamma(alpha + k + 1))
    return s


def laguerre_fn_product(alpha, m, rho):
    """I_{m+alpha,m}(rho) as the product of separately computed factors."""
    return (mp.sqrt(mp.gamma(m + 1) / mp.gamma(m + alpha + 1))
            * mp.e ** (-mp.mpf(rho) / 2) * mp.mpf(rho) ** (alpha / mp.mpf(2))
            * mp.laguerre(m, alpha, rho))


def y_series(alpha, z1, z2, rho, terms=200):
    """Direct 200-term summation of the coherent radial profile series."""
    s = mp.mpf(0)
    for m in range(terms):
        s += (mp.mpf(z1) ** m * mp.mpf(z2) ** (m + alpha)
              * laguerre_fn_product(alpha, m, rho)
              / mp.sqrt(mp.gamma(1 + m) * mp.gamma(1 + m + alpha)))
    return s


def q_minus_series(alpha, u, v, terms=300):
    """Direct summation of the partial overlap series."""
    s = mp.mpf(0)
    for l in range(1, terms + 1):
        s += (mp.mpf(v) / u) ** (alpha + l) * mp.besseli(alpha + l, 2 * u * v)
    return s


def rodrigues_laguerre(m, alpha_rational, rho_rational):
    """Exact-rational Rodrigues evaluation (requires rational alpha, rho)."""
    import sympy as sp

    rho = sp.symbols("rho")
    expr = (sp.exp(rho) * rho ** (-alpha_rational) / sp.factorial(m)
            * sp.diff(sp.exp(-rho) * rho ** (m + alpha_rational), rho, m))
    return sp.simplify(expr.subs(rho, rho_rational))


if __name__ == "__main__":
    import sympy as sp

    a = mp.mpf("1.3")
    print("bessel_j(1.3, 2.7) =", mp.nstr(bessel_j_series(a, mp.mpf("2.7")), 20))
    print("bessel_i(0.7, 3.1) =",
          mp.nstr(bessel_i_series(mp.mpf("0.7"), mp.mpf("3.1")), 20))
    print("laguerre_fn(0.3, 12, 4.5) =",
          mp.nstr(laguerre_fn_product(mp.mpf("0.3"), 12, mp.mpf("4.5")), 20))
    print("laguerre_poly(7, 1.6, 3.3) =",
          rodrigues_laguerre(7, sp.Rational(8, 5), sp.Rational(33, 10)))
    print("y(0.7; 1.2, 0.8; 2.0) =",
          mp.nstr(y_series(mp.mpf("0.7"), mp.mpf("1.2"), mp.mpf("0.8"),
                           mp.mpf("2.0")), 20))
    print("q_minus(0.5, 1, 2) =",
          mp.nstr(q_minus_series(mp.mpf("0.5"), mp.mpf(1), mp.mpf(2)), 20))
    print("q_minus(0.5, 2, 1) =",
          mp.nstr(q_minus_series(mp.mpf("0.5"), mp.mpf(2), mp.mpf(1)), 20))
    print("log_gamma(0.5) =", mp.nstr(mp.log(mp.sqrt(mp.pi)), 20))
