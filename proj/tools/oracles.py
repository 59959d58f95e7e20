#!/usr/bin/env python3
"""Independent high-precision reference values frozen into the C++ tests.

Run with `python3 tools/oracles.py`; every number printed here appears verbatim in
tests/support.hpp. The computations use mpmath only and share no code with the library.
"""

import mpmath as mp

mp.mp.dps = 40


def bump_raw(x):
    y = x - 2
    return mp.e ** (-1 / (1 - y * y)) if abs(y) < 1 else mp.mpf(0)


def sphere_area(d):
    return 2 * mp.pi ** (mp.mpf(d) / 2) / mp.gamma(mp.mpf(d) / 2)


def gaussian_norms(d, p):
    """Norms of u = exp(-r^2) in R^d: mass, grad2, |u|^{p+1}, |u|^{2*}."""
    two_star = mp.mpf(2 * d) / (d - 2)
    mass = (mp.pi / 2) ** (mp.mpf(d) / 2)
    grad2 = d * mass
    lp1 = (mp.pi / (p + 1)) ** (mp.mpf(d) / 2)
    lcrit = (mp.pi / two_star) ** (mp.mpf(d) / 2)
    return mass, grad2, lp1, lcrit


def sobolev_pow(d):
    sigma = mp.pi * d * (d - 2) * (mp.gamma(mp.mpf(d) / 2) / mp.gamma(d)) ** (mp.mpf(2) / d)
    return sigma ** (mp.mpf(d) / 2)


def talenti_grad2(d, eps=1):
    """||grad W_eps||^2 for W_eps = (d(d-2) eps^2)^{(d-2)/4} (eps^2 + r^2)^{-(d-2)/2}."""
    a = (d * (d - 2) * mp.mpf(eps) ** 2) ** (mp.mpf(d - 2) / 4)
    f = lambda r: (a * (d - 2) * r * (eps ** 2 + r * r) ** (-mp.mpf(d) / 2)) ** 2 * r ** (d - 1)
    return sphere_area(d) * mp.quad(f, [0, 1, 10, mp.inf])


def main():
    inner = mp.quad(bump_raw, [1, 2, 3])
    print("bump normalization c =", mp.nstr(1 / inner, 17))
    for d in (3, 4, 5):
        print(f"sigma^(d/2), d={d} =", mp.nstr(sobolev_pow(d), 17))
        print(f"  (2/d) sigma^(d/2) =", mp.nstr(2 * sobolev_pow(d) / d, 17))
        print(f"  Talenti grad2 by quadrature =", mp.nstr(talenti_grad2(d), 17))
    for d, p in ((4, 2.5), (3, 3), (5, 2)):
        m, g, l, c = gaussian_norms(d, mp.mpf(p))
        print(f"gaussian d={d} p={p}: mass {mp.nstr(m, 17)} grad2 {mp.nstr(g, 17)} "
              f"lp1 {mp.nstr(l, 17)} lcrit {mp.nstr(c, 17)}")
    # Strauss constant sqrt(2 / s_{d-1})
    for d in (3, 4, 5):
        print(f"strauss analytic C d={d} =", mp.nstr(mp.sqrt(2 / sphere_area(d)), 17))


if __name__ == "__main__":
    main()
