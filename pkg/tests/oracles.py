"""Independent numerical oracles used by the tests.

These deliberately avoid the production code paths: the cubic oracle
isolates roots on monotone pieces and bisects, and the digamma oracle sums
the defining series directly.
"""

import numpy as np


def bisect_photon_roots(delta, xi, iterations=90):
    """All real roots of the intensity cubic by monotone-piece bisection.

    Works in the substituted variable m = xi*n, where the cubic is monic:
    h(m) = m^3 - 2*delta*m^2 + (delta^2 + 1/4)*m - xi/2.  The two critical
    points of h split the real line into monotone pieces holding at most
    one root each; each piece is bisected to machine width.  Returns an
    (npts, 3) array of roots n, NaN-padded, ascending.
    """
    d = np.atleast_1d(np.asarray(delta, dtype=float))
    if xi == 0.0:
        roots = np.full((d.size, 3), np.nan)
        roots[:, 0] = 0.5 / (d * d + 0.25)
        return roots

    def h(m):
        return m**3 - 2.0 * d * m**2 + (d * d + 0.25) * m - xi / 2.0

    bound = 1.0 + np.maximum.reduce([2.0 * np.abs(d), d * d + 0.25,
                                     np.full_like(d, abs(xi) / 2.0)])
    crit_disc = d * d - 0.75
    has_crit = crit_disc > 0
    sq = np.sqrt(np.where(has_crit, crit_disc, 0.0))
    c1 = np.where(has_crit, (2.0 * d - sq) / 3.0, -bound)
    c2 = np.where(has_crit, (2.0 * d + sq) / 3.0, -bound)

    pieces = [(-bound, c1), (c1, c2), (c2, bound)]
    roots_m = np.full((d.size, 3), np.nan)
    for k, (lo, hi) in enumerate(pieces):
        lo = np.array(lo, dtype=float, copy=True)
        hi = np.array(hi, dtype=float, copy=True)
        f_lo, f_hi = h(lo), h(hi)
        bracket = f_lo * f_hi <= 0
        bracket &= hi > lo
        # Orient so the sign change always runs negative -> positive.
        a = np.where(f_lo <= 0, lo, hi)
        b = np.where(f_lo <= 0, hi, lo)
        for _ in range(iterations):
            mid = 0.5 * (a + b)
            f_mid = h(mid)
            go_right = f_mid < 0
            a = np.where(go_right, mid, a)
            b = np.where(go_right, b, mid)
        root = 0.5 * (a + b)
        roots_m[:, k] = np.where(bracket, root, np.nan)

    n = roots_m / xi
    n = np.where(np.isnan(n), np.nan, np.maximum(n, 0.0))
    n.sort(axis=1)  # NaNs go last; ascending n because pieces may overlap in n
    return n


def digamma_series(z, terms=10_000_000):
    """Digamma by direct series summation with an integral tail estimate.

    psi(z) = -euler_gamma + sum_{k>=0} (1/(k+1) - 1/(k+z)); the tail past
    ``terms`` is approximated by its integral plus half the boundary term,
    accurate to O(1/terms^3).
    """
    euler_gamma = 0.57721566490153286060651209
    k = np.arange(terms, dtype=float)
    partial = np.sum(1.0 / (k + 1.0) - 1.0 / (k + z))
    big_k = float(terms)
    tail = np.log((big_k + z) / (big_k + 1.0)) + (z - 1.0) / (
        2.0 * (big_k + 1.0) * (big_k + z)
    )
    return -euler_gamma + partial + tail
