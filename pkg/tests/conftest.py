"""Shared test helpers: random spec generation and brute-force oracles.

The oracles here are deliberately naive (repeated multiplication, direct
summation, direct recursion) so they stay independent of the log-domain
paths they check.
"""

import numpy as np

import hustab as hs


def random_table_spec(rng, n, amin=0.25, amax=4.0, bmax=10.0, tail="repeat"):
    """Random complex coefficients with |a| log-uniform in [amin, amax]."""
    loga = rng.uniform(np.log(amin), np.log(amax), n)
    a = np.exp(loga) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    b = bmax * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    return hs.table_spec(list(zip(a, b)), tail=tail)


def random_disc(rng, n, radius=1.0):
    """n samples uniform on the closed disc of the given radius."""
    return radius * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))


def padded(values):
    """Prepend the slot-0 padding, making a 1-based index-aligned array."""
    return np.concatenate([[np.nan], np.asarray(values, dtype=complex)])


def coeffs_upto(spec, n):
    """a and b as 1-based padded arrays, via coeff_at only."""
    a = [np.nan]
    b = [np.nan]
    for j in range(1, n + 1):
        aj, bj = hs.coeff_at(spec, j)
        a.append(aj)
        b.append(bj)
    return np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)


def brute_partial_product(a, m, k):
    """p(m, k) by repeated multiplication; a is 1-based padded."""
    out = 1.0 + 0.0j
    for j in range(k, m):
        out *= a[j]
    return out


def brute_tracking_sum(a, n):
    """1 + |a_n| + |a_n a_{n-1}| + ... + |a_n ... a_2| by direct products."""
    total = 1.0
    prod = 1.0
    for j in range(n, 1, -1):
        prod *= abs(a[j])
        total += prod
    return total


def brute_residuals(a, r, upto):
    """R_n = a_n R_{n-1} + r_n by direct recursion; 1-based padded output."""
    out = [0.0 + 0.0j]
    R = 0.0 + 0.0j
    for n in range(1, upto + 1):
        R = a[n] * R + r[n]
        out.append(R)
    return np.asarray(out, dtype=complex)


def rel_close(x, y, tol):
    """|x - y| <= tol * (1 + |y|), elementwise."""
    return np.all(np.abs(np.asarray(x) - np.asarray(y)) <= tol * (1.0 + np.abs(np.asarray(y))))
