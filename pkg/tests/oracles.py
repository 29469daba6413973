"""Brute-force reference implementations used to cross-check the package.

Everything here trades speed for obviousness: explicit leaf arrays, nested
interval loops, direct dot products, no shared code with the package beyond
numpy.  Intended for depths up to about 6.
"""

import math

import numpy as np


def leaf_slice(depth, k, j):
    width = 1 << (depth - k)
    return slice(j * width, (j + 1) * width)


def all_intervals(depth, max_level=None):
    top = depth if max_level is None else max_level
    for k in range(top + 1):
        for j in range(1 << k):
            yield k, j


def contained(k, j, K, J):
    """Is the level-k interval j inside the level-K interval J?"""
    return k >= K and (j >> (k - K)) == J


def haar_leaves(depth, k, j):
    """Leaf values of h_I for I at (level k, position j): the normalization
    is |I|^{-1/2} = 2^{k/2}, negative on the left half."""
    n = 1 << depth
    out = np.zeros(n)
    scale = math.sqrt(2.0**k)
    sl = leaf_slice(depth, k, j)
    half = (sl.stop - sl.start) // 2
    out[sl.start : sl.start + half] = -scale
    out[sl.start + half : sl.stop] = scale
    return out


def indicator_leaves(depth, k, j):
    n = 1 << depth
    out = np.zeros(n)
    out[leaf_slice(depth, k, j)] = 1.0
    return out


def integral(values):
    # leaves are equal-width cells of [0,1)
    return float(np.asarray(values).mean())


def coeff(values, depth, k, j):
    return integral(values * haar_leaves(depth, k, j))


def average_on(values, depth, k, j):
    return float(np.asarray(values)[leaf_slice(depth, k, j)].mean())


def mass_on(values, depth, k, j):
    sl = leaf_slice(depth, k, j)
    return float(np.asarray(values)[sl].sum()) / (1 << depth)


def a2_oracle(w, depth):
    best = 0.0
    for k, j in all_intervals(depth):
        best = max(best, average_on(w, depth, k, j) * average_on(1.0 / w, depth, k, j))
    return best


def bloom_oracle(b, mu, lam, depth):
    """sup_K (1/mu^{-1}(K)) sum_{I within K} bhat(I)^2 <mu^{-1}>_I^2 <lam>_I,
    square-rooted; K and I run over coefficient levels 0..depth-1, I = K
    included."""
    mu_inv = 1.0 / np.asarray(mu)
    best = 0.0
    for K, J in all_intervals(depth, depth - 1):
        s = 0.0
        for k in range(K, depth):
            for j in range(1 << k):
                if contained(k, j, K, J):
                    s += (
                        coeff(b, depth, k, j) ** 2
                        * average_on(mu_inv, depth, k, j) ** 2
                        * average_on(lam, depth, k, j)
                    )
        best = max(best, s / mass_on(mu_inv, depth, K, J))
    return math.sqrt(best)


def bloom_dual_oracle(b, mu, lam, depth):
    return bloom_oracle(b, 1.0 / np.asarray(lam), 1.0 / np.asarray(mu), depth)


def bloom_l2form_oracle(b, mu, lam, depth):
    """Same supremum as bloom_oracle but through the localized synthesis:
    per K, g = sum_{I within K} bhat(I) <mu^{-1}>_I h_I, then
    ||g 1_K||_{L^2(lam)} / mu^{-1}(K)^{1/2}."""
    mu_inv = 1.0 / np.asarray(mu)
    n = 1 << depth
    best = 0.0
    for K, J in all_intervals(depth, depth - 1):
        g = np.zeros(n)
        for k in range(K, depth):
            for j in range(1 << k):
                if contained(k, j, K, J):
                    g += (
                        coeff(b, depth, k, j)
                        * average_on(mu_inv, depth, k, j)
                        * haar_leaves(depth, k, j)
                    )
        energy = mass_on(g**2 * np.asarray(lam), depth, K, J)
        best = max(best, energy / mass_on(mu_inv, depth, K, J))
    return math.sqrt(best)


def bmo_rho_oracle(b, rho, depth):
    b = np.asarray(b)
    best = 0.0
    for k, j in all_intervals(depth, depth - 1):
        avg = average_on(b, depth, k, j)
        osc = mass_on((b - avg) ** 2, depth, k, j)
        best = max(best, osc / mass_on(rho, depth, k, j))
    return math.sqrt(best)


def bmo_rho_l1_oracle(b, rho, depth):
    n = 1 << depth
    best = 0.0
    for K, J in all_intervals(depth, depth - 1):
        sq = np.zeros(n)
        for k in range(K, depth):
            for j in range(1 << k):
                if contained(k, j, K, J):
                    sq += coeff(b, depth, k, j) ** 2 * indicator_leaves(depth, k, j) * (
                        1 << k
                    )
        val = mass_on(np.sqrt(sq), depth, K, J) / mass_on(rho, depth, K, J)
        best = max(best, val)
    return best


def neccon_oracle(b, mu, lam, depth):
    b = np.asarray(b)
    lam = np.asarray(lam)
    mu_inv = 1.0 / np.asarray(mu)
    best = 0.0
    for k, j in all_intervals(depth, depth - 1):
        avg = average_on(b, depth, k, j)
        osc = mass_on((b - avg) ** 2 * lam, depth, k, j)
        length = 2.0 ** (-k)
        best = max(best, mass_on(mu_inv, depth, k, j) / length**2 * osc)
    return math.sqrt(best)


def carleson_oracle(level_values, w, depth):
    """sup_J (1/w(J)) sum_{I within J} a_I over coefficient levels."""
    best = 0.0
    for K, J in all_intervals(depth, depth - 1):
        s = 0.0
        for k in range(K, depth):
            for j in range(1 << k):
                if contained(k, j, K, J):
                    s += float(level_values[k][j])
        best = max(best, s / mass_on(w, depth, K, J))
    return best


def paraproduct_oracle(b, f, depth):
    n = 1 << depth
    out = np.zeros(n)
    for k, j in all_intervals(depth, depth - 1):
        out += coeff(b, depth, k, j) * average_on(f, depth, k, j) * haar_leaves(depth, k, j)
    return out


def paraproduct_adjoint_oracle(b, f, depth):
    n = 1 << depth
    out = np.zeros(n)
    for k, j in all_intervals(depth, depth - 1):
        out += (
            coeff(b, depth, k, j)
            * coeff(f, depth, k, j)
            * indicator_leaves(depth, k, j)
            * (1 << k)
        )
    return out


def shift_oracle(f, depth):
    """Map each Haar coefficient at levels 0..depth-2 to
    (h_{left child} - h_{right child})/sqrt(2); deeper coefficients and the
    mean are annihilated."""
    n = 1 << depth
    out = np.zeros(n)
    for k in range(depth - 1):
        for j in range(1 << k):
            c = coeff(f, depth, k, j) / math.sqrt(2.0)
            out += c * (haar_leaves(depth, k + 1, 2 * j) - haar_leaves(depth, k + 1, 2 * j + 1))
    return out


def weighted_norm_oracle(matrix, mu, lam):
    """Best constant in ||M f||_{L^2(lam)} <= C ||f||_{L^2(mu)} via the
    explicitly scaled singular value problem."""
    mu = np.asarray(mu)
    lam = np.asarray(lam)
    scaled = np.sqrt(lam)[:, None] * np.asarray(matrix) / np.sqrt(mu)[None, :]
    return float(np.linalg.norm(scaled, 2))
