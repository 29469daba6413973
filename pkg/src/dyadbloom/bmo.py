"""Two-weight BMO-type functionals of a symbol b.

All functionals are suprema over dyadic intervals; each returns the achieved
value, and bmo_report also records the interval achieving it (level-major
first occurrence).  Throughout, mu and lambda are the two weights,
rho = (mu/lambda)^{1/2} is the Bloom weight, and bhat(I) = <b, h_I> are the
unweighted Haar coefficients of b.

The central quantity is the coefficient-form Bloom functional

    bloom_b2(b)^2 = sup_K (1/mu^{-1}(K)) sum_{I subset= K}
                        bhat(I)^2 <mu^{-1}>_I^2 <lambda>_I,

whose localized sums define a Carleson sequence with respect to mu^{-1}; the
sup includes I = K.  bloom_b2_l2form is the corresponding localized-synthesis
supremum.  When lambda is constant the two agree exactly (Parseval); for
general lambda the Haar system is not orthogonal in L^2(lambda), the
off-diagonal terms survive, and the ratio of the two routes is a measured
quantity controlled by the square-function constants of lambda, recorded by
the suites rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .grid import DyadicGrid, DyadicInterval, StepFunction, analyze_leaves, level_masses
from .weights import Weight, rho_weight

__all__ = [
    "bloom_b2",
    "bloom_b2_dual",
    "bloom_b2_l2form",
    "bmo_rho",
    "bmo_rho_l1",
    "neccon_functional",
    "BmoReport",
    "bmo_report",
]


class _SupResult(NamedTuple):
    value: float
    argmax: DyadicInterval


def _sup_over_levels(per_level: list[np.ndarray]) -> _SupResult:
    # per_level[k] holds the candidate value at each level-k interval;
    # ties resolve to the level-major first occurrence.
    best = -math.inf
    where = DyadicInterval(0, 0)
    for k, arr in enumerate(per_level):
        j = int(np.argmax(arr))
        v = float(arr[j])
        if v > best:
            best = v
            where = DyadicInterval(k, j)
    return _SupResult(best, where)


def _subtree_sums(per_level: list[np.ndarray]) -> list[np.ndarray]:
    # sums[k][j] = sum of per_level over all intervals contained in I_{k,j}
    # (inclusive), by a bottom-up pass.
    depth = len(per_level)
    sums = [None] * depth  # type: ignore[list-item]
    acc = per_level[depth - 1].copy()
    sums[depth - 1] = acc
    for k in range(depth - 2, -1, -1):
        acc = per_level[k] + acc.reshape(-1, 2).sum(axis=1)
        sums[k] = acc
    return sums


def _coeff_squares(b: StepFunction) -> list[np.ndarray]:
    _, coeffs = analyze_leaves(b.values, b.grid.depth)
    return [c**2 for c in coeffs]


def _bloom_b2_scan(b: StepFunction, mu: Weight, lam: Weight) -> _SupResult:
    depth = b.grid.depth
    mu_inv = mu.inverse
    csq = _coeff_squares(b)
    per_level = [
        csq[k] * mu_inv.averages_at_level(k) ** 2 * lam.averages_at_level(k)
        for k in range(depth)
    ]
    sums = _subtree_sums(per_level)
    ratios = [sums[k] / mu_inv.level_masses[k] for k in range(depth)]
    value, where = _sup_over_levels(ratios)
    return _SupResult(math.sqrt(max(value, 0.0)), where)


def bloom_b2(b: StepFunction, mu: Weight, lam: Weight) -> float:
    """Coefficient-form Bloom functional (see module docstring)."""
    return _bloom_b2_scan(b, mu, lam).value


def bloom_b2_dual(b: StepFunction, mu: Weight, lam: Weight) -> float:
    """The dual functional: bloom_b2 with (mu, lambda) -> (lambda^{-1}, mu^{-1}).

    Expanded, its square is sup_K (1/lambda(K)) sum_{I subset= K}
    bhat(I)^2 <lambda>_I^2 <mu^{-1}>_I.
    """
    return _bloom_b2_scan(b, lam.inverse, mu.inverse).value


def _localized_symbol_values(
    b_coeffs: list[np.ndarray],
    scale_per_level: list[np.ndarray],
    grid: DyadicGrid,
    top: DyadicInterval,
) -> np.ndarray:
    """Leaf values, over the leaves of `top`, of
    sum_{I subset= top} bhat(I) * scale(I) * h_I."""
    depth = grid.depth
    n_local = 1 << (depth - top.level)
    out = np.zeros(n_local)
    for k in range(top.level, depth):
        shift = k - top.level
        lo = top.position << shift
        hi = (top.position + 1) << shift
        scaled = (b_coeffs[k][lo:hi] * scale_per_level[k][lo:hi]) * math.sqrt(2**k)
        blocks = out.reshape(1 << shift, 2, n_local >> (shift + 1))
        blocks[:, 0, :] -= scaled[:, None]
        blocks[:, 1, :] += scaled[:, None]
    return out


def _bloom_l2form_scan(b: StepFunction, mu: Weight, lam: Weight) -> _SupResult:
    depth = b.grid.depth
    grid = b.grid
    mu_inv = mu.inverse
    _, coeffs = analyze_leaves(b.values, depth)
    scales = [mu_inv.averages_at_level(k) for k in range(depth)]
    lam_vals = lam.values
    leaf_w = grid.leaf_width
    per_level = []
    for k in range(depth):
        row = np.empty(1 << k)
        for j in range(1 << k):
            top = DyadicInterval(k, j)
            g = _localized_symbol_values(coeffs, scales, grid, top)
            sl = grid.leaf_slice(top)
            energy = float((g**2 * lam_vals[sl]).sum()) * leaf_w
            row[j] = energy / mu_inv.mass(top)
        per_level.append(row)
    value, where = _sup_over_levels(per_level)
    return _SupResult(math.sqrt(max(value, 0.0)), where)


def bloom_b2_l2form(b: StepFunction, mu: Weight, lam: Weight) -> float:
    """Localized L^2(lambda)-norm form of the Bloom functional:

        sup_K (1/mu^{-1}(K)^{1/2}) || sum_{I subset= K} bhat(I) <mu^{-1}>_I h_I ||_{L^2(lambda)}.

    Independent route from bloom_b2: it synthesizes the localized symbol and
    integrates, instead of summing the coefficient expansion.
    """
    return _bloom_l2form_scan(b, mu, lam).value


def _oscillation_masses(b: StepFunction) -> list[np.ndarray]:
    # osc[k][j] = integral over I_{k,j} of (b - <b>_I)^2, computed by
    # subtracting the interval average from the leaves before squaring;
    # a constant symbol then gives exactly zero instead of cancellation dust.
    depth = b.grid.depth
    n = b.grid.n_leaves
    mb = level_masses(b.values, depth)
    out = []
    for k in range(depth + 1):
        avg = np.repeat(mb[k] * (2.0**k), n >> k)
        dev2 = (b.values - avg) ** 2
        out.append(dev2.reshape(1 << k, -1).sum(axis=1) / n)
    return out


def _bmo_rho_scan(b: StepFunction, rho: Weight) -> _SupResult:
    depth = b.grid.depth
    osc = _oscillation_masses(b)
    ratios = [osc[k] / rho.level_masses[k] for k in range(depth)]
    value, where = _sup_over_levels(ratios)
    return _SupResult(math.sqrt(max(value, 0.0)), where)


def bmo_rho(b: StepFunction, rho: Weight) -> float:
    """Weighted BMO norm: sup_I ( (1/rho(I)) int_I (b - <b>_I)^2 dx )^{1/2}.

    The sup runs over levels 0..D-1; on leaves the oscillation is exactly 0.
    """
    return _bmo_rho_scan(b, rho).value


def _bmo_rho_l1_scan(b: StepFunction, rho: Weight) -> _SupResult:
    depth = b.grid.depth
    grid = b.grid
    n = grid.n_leaves
    csq = _coeff_squares(b)
    # leaf-resolved square-function layers: layer[k] = bhat^2/|I| spread over I
    layers = np.zeros((depth, n))
    for k in range(depth):
        layers[k] = np.repeat(csq[k] * (1 << k), n >> k)
    # suffix[k] = sum of layers k..D-1: the square function restricted to
    # intervals at levels >= k, i.e. those contained in a level-k interval.
    suffix = np.zeros((depth, n))
    suffix[depth - 1] = layers[depth - 1]
    for k in range(depth - 2, -1, -1):
        suffix[k] = layers[k] + suffix[k + 1]
    per_level = []
    for k in range(depth):
        integrals = np.sqrt(suffix[k]).reshape(1 << k, -1).sum(axis=1) * grid.leaf_width
        per_level.append(integrals / rho.level_masses[k])
    value, where = _sup_over_levels(per_level)
    return _SupResult(max(value, 0.0), where)


def bmo_rho_l1(b: StepFunction, rho: Weight) -> float:
    """L^1-normalized square-function BMO:

        sup_{I0} (1/rho(I0)) int_{I0} ( sum_{I subset= I0} bhat(I)^2 |I|^{-1} 1_I )^{1/2} dx.
    """
    return _bmo_rho_l1_scan(b, rho).value


def _neccon_scan(b: StepFunction, mu: Weight, lam: Weight) -> _SupResult:
    depth = b.grid.depth
    n = b.grid.n_leaves
    mu_inv = mu.inverse
    mb = level_masses(b.values, depth)
    per_level = []
    for k in range(depth):
        # int_I (b - <b>_I)^2 lam, leaves first so constants vanish exactly
        avg = np.repeat(mb[k] * (2.0**k), n >> k)
        dev2l = (b.values - avg) ** 2 * lam.values
        osc = dev2l.reshape(1 << k, -1).sum(axis=1) / n
        per_level.append(mu_inv.level_masses[k] * (4.0**k) * osc)
    value, where = _sup_over_levels(per_level)
    return _SupResult(math.sqrt(max(value, 0.0)), where)


def neccon_functional(b: StepFunction, mu: Weight, lam: Weight) -> float:
    """Lower-bound functional:

        sup_I ( (mu^{-1}(I) / |I|^2) int_I (b - <b>_I)^2 lambda dx )^{1/2}.

    The sandwich |I|^2 <= mu(I) mu^{-1}(I) <= [mu]_{A2} |I|^2 (Cauchy-Schwarz
    on the left, the A2 definition on the right) pinches the prefactor
    mu^{-1}(I)/|I|^2 between 1/mu(I) and [mu]_{A2}/mu(I); the suites assert
    the definitional left half of that chain.
    """
    return _neccon_scan(b, mu, lam).value


@dataclass(frozen=True)
class BmoReport:
    """All symbol functionals with their achieving intervals."""

    bloom_b2: float
    bloom_b2_dual: float
    bloom_b2_l2form: float
    bmo_rho: float
    bmo_rho_l1: float
    neccon: float
    argmax: dict

    def to_dict(self) -> dict:
        d = {
            "bloom_b2": self.bloom_b2,
            "bloom_b2_dual": self.bloom_b2_dual,
            "bloom_b2_l2form": self.bloom_b2_l2form,
            "bmo_rho": self.bmo_rho,
            "bmo_rho_l1": self.bmo_rho_l1,
            "neccon": self.neccon,
            "argmax": {
                name: {"level": iv.level, "position": iv.position}
                for name, iv in self.argmax.items()
            },
        }
        return d


def bmo_report(b: StepFunction, mu: Weight, lam: Weight) -> BmoReport:
    """Evaluate every functional of b for the pair (mu, lambda)."""
    rho = rho_weight(mu, lam)
    r_b2 = _bloom_b2_scan(b, mu, lam)
    r_dual = _bloom_b2_scan(b, lam.inverse, mu.inverse)
    r_l2 = _bloom_l2form_scan(b, mu, lam)
    r_bmo = _bmo_rho_scan(b, rho)
    r_l1 = _bmo_rho_l1_scan(b, rho)
    r_nec = _neccon_scan(b, mu, lam)
    return BmoReport(
        bloom_b2=r_b2.value,
        bloom_b2_dual=r_dual.value,
        bloom_b2_l2form=r_l2.value,
        bmo_rho=r_bmo.value,
        bmo_rho_l1=r_l1.value,
        neccon=r_nec.value,
        argmax={
            "bloom_b2": r_b2.argmax,
            "bloom_b2_dual": r_dual.argmax,
            "bloom_b2_l2form": r_l2.argmax,
            "bmo_rho": r_bmo.argmax,
            "bmo_rho_l1": r_l1.argmax,
            "neccon": r_nec.argmax,
        },
    )
