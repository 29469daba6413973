"""Operator matrices, weighted norms, best constants, Carleson embedding.

Matrices act on leaf-value vectors; the L^2 pairing carries the leaf width
2^{-D}, which cancels between domain and codomain in every norm here, so

    || T : L^2(mu) -> L^2(lambda) || = sigma_max( diag(sqrt(lambda)) M diag(1/sqrt(mu)) ).

Dense SVD is used up to a dimension cap (default depth 10); above it the
caller must opt into certified power iteration.

best_quadratic_constant(A, G) returns the least C with  x' A x <= C x' G x
for all x, i.e. the top generalized eigenvalue; G must be positive definite
and A positive semidefinite.

The Carleson block ties the coefficient functionals to embedding constants:
carleson_constant does the definitional bottom-up scan, while
carleson_embedding_check independently finds the best constant C* of

    sum_I a_I E^w_I(phi)^2 <= C* ||phi||^2_{L^2(w)}

and verifies carleson <= C* <= 4 * carleson (the classical dyadic embedding
factor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
import scipy.linalg

from .bmo import BmoReport, bmo_report
from .errors import DenseCapError, NotPositiveDefiniteError
from .grid import DyadicGrid, StepFunction, analyze_leaves, haar_matrix
from .operators import is_admissible
from .weights import Weight, a2_characteristic, rho_weight

__all__ = [
    "LinearOperatorMatrix",
    "identity_matrix",
    "averaging_matrix",
    "expectation_matrix",
    "operator_matrix",
    "paraproduct_matrix",
    "paraproduct_adjoint_matrix",
    "shift_matrix",
    "commutator_matrix",
    "weighted_operator_norm",
    "power_iteration_norm",
    "best_quadratic_constant",
    "ppott_forms",
    "ppott_best_constant",
    "CarlesonSequence",
    "carleson_constant",
    "CarlesonEmbeddingReport",
    "carleson_embedding_check",
    "paraproduct_carleson_sequence",
    "adjoint_paraproduct_carleson_sequence",
    "necessity_restriction_ratios",
    "necessity_test_function_bound",
    "NormReport",
    "compute_norm_report",
]

DENSE_DEPTH_CAP = 10


@dataclass(frozen=True)
class LinearOperatorMatrix:
    """An operator on leaf vectors, with bookkeeping.

    truncated=True marks matrices that structurally drop level-(D-1) content
    (shift and commutator assemblies do, by the shift's nature).
    """

    grid: DyadicGrid
    matrix: np.ndarray
    tag: str
    truncated: bool = False

    def __post_init__(self):
        n = self.grid.n_leaves
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.shape != (n, n):
            raise ValueError(f"matrix must be {n}x{n}, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError(f"matrix {self.tag!r} has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, f: StepFunction) -> StepFunction:
        return StepFunction(self.grid, self.matrix @ f.values)


def identity_matrix(grid: DyadicGrid) -> LinearOperatorMatrix:
    return LinearOperatorMatrix(grid, np.eye(grid.n_leaves), "identity")


def averaging_matrix(grid: DyadicGrid) -> np.ndarray:
    """Rows indexed by intervals (level-major, levels 0..D-1), A[I, j] = 2^{k-D}
    for leaves j inside I, so (A v)_I = <v>_I."""
    n = grid.n_leaves
    rows = []
    for k in range(grid.depth):
        block = np.zeros((1 << k, n))
        width = n >> k
        for j in range(1 << k):
            block[j, j * width : (j + 1) * width] = 2.0 ** (k - grid.depth)
        rows.append(block)
    return np.vstack(rows)


def expectation_matrix(w: Weight) -> np.ndarray:
    """Rows indexed by intervals (level-major, levels 0..D-1):
    L[I, j] = w_j 2^{-D} / w(I) for leaves j inside I, so (L phi)_I = E^w_I(phi)."""
    grid = w.grid
    n = grid.n_leaves
    leaf_masses = w.values * grid.leaf_width
    rows = []
    for k in range(grid.depth):
        block = np.zeros((1 << k, n))
        width = n >> k
        masses = w.level_masses[k]
        for j in range(1 << k):
            block[j, j * width : (j + 1) * width] = (
                leaf_masses[j * width : (j + 1) * width] / masses[j]
            )
        rows.append(block)
    return np.vstack(rows)


def operator_matrix(
    grid: DyadicGrid, fn: Callable[[StepFunction], StepFunction], tag: str
) -> LinearOperatorMatrix:
    """Assemble any linear map column by column from its action on leaf
    indicators.  Independent of the closed-form assemblies below; tests use it
    as the oracle route."""
    n = grid.n_leaves
    cols = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        cols[:, j] = fn(StepFunction(grid, e)).values
    return LinearOperatorMatrix(grid, cols, tag)


def paraproduct_matrix(b: StepFunction) -> LinearOperatorMatrix:
    """M = H' diag(bhat) A: h-synthesis of bhat(I) <f>_I."""
    grid = b.grid
    _, cb = analyze_leaves(b.values, grid.depth)
    d = np.concatenate(cb)
    H = haar_matrix(grid)
    A = averaging_matrix(grid)
    return LinearOperatorMatrix(grid, H.T @ (d[:, None] * A), "paraproduct")


def paraproduct_adjoint_matrix(b: StepFunction) -> LinearOperatorMatrix:
    """The unweighted adjoint: exactly the transpose of paraproduct_matrix."""
    base = paraproduct_matrix(b)
    return LinearOperatorMatrix(base.grid, base.matrix.T.copy(), "paraproduct_adjoint")


def _shift_image_matrix(grid: DyadicGrid) -> np.ndarray:
    """Rows indexed like haar_matrix: row I holds the leaf values of Sh h_I.
    Level-(D-1) rows are zero (structural truncation)."""
    n = grid.n_leaves
    rows = []
    for k in range(grid.depth):
        block = np.zeros((1 << k, n))
        if k <= grid.depth - 2:
            scale = math.sqrt(2**k)
            width = n >> (k + 2)
            view = block.reshape(1 << k, 1 << k, 4, width)
            idx = np.arange(1 << k)
            view[idx, idx, 0, :] = -scale
            view[idx, idx, 1, :] = scale
            view[idx, idx, 2, :] = scale
            view[idx, idx, 3, :] = -scale
        rows.append(block)
    return np.vstack(rows)


def shift_matrix(grid: DyadicGrid) -> LinearOperatorMatrix:
    """M = G' (2^{-D} H) where row I of G is Sh h_I: analyze, then re-emit each
    coefficient through the shifted Haar function."""
    H = haar_matrix(grid)
    G = _shift_image_matrix(grid)
    M = G.T @ (H * grid.leaf_width)
    return LinearOperatorMatrix(grid, M, "shift", truncated=True)


def commutator_matrix(b: StepFunction) -> LinearOperatorMatrix:
    """M = diag(b) M_Sh - M_Sh diag(b)."""
    grid = b.grid
    S = shift_matrix(grid).matrix
    D = b.values
    M = D[:, None] * S - S * D[None, :]
    return LinearOperatorMatrix(grid, M, "commutator", truncated=True)


def _weighted_matrix(T: LinearOperatorMatrix, mu: Weight, lam: Weight) -> np.ndarray:
    if T.grid != mu.grid or T.grid != lam.grid:
        raise ValueError("operator and weights must share one grid")
    return np.sqrt(lam.values)[:, None] * T.matrix * (1.0 / np.sqrt(mu.values))[None, :]


class PowerIterationResult(NamedTuple):
    norm: float
    lower: float
    upper: float
    iterations: int


def power_iteration_norm(
    W: np.ndarray,
    tol: float = 1e-6,
    max_iter: int = 20000,
    seed: int = 0,
) -> PowerIterationResult:
    """Largest singular value of W by power iteration on B = W'W.

    Bracket semantics: every Rayleigh quotient of B is an unconditional lower
    bound for sigma_max^2.  The residual bound r + ||Bx - rx|| covers the
    eigenvalue nearest r, so it is taken per iterate (never min-ed across
    iterations, where a far-from-converged x would clamp it below the truth)
    and capped by the unconditional ceilings ||W||_F^2 and ||W||_1 ||W||_inf.
    Stops when the current bracket's relative width is below tol; as the
    iterate enters the top eigenspace the residual vanishes and the bracket
    collapses onto sigma_max^2.
    """
    rng = np.random.default_rng(seed)
    n = W.shape[1]
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    B = lambda v: W.T @ (W @ v)  # noqa: E731
    abs_w = np.abs(W)
    static_cap = min(
        float((W**2).sum()),
        float(abs_w.sum(axis=1).max() * abs_w.sum(axis=0).max()),
    )
    lower = 0.0
    upper = static_cap
    for it in range(1, max_iter + 1):
        y = B(x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return PowerIterationResult(0.0, 0.0, 0.0, it)
        r = float(x @ y)  # Rayleigh quotient of B at unit x
        resid = float(np.linalg.norm(y - r * x))
        lower = max(lower, r)
        upper = min(static_cap, max(lower, r + resid))
        if upper <= lower * (1.0 + tol) or upper - lower <= tol**2:
            break
        x = y / ny
    lo = math.sqrt(max(lower, 0.0))
    hi = math.sqrt(max(upper, 0.0))
    return PowerIterationResult(0.5 * (lo + hi), lo, hi, it)


def weighted_operator_norm(
    T: LinearOperatorMatrix,
    mu: Weight,
    lam: Weight,
    method: str = "dense",
    dense_depth_cap: int = DENSE_DEPTH_CAP,
    tol: float = 1e-6,
) -> float:
    """|| T : L^2(mu) -> L^2(lambda) ||, exact cancellation of grid factors.

    method="dense" computes all singular values (refused above the depth cap
    with instructions to switch); method="power" runs certified power
    iteration and returns the bracket midpoint.
    """
    W = _weighted_matrix(T, mu, lam)
    if method == "dense":
        if T.grid.depth > dense_depth_cap:
            raise DenseCapError(
                f"depth {T.grid.depth} exceeds the dense cap {dense_depth_cap}; "
                f"pass method='power' (certified power iteration) or raise "
                f"dense_depth_cap explicitly"
            )
        s = scipy.linalg.svdvals(W)
        return float(s[0])
    if method == "power":
        return power_iteration_norm(W, tol=tol).norm
    raise ValueError(f"method must be 'dense' or 'power', got {method!r}")


def best_quadratic_constant(A: np.ndarray, G: np.ndarray, psd_tol: float = 1e-10) -> float:
    """Least C with x'Ax <= C x'Gx for all x: top eigenvalue of the pencil (A, G).

    G must be symmetric positive definite, A symmetric positive semidefinite
    (up to psd_tol relative slack); violations raise NotPositiveDefiniteError.
    """
    A = np.asarray(A, dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    if A.shape != G.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A and G must be square matrices of one shape")
    if not np.allclose(A, A.T, atol=1e-12, rtol=1e-12):
        raise NotPositiveDefiniteError("A is not symmetric")
    if not np.allclose(G, G.T, atol=1e-12, rtol=1e-12):
        raise NotPositiveDefiniteError("G is not symmetric")
    try:
        scipy.linalg.cholesky(G, lower=True)
    except scipy.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"G is not positive definite: {e}") from e
    eigs = scipy.linalg.eigh(A, G, eigvals_only=True)
    scale = float(np.abs(eigs).max(initial=0.0))
    if eigs[0] < -psd_tol * max(scale, 1.0):
        raise NotPositiveDefiniteError(
            f"A has a significantly negative pencil eigenvalue {eigs[0]:.3e}"
        )
    return float(max(eigs[-1], 0.0))


def ppott_forms(w: Weight) -> tuple[np.ndarray, np.ndarray]:
    """Quadratic forms (A, G) for the weighted coefficient-energy inequality

        sum_I fhat(I)^2 / <w>_I  <=  C ||f||^2_{L^2(w^{-1})}.

    With H the Haar matrix and fhat = 2^{-D} H v:
    A = 2^{-2D} H' diag(1/<w>_I) H and G = 2^{-D} diag(w^{-1}).
    """
    grid = w.grid
    H = haar_matrix(grid)
    inv_avgs = np.concatenate(
        [1.0 / w.averages_at_level(k) for k in range(grid.depth)]
    )
    s = grid.leaf_width
    A = (H.T * inv_avgs[None, :]) @ H * (s * s)
    A = 0.5 * (A + A.T)
    G = np.diag(w.inverse.values * s)
    return A, G


def ppott_best_constant(w: Weight) -> float:
    """Best constant of the coefficient-energy inequality for the weight w.

    Bounded below by 1/[w]_{A2} and equals 1 exactly when w is constant.
    """
    A, G = ppott_forms(w)
    return best_quadratic_constant(A, G)


class CarlesonSequence:
    """Nonnegative numbers a_I on coefficient levels 0..D-1, tested against a
    weight w."""

    __slots__ = ("grid", "level_values", "weight")

    def __init__(self, grid: DyadicGrid, level_values, weight: Weight):
        if weight.grid != grid:
            raise ValueError("sequence and weight must share one grid")
        if len(level_values) != grid.depth:
            raise ValueError(f"expected {grid.depth} levels, got {len(level_values)}")
        frozen = []
        for k, arr in enumerate(level_values):
            a = np.array(arr, dtype=np.float64)
            if a.shape != (1 << k,):
                raise ValueError(f"level {k} must have {1 << k} entries")
            if np.any(a < 0.0) or not np.all(np.isfinite(a)):
                raise ValueError("Carleson sequence entries must be finite and >= 0")
            a.setflags(write=False)
            frozen.append(a)
        self.grid = grid
        self.level_values = tuple(frozen)
        self.weight = weight

    def flat(self) -> np.ndarray:
        return np.concatenate(self.level_values)


def carleson_constant(seq: CarlesonSequence) -> float:
    """sup_J (1/w(J)) sum_{I subset= J} a_I over coefficient levels, by a
    bottom-up subtree-sum pass."""
    depth = seq.grid.depth
    sums = [None] * depth  # type: ignore[list-item]
    acc = seq.level_values[depth - 1].copy()
    sums[depth - 1] = acc
    for k in range(depth - 2, -1, -1):
        acc = seq.level_values[k] + acc.reshape(-1, 2).sum(axis=1)
        sums[k] = acc
    best = 0.0
    for k in range(depth):
        best = max(best, float((sums[k] / seq.weight.level_masses[k]).max()))
    return best


@dataclass(frozen=True)
class CarlesonEmbeddingReport:
    carleson: float
    best_embedding: float
    ratio: float

    def to_dict(self) -> dict:
        return {
            "carleson": self.carleson,
            "best_embedding": self.best_embedding,
            "ratio": self.ratio,
        }


def carleson_embedding_check(seq: CarlesonSequence) -> CarlesonEmbeddingReport:
    """Best constant C* of sum_I a_I E^w_I(phi)^2 <= C* ||phi||^2_{L^2(w)},
    found as a generalized eigenvalue, reported against the Carleson constant.

    The classical dyadic embedding theorem pins C* within [carleson,
    4*carleson]; callers assert that window.
    """
    w = seq.weight
    grid = seq.grid
    L = expectation_matrix(w)
    a = seq.flat()
    A = (L.T * a[None, :]) @ L
    A = 0.5 * (A + A.T)
    G = np.diag(w.values * grid.leaf_width)
    best = best_quadratic_constant(A, G)
    car = carleson_constant(seq)
    ratio = best / car if car > 0 else math.nan
    return CarlesonEmbeddingReport(carleson=car, best_embedding=best, ratio=ratio)


def paraproduct_carleson_sequence(
    b: StepFunction, mu: Weight, lam: Weight
) -> CarlesonSequence:
    """a_I = bhat(I)^2 <mu^{-1}>_I^2 <lambda>_I, tested against mu^{-1}.

    Its Carleson constant is bloom_b2(b, mu, lambda)^2 by definition; the two
    code paths cross-validate each other.
    """
    depth = b.grid.depth
    mu_inv = mu.inverse
    _, cb = analyze_leaves(b.values, depth)
    vals = [
        cb[k] ** 2 * mu_inv.averages_at_level(k) ** 2 * lam.averages_at_level(k)
        for k in range(depth)
    ]
    return CarlesonSequence(b.grid, vals, mu_inv)


def adjoint_paraproduct_carleson_sequence(
    b: StepFunction, mu: Weight, lam: Weight
) -> CarlesonSequence:
    """a_I = bhat(I)^2 <lambda>_I^2 <mu^{-1}>_I, tested against lambda.

    Carleson constant equals bloom_b2_dual(b, mu, lambda)^2.
    """
    depth = b.grid.depth
    mu_inv = mu.inverse
    _, cb = analyze_leaves(b.values, depth)
    vals = [
        cb[k] ** 2 * lam.averages_at_level(k) ** 2 * mu_inv.averages_at_level(k)
        for k in range(depth)
    ]
    return CarlesonSequence(b.grid, vals, lam)


def necessity_restriction_ratios(
    b: StepFunction, mu: Weight, lam: Weight
) -> list[np.ndarray]:
    """Per-interval ratios behind the test-function lower bound.

    For each K the test function is phi_K = mu^{-1} 1_K, whose L^2(mu) norm is
    mu^{-1}(K)^{1/2}.  With

        num(K)^2 = (1/mu^{-1}(K)) sum_{I subset= K} bhat(I)^2 <mu^{-1}>_I^2 <lambda>_I
        den(K)   = || Pi_b phi_K ||_{L^2(lambda)} / mu^{-1}(K)^{1/2}

    the ratio num/den compares the localized coefficient sum (whose sup over K
    is bloom_b2) with the normalized action of the full paraproduct on the
    test function.  Pi_b phi_K reproduces the localized coefficients on I
    subset= K; intervals containing K add a term constant on K plus mass
    outside K, so the comparison is not an exact identity and the suites
    record where the ratio lands.  num(K) = 0 forces every localized term to
    vanish, and the ratio is defined as 0 there.
    """
    from .grid import DyadicInterval, indicator
    from .operators import paraproduct as _pi

    grid = b.grid
    depth = grid.depth
    mu_inv = mu.inverse
    _, cb = analyze_leaves(b.values, depth)
    per_level = [
        cb[k] ** 2 * mu_inv.averages_at_level(k) ** 2 * lam.averages_at_level(k)
        for k in range(depth)
    ]
    sums = [None] * depth  # type: ignore[list-item]
    acc = per_level[depth - 1].copy()
    sums[depth - 1] = acc
    for k in range(depth - 2, -1, -1):
        acc = per_level[k] + acc.reshape(-1, 2).sum(axis=1)
        sums[k] = acc
    out = []
    lam_vals = lam.values
    for k in range(depth):
        row = np.zeros(1 << k)
        for j in range(1 << k):
            K = DyadicInterval(k, j)
            mass = mu_inv.mass(K)
            num = float(sums[k][j]) / mass
            if num == 0.0:
                row[j] = 0.0
                continue
            phi = StepFunction(grid, mu_inv.values * indicator(grid, K).values)
            img = _pi(b, phi)
            den = float((img.values**2 * lam_vals).mean()) / mass
            row[j] = math.sqrt(num / den)
        out.append(row)
    return out


def necessity_test_function_bound(b: StepFunction, mu: Weight, lam: Weight) -> float:
    """Max over K of the restriction ratio above (0 when b has no active
    coefficients at all)."""
    ratios = necessity_restriction_ratios(b, mu, lam)
    return max((float(r.max()) for r in ratios if r.size), default=0.0)


@dataclass(frozen=True)
class NormReport:
    """One full snapshot: weight characteristics, symbol functionals, operator
    norms, and their dimensionless ratios."""

    depth: int
    a2_mu: float
    a2_lambda: float
    a2_rho: float
    bmo: BmoReport
    norm_paraproduct: float
    norm_paraproduct_adjoint: float
    norm_shift_mu: float
    norm_shift_lambda: float
    norm_commutator: float
    shift_truncated: bool
    ratios: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "a2_mu": self.a2_mu,
            "a2_lambda": self.a2_lambda,
            "a2_rho": self.a2_rho,
            "bmo": self.bmo.to_dict(),
            "norm_paraproduct": self.norm_paraproduct,
            "norm_paraproduct_adjoint": self.norm_paraproduct_adjoint,
            "norm_shift_mu": self.norm_shift_mu,
            "norm_shift_lambda": self.norm_shift_lambda,
            "norm_commutator": self.norm_commutator,
            "shift_truncated": self.shift_truncated,
            "ratios": dict(self.ratios),
        }


def _safe_ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.nan
    return num / den


def compute_norm_report(
    b: StepFunction,
    mu: Weight,
    lam: Weight,
    method: str = "dense",
    dense_depth_cap: int = DENSE_DEPTH_CAP,
) -> NormReport:
    """Assemble every norm and functional for one (b, mu, lambda) triple.

    Norms use the raw symbol; shift_truncated records whether b (or any shift
    input) carries level-(D-1) content that the shift drops structurally.
    """
    grid = b.grid
    rho = rho_weight(mu, lam)
    rep = bmo_report(b, mu, lam)
    kw = {"method": method, "dense_depth_cap": dense_depth_cap}
    pi = paraproduct_matrix(b)
    pi_adj = paraproduct_adjoint_matrix(b)
    sh = shift_matrix(grid)
    comm = commutator_matrix(b)
    norm_pi = weighted_operator_norm(pi, mu, lam, **kw)
    norm_pi_adj = weighted_operator_norm(pi_adj, lam.inverse, mu.inverse, **kw)
    norm_sh_mu = weighted_operator_norm(sh, mu, mu, **kw)
    norm_sh_lam = weighted_operator_norm(sh, lam, lam, **kw)
    norm_comm = weighted_operator_norm(comm, mu, lam, **kw)
    ratios = {
        "commutator_over_bmo_rho": _safe_ratio(norm_comm, rep.bmo_rho),
        "bmo_rho_over_commutator": _safe_ratio(rep.bmo_rho, norm_comm),
        "paraproduct_over_bloom_b2": _safe_ratio(norm_pi, rep.bloom_b2),
        "bloom_b2_over_paraproduct": _safe_ratio(rep.bloom_b2, norm_pi),
        "adjoint_over_bloom_b2_dual": _safe_ratio(norm_pi_adj, rep.bloom_b2_dual),
        "l2form_over_bloom_b2": _safe_ratio(rep.bloom_b2_l2form, rep.bloom_b2),
        "shift_mu_norm_over_sqrt_a2": _safe_ratio(
            norm_sh_mu, math.sqrt(a2_characteristic(mu))
        ),
    }
    return NormReport(
        depth=grid.depth,
        a2_mu=a2_characteristic(mu),
        a2_lambda=a2_characteristic(lam),
        a2_rho=a2_characteristic(rho),
        bmo=rep,
        norm_paraproduct=norm_pi,
        norm_paraproduct_adjoint=norm_pi_adj,
        norm_shift_mu=norm_sh_mu,
        norm_shift_lambda=norm_sh_lam,
        norm_commutator=norm_comm,
        shift_truncated=not is_admissible(b),
        ratios=ratios,
    )
