"""Finite dyadic grid on [0,1): intervals, step functions, exact Haar algebra.

The grid of depth D consists of the dyadic intervals I = [j 2^{-k}, (j+1) 2^{-k})
for levels 0 <= k <= D; level-D intervals are the leaves.  A step function is
constant on leaves and is stored as its vector of 2^D leaf values.  Integrals
are exact leaf sums scaled by 2^{-D}, so every identity in this module is a
finite linear-algebra statement.

The Haar function of an interval I with children I_- (left) and I_+ (right) is

    h_I = |I|^{-1/2} (1_{I_+} - 1_{I_-}),

normalized in unweighted L^2.  A step function of depth D is exactly

    f = mean(f) + sum over levels k < D of fhat(I) h_I,

with fhat(I) = <f, h_I>.  Analysis and synthesis below implement the two sides
of this identity by pyramid passes over sibling pairs; both operate on the last
axis so batched inputs of shape (..., 2^D) work unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import GridMismatchError

__all__ = [
    "DyadicInterval",
    "DyadicGrid",
    "StepFunction",
    "HaarSpectrum",
    "analyze_leaves",
    "synthesize_leaves",
    "level_masses",
    "haar_analyze",
    "haar_synthesize",
    "haar_function",
    "indicator",
    "haar_matrix",
    "square_function",
    "pointwise_multiply",
]


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """The interval [position * 2^-level, (position + 1) * 2^-level)."""

    level: int
    position: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"level must be >= 0, got {self.level}")
        if not 0 <= self.position < (1 << self.level):
            raise ValueError(
                f"position must be in [0, 2^{self.level}), got {self.position}"
            )

    @property
    def length(self) -> float:
        return 2.0 ** (-self.level)

    @property
    def left(self) -> "DyadicInterval":
        return DyadicInterval(self.level + 1, 2 * self.position)

    @property
    def right(self) -> "DyadicInterval":
        return DyadicInterval(self.level + 1, 2 * self.position + 1)

    @property
    def parent(self) -> "DyadicInterval":
        if self.level == 0:
            raise ValueError("the root interval has no parent")
        return DyadicInterval(self.level - 1, self.position // 2)

    @property
    def endpoints(self) -> tuple[float, float]:
        w = 2.0 ** (-self.level)
        return (self.position * w, (self.position + 1) * w)

    def contains(self, other: "DyadicInterval") -> bool:
        """Dyadic containment: other is a subinterval of (or equal to) self."""
        if other.level < self.level:
            return False
        return (other.position >> (other.level - self.level)) == self.position


ROOT = DyadicInterval(0, 0)


@dataclass(frozen=True)
class DyadicGrid:
    """Dyadic grid of depth D >= 1 on [0,1)."""

    depth: int

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.depth > 24:
            raise ValueError(f"depth {self.depth} is too large for leaf storage")

    @property
    def n_leaves(self) -> int:
        return 1 << self.depth

    @property
    def leaf_width(self) -> float:
        return 2.0 ** (-self.depth)

    @property
    def root(self) -> DyadicInterval:
        return ROOT

    def intervals(self, max_level: int | None = None) -> Iterator[DyadicInterval]:
        """All intervals in level-major order, levels 0..max_level (default D)."""
        top = self.depth if max_level is None else max_level
        for k in range(top + 1):
            for j in range(1 << k):
                yield DyadicInterval(k, j)

    def coeff_intervals(self) -> Iterator[DyadicInterval]:
        """Intervals carrying a Haar coefficient: levels 0..D-1."""
        return self.intervals(self.depth - 1)

    def leaf_slice(self, iv: DyadicInterval) -> slice:
        """Range of leaf indices covered by iv."""
        if iv.level > self.depth:
            raise ValueError(f"interval level {iv.level} exceeds depth {self.depth}")
        shift = self.depth - iv.level
        return slice(iv.position << shift, (iv.position + 1) << shift)

    def leaf_interval(self, j: int) -> DyadicInterval:
        return DyadicInterval(self.depth, j)


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatchError(
            f"objects live on different grids: depth {a.grid.depth} vs {b.grid.depth}"
        )


class StepFunction:
    """A real step function on [0,1), constant on the leaves of its grid.

    Values are stored as a read-only float64 array of length 2^D.  Arithmetic
    operators combine functions on the same grid pointwise; mixing grids raises
    GridMismatchError.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: DyadicGrid, values):
        arr = np.array(values, dtype=np.float64)
        if arr.shape != (grid.n_leaves,):
            raise ValueError(
                f"expected {grid.n_leaves} leaf values for depth {grid.depth}, "
                f"got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("leaf values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("StepFunction is immutable")

    @classmethod
    def constant(cls, grid: DyadicGrid, value: float) -> "StepFunction":
        return cls(grid, np.full(grid.n_leaves, float(value)))

    @classmethod
    def zero(cls, grid: DyadicGrid) -> "StepFunction":
        return cls.constant(grid, 0.0)

    def integral(self) -> float:
        """Exact integral over [0,1): mean of the leaf values."""
        return float(self.values.mean())

    def l2_norm(self) -> float:
        """Unweighted L^2 norm."""
        return math.sqrt(float((self.values**2).mean()))

    def average_on(self, iv: DyadicInterval) -> float:
        return float(self.values[self.grid.leaf_slice(iv)].mean())

    def integral_on(self, iv: DyadicInterval) -> float:
        return float(self.values[self.grid.leaf_slice(iv)].sum()) * self.grid.leaf_width

    def __add__(self, other):
        if isinstance(other, StepFunction):
            _check_same_grid(self, other)
            return StepFunction(self.grid, self.values + other.values)
        return StepFunction(self.grid, self.values + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, StepFunction):
            _check_same_grid(self, other)
            return StepFunction(self.grid, self.values - other.values)
        return StepFunction(self.grid, self.values - float(other))

    def __rsub__(self, other):
        return StepFunction(self.grid, float(other) - self.values)

    def __mul__(self, other):
        if isinstance(other, StepFunction):
            _check_same_grid(self, other)
            return StepFunction(self.grid, self.values * other.values)
        return StepFunction(self.grid, self.values * float(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return StepFunction(self.grid, self.values / float(scalar))

    def __neg__(self):
        return StepFunction(self.grid, -self.values)

    def __repr__(self):
        return f"StepFunction(depth={self.grid.depth}, n={self.grid.n_leaves})"


class HaarSpectrum:
    """Mean plus Haar coefficients of a step function.

    level_coeffs[k] holds the coefficients of all level-k intervals in position
    order, for 0 <= k < D.  Arrays are read-only.
    """

    __slots__ = ("grid", "mean", "level_coeffs")

    def __init__(self, grid: DyadicGrid, mean: float, level_coeffs: Sequence[np.ndarray]):
        if len(level_coeffs) != grid.depth:
            raise ValueError(
                f"expected {grid.depth} coefficient levels, got {len(level_coeffs)}"
            )
        frozen = []
        for k, arr in enumerate(level_coeffs):
            a = np.array(arr, dtype=np.float64)
            if a.shape != (1 << k,):
                raise ValueError(f"level {k} must have {1 << k} coefficients")
            a.setflags(write=False)
            frozen.append(a)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "mean", float(mean))
        object.__setattr__(self, "level_coeffs", tuple(frozen))

    def __setattr__(self, name, value):
        raise AttributeError("HaarSpectrum is immutable")

    def coeff(self, iv: DyadicInterval) -> float:
        if iv.level >= self.grid.depth:
            raise ValueError(
                f"no Haar coefficient at level {iv.level} on a depth-{self.grid.depth} grid"
            )
        return float(self.level_coeffs[iv.level][iv.position])

    def items(self) -> Iterator[tuple[DyadicInterval, float]]:
        """(interval, coefficient) pairs in level-major order."""
        for k, arr in enumerate(self.level_coeffs):
            for j in range(arr.shape[0]):
                yield DyadicInterval(k, j), float(arr[j])

    def coeff_energy(self) -> float:
        """Sum of squared coefficients (Parseval complement of the mean)."""
        return float(sum((arr**2).sum() for arr in self.level_coeffs))

    def max_nonzero_level(self, atol: float = 0.0) -> int:
        """Deepest level with a coefficient of magnitude > atol, or -1."""
        for k in range(self.grid.depth - 1, -1, -1):
            if np.abs(self.level_coeffs[k]).max(initial=0.0) > atol:
                return k
        return -1

    def truncated(self, max_level: int) -> "HaarSpectrum":
        """Copy with every level above max_level zeroed."""
        coeffs = [
            arr if k <= max_level else np.zeros_like(arr)
            for k, arr in enumerate(self.level_coeffs)
        ]
        return HaarSpectrum(self.grid, self.mean, coeffs)

    def __repr__(self):
        return f"HaarSpectrum(depth={self.grid.depth}, mean={self.mean!r})"


def analyze_leaves(values: np.ndarray, depth: int) -> tuple[np.ndarray, list[np.ndarray]]:
    """Haar analysis on the last axis of a (..., 2^depth) array.

    Returns (mean, coeffs) with mean of shape (...) and coeffs[k] of shape
    (..., 2^k).  The level-k coefficient over interval I with child masses
    m_-, m_+ is 2^{k/2} (m_+ - m_-); masses are leaf sums times 2^{-depth}.
    """
    values = np.asarray(values, dtype=np.float64)
    n = 1 << depth
    if values.shape[-1] != n:
        raise ValueError(f"last axis must have length {n}, got {values.shape[-1]}")
    batch = values.shape[:-1]
    masses = values * (2.0 ** (-depth))
    coeffs: list[np.ndarray] = [None] * depth  # type: ignore[list-item]
    for k in range(depth - 1, -1, -1):
        pairs = masses.reshape(batch + (1 << k, 2))
        coeffs[k] = math.sqrt(2**k) * (pairs[..., 1] - pairs[..., 0])
        masses = pairs.sum(axis=-1)
    # masses now has shape batch + (1,); the single entry is the total integral,
    # which equals the mean since |[0,1)| = 1.
    mean = masses[..., 0]
    return mean, coeffs


def synthesize_leaves(mean, coeffs: Sequence[np.ndarray], depth: int) -> np.ndarray:
    """Inverse of analyze_leaves on the last axis.

    Adds each level's contribution +-coeff * 2^{k/2} to the right/left halves.
    For inputs whose deepest nonzero level is k0, the result is constant on
    level-(k0+1) blocks with bitwise-identical values inside each block (the
    accumulation order per leaf is identical), which downstream exactness
    checks rely on.
    """
    mean = np.asarray(mean, dtype=np.float64)
    n = 1 << depth
    out = np.broadcast_to(mean[..., None], mean.shape + (n,)).copy()
    batch = mean.shape
    for k, c in enumerate(coeffs):
        c = np.asarray(c, dtype=np.float64)
        scaled = c * math.sqrt(2**k)
        blocks = out.reshape(batch + (1 << k, 2, n >> (k + 1)))
        blocks[..., 0, :] -= scaled[..., None]
        blocks[..., 1, :] += scaled[..., None]
    return out


def level_masses(values: np.ndarray, depth: int) -> list[np.ndarray]:
    """Masses (integrals) of every interval, by level, on the last axis.

    Returns a list of depth+1 arrays; entry k has shape (..., 2^k) and holds
    the integral of the step function over each level-k interval.  Parent mass
    equals the sum of its children exactly (same additions, same order).
    """
    values = np.asarray(values, dtype=np.float64)
    out = [None] * (depth + 1)  # type: ignore[list-item]
    m = values * (2.0 ** (-depth))
    out[depth] = m
    batch = values.shape[:-1]
    for k in range(depth - 1, -1, -1):
        m = m.reshape(batch + (1 << k, 2)).sum(axis=-1)
        out[k] = m
    return out


def haar_analyze(f: StepFunction) -> HaarSpectrum:
    """Haar transform of a step function."""
    mean, coeffs = analyze_leaves(f.values, f.grid.depth)
    return HaarSpectrum(f.grid, float(mean), coeffs)


def haar_synthesize(spectrum: HaarSpectrum) -> StepFunction:
    """Step function with the given mean and Haar coefficients."""
    vals = synthesize_leaves(
        np.asarray(spectrum.mean), spectrum.level_coeffs, spectrum.grid.depth
    )
    return StepFunction(spectrum.grid, vals)


def haar_function(grid: DyadicGrid, iv: DyadicInterval) -> StepFunction:
    """The Haar function h_I as a step function: -|I|^{-1/2} on the left child,
    +|I|^{-1/2} on the right child, 0 outside I."""
    if iv.level >= grid.depth:
        raise ValueError(
            f"h_I needs level < depth; got level {iv.level} at depth {grid.depth}"
        )
    vals = np.zeros(grid.n_leaves)
    scale = math.sqrt(2**iv.level)
    vals[grid.leaf_slice(iv.left)] = -scale
    vals[grid.leaf_slice(iv.right)] = scale
    return StepFunction(grid, vals)


def indicator(grid: DyadicGrid, iv: DyadicInterval) -> StepFunction:
    """The indicator 1_I as a step function."""
    vals = np.zeros(grid.n_leaves)
    vals[grid.leaf_slice(iv)] = 1.0
    return StepFunction(grid, vals)


def haar_matrix(grid: DyadicGrid) -> np.ndarray:
    """Matrix of Haar functions on leaves: shape (2^D - 1, 2^D).

    Row order is level-major (all level-0, then level-1, ...), matching
    DyadicGrid.coeff_intervals().  Row r holds the leaf values of h_I, so
    coefficients of f are (2^-D) * H @ f.values and the rows are orthonormal
    under the inner product <u, v> = 2^-D sum(u v).
    """
    n = grid.n_leaves
    rows = []
    for k in range(grid.depth):
        scale = math.sqrt(2**k)
        block = np.zeros((1 << k, n))
        width = n >> (k + 1)
        view = block.reshape(1 << k, 1 << k, 2, width)
        idx = np.arange(1 << k)
        view[idx, idx, 0, :] = -scale
        view[idx, idx, 1, :] = scale
        rows.append(block)
    return np.vstack(rows)


def square_function(f: StepFunction) -> StepFunction:
    """Dyadic square function Sf = (sum over I of fhat(I)^2 |I|^{-1} 1_I)^{1/2}."""
    _, coeffs = analyze_leaves(f.values, f.grid.depth)
    n = f.grid.n_leaves
    acc = np.zeros(n)
    for k, c in enumerate(coeffs):
        acc += np.repeat(c**2 * (1 << k), n >> k)
    return StepFunction(f.grid, np.sqrt(acc))


def pointwise_multiply(f: StepFunction, g: StepFunction) -> StepFunction:
    """Pointwise product of two step functions on the same grid."""
    return f * g
