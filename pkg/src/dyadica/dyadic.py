"""Shifted dyadic lattices on the torus: cubes, goodness, joins, majorants.

A system is the standard dyadic partition chain translated by an offset that
is a whole number of finest cells.  Averaging over all ``2**L`` offsets
realizes the random-lattice expectation exactly on the cell-average function
space, since finer shifts are indistinguishable there.

A cube is *bad* when the boundary of some much larger cube of the same
system passes too close::

    exists J:  side(J) >= 2**r * side(I)  and
               dist(I, boundary(J)) <= side(J) * (side(I)/side(J))**gamma

and *good* otherwise.  Cubes too coarse for any qualifying J are good (the
condition is an existential over an empty range).  On the torus the level-0
interval still contributes its seam point as a boundary.

All distances are computed in integer cell units, and the power-law
threshold comparison is done in exact integer arithmetic whenever ``gamma``
is (within 1e-12) a small rational, so boundary ties are classified
deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np

from .errors import (
    ContractError,
    LevelUnderflowError,
    ParameterError,
    SystemMismatchError,
)
from .grid import Axis, GridFunction


@dataclass(frozen=True)
class DyadicSystem:
    """A shifted dyadic lattice on an axis; ``offset_cells`` finest cells."""

    axis: Axis
    offset_cells: int

    def __post_init__(self):
        if not 0 <= self.offset_cells < self.axis.n_cells:
            raise ParameterError(
                f"offset_cells must lie in [0, {self.axis.n_cells}), "
                f"got {self.offset_cells}"
            )

    @property
    def offset(self) -> float:
        return self.offset_cells * self.axis.h

    @property
    def level_count(self) -> int:
        """Number of cube levels, 0 .. L inclusive."""
        return self.axis.level + 1

    def cube(self, level: int, index: int) -> "DyadicCube":
        return DyadicCube(self, level, index)

    def cubes_at_level(self, level: int):
        return [DyadicCube(self, level, m) for m in range(1 << level)]


@dataclass(frozen=True)
class DyadicCube:
    """The interval ``[offset + index * 2**-level, ... + 2**-level) mod 1``."""

    system: DyadicSystem
    level: int
    index: int

    def __post_init__(self):
        if not 0 <= self.level <= self.system.axis.level:
            raise ParameterError(
                f"cube level must lie in [0, {self.system.axis.level}], "
                f"got {self.level}"
            )
        if not 0 <= self.index < (1 << self.level):
            raise ParameterError(
                f"cube index must lie in [0, 2**{self.level}), got {self.index}"
            )

    @property
    def axis(self) -> Axis:
        return self.system.axis

    @property
    def side(self) -> float:
        return 2.0 ** (-self.level)

    @property
    def width_cells(self) -> int:
        return self.axis.n_cells >> self.level

    @property
    def start_cell(self) -> int:
        n = self.axis.n_cells
        return (self.system.offset_cells + self.index * self.width_cells) % n

    @property
    def start(self) -> float:
        return self.start_cell * self.axis.h

    def cells(self) -> np.ndarray:
        """Indices of the finest cells the cube covers (wrap-aware)."""
        n = self.axis.n_cells
        return (self.start_cell + np.arange(self.width_cells)) % n

    def indicator(self) -> GridFunction:
        vals = np.zeros(self.axis.n_cells)
        vals[self.cells()] = 1.0
        return GridFunction((self.axis,), vals)


@dataclass(frozen=True)
class GoodParams:
    r: int = 3
    gamma: float = 0.25

    def __post_init__(self):
        if self.r < 1:
            raise ParameterError(f"r must be a positive integer, got {self.r}")
        if not 0.0 < self.gamma < 0.5:
            raise ParameterError(f"gamma must lie in (0, 1/2), got {self.gamma}")


def default_gamma(lam: float) -> float:
    """The useful choice gamma = 1 / (2 (lambda + 1))."""
    return 1.0 / (2.0 * (lam + 1.0))


# ---------------------------------------------------------------------------
# construction


def sample_system(axis: Axis, seed: int) -> DyadicSystem:
    """Draw a system offset uniformly from the ``2**L`` cell multiples."""
    rng = np.random.default_rng(seed)
    return DyadicSystem(axis, int(rng.integers(0, axis.n_cells)))


def enumerate_systems(axis: Axis) -> list[DyadicSystem]:
    """All distinct systems of the axis, one per offset."""
    return [DyadicSystem(axis, o) for o in range(axis.n_cells)]


# ---------------------------------------------------------------------------
# navigation


def ancestor(cube: DyadicCube, i: int) -> DyadicCube:
    """The unique cube ``i`` levels above; ``ancestor(c, 0) == c``."""
    if i < 0:
        raise ParameterError(f"ancestor depth must be >= 0, got {i}")
    if i > cube.level:
        raise LevelUnderflowError(
            f"no ancestor {i} levels above a level-{cube.level} cube"
        )
    return DyadicCube(cube.system, cube.level - i, cube.index >> i)


def children(cube: DyadicCube) -> tuple[DyadicCube, DyadicCube]:
    if cube.level >= cube.axis.level:
        raise LevelUnderflowError("finest-level cubes have no mesh children")
    k = cube.level + 1
    return (
        DyadicCube(cube.system, k, 2 * cube.index),
        DyadicCube(cube.system, k, 2 * cube.index + 1),
    )


def contains(outer: DyadicCube, inner: DyadicCube) -> bool:
    """Whether ``inner`` is a (weak) descendant of ``outer``."""
    if outer.system != inner.system:
        raise SystemMismatchError("containment requires a shared system")
    if outer.level > inner.level:
        return False
    return (inner.index >> (inner.level - outer.level)) == outer.index


def join(I: DyadicCube, J: DyadicCube) -> DyadicCube:
    """Smallest cube of the shared system containing both inputs.

    Always exists on the torus (the level-0 cube in the worst case).
    """
    if I.system != J.system:
        raise SystemMismatchError("join requires cubes from one system")
    if I.level < J.level:
        I, J = J, I
    a = I.index >> (I.level - J.level)
    up = (a ^ J.index).bit_length()
    return DyadicCube(I.system, J.level - up, J.index >> up)


# ---------------------------------------------------------------------------
# distances (integer cell units; exact)


def _arc_gap_cells(n: int, s1: int, w1: int, s2: int, w2: int) -> int:
    """Torus distance in cells between two arcs; 0 when they intersect."""
    if (s2 - s1) % n < w1 or (s1 - s2) % n < w2:
        return 0
    return min((s2 - (s1 + w1)) % n, (s1 - (s2 + w2)) % n)


def cube_distance_cells(I: DyadicCube, J: DyadicCube) -> int:
    if I.axis != J.axis:
        raise SystemMismatchError("distance requires cubes on one axis")
    return _arc_gap_cells(
        I.axis.n_cells, I.start_cell, I.width_cells, J.start_cell, J.width_cells
    )


def cube_distance(I: DyadicCube, J: DyadicCube) -> float:
    return cube_distance_cells(I, J) * I.axis.h


def boundary_distance_cells(I: DyadicCube, J: DyadicCube) -> int:
    """dist(closure(I), endpoint set of J) in cells, torus metric."""
    if I.axis != J.axis:
        raise SystemMismatchError("distance requires cubes on one axis")
    n = I.axis.n_cells
    s, w = I.start_cell, I.width_cells
    best = n
    for p in (J.start_cell, (J.start_cell + J.width_cells) % n):
        if (p - s) % n <= w:
            return 0
        best = min(best, (p - (s + w)) % n, (s - p) % n)
    return best


def boundary_distance(I: DyadicCube, J: DyadicCube) -> float:
    return boundary_distance_cells(I, J) * I.axis.h


# ---------------------------------------------------------------------------
# the power-law threshold  dist <= 2**-kj * (2**-depth)**gamma


def _gamma_ratio(gamma: float, max_den: int = 64):
    frac = Fraction(gamma).limit_denominator(max_den)
    if abs(float(frac) - gamma) < 1e-12:
        return frac.numerator, frac.denominator
    return None


def _within_threshold(dist_cells: int, L: int, level_j: int, depth: int,
                      gamma: float) -> bool:
    """Exact test of  dist_cells * 2**-L  <=  2**(-level_j - depth*gamma)."""
    ratio = _gamma_ratio(gamma)
    if ratio is not None:
        a, b = ratio
        return int(dist_cells) ** b <= 1 << (b * (L - level_j) - a * depth)
    return dist_cells * 2.0 ** (-L) <= 2.0 ** (-level_j - depth * gamma)


def _within_threshold_arr(dist_cells: np.ndarray, L: int, level_j: int,
                          depth: int, gamma: float) -> np.ndarray:
    ratio = _gamma_ratio(gamma)
    if ratio is not None:
        a, b = ratio
        exp = b * (L - level_j) - a * depth
        if b * L < 62 and exp < 62:
            d = dist_cells.astype(np.int64)
            return d ** b <= np.int64(1) << np.int64(exp)
        dd = dist_cells.astype(float)
        return b * np.log2(np.maximum(dd, 0.5)) <= float(exp)
    return dist_cells * 2.0 ** (-L) <= 2.0 ** (-level_j - depth * gamma)


# ---------------------------------------------------------------------------
# goodness


def bad_mask(system: DyadicSystem, level: int, params: GoodParams) -> np.ndarray:
    """Boolean badness flags for every index at one level (vectorized).

    For each larger-cube level ``kJ`` the union of boundaries is the coarse
    sub-lattice of spacing ``2**(L - kJ)`` cells (in offset-relative
    coordinates), so the scan works on lattice distances directly.
    """
    L = system.axis.level
    n = system.axis.n_cells
    w = n >> level
    m = np.arange(1 << level)
    s = m * w          # offset-relative start, in cells
    e = s + w          # offset-relative end
    bad = np.zeros(len(m), dtype=bool)
    for kj in range(0, level - params.r + 1):
        spacing = n >> kj
        smod = s % spacing
        emod = e % spacing
        touches = (smod == 0) | (emod == 0) | ((e // spacing) > (s // spacing))
        dist = np.minimum(smod, spacing - emod)
        dist = np.where(touches, 0, dist)
        bad |= _within_threshold_arr(dist, L, kj, level - kj, params.gamma)
    return bad


def is_good(cube: DyadicCube, params: GoodParams) -> bool:
    """Exact goodness of a single cube (see the module docstring)."""
    L = cube.axis.level
    n = cube.axis.n_cells
    s = cube.index * cube.width_cells
    e = s + cube.width_cells
    for kj in range(0, cube.level - params.r + 1):
        spacing = n >> kj
        touches = (s % spacing == 0) or (e % spacing == 0) or (
            e // spacing > s // spacing
        )
        dist = 0 if touches else min(s % spacing, spacing - e % spacing)
        if _within_threshold(dist, L, kj, cube.level - kj, params.gamma):
            return False
    return True


@dataclass(frozen=True)
class PgoodEstimate:
    estimate: float
    halfwidth: float
    trials: int
    exhaustive: bool


def estimate_pgood(axis: Axis, params: GoodParams, level_k: int, trials: int,
                   seed: int, ref_point: float = 0.0) -> PgoodEstimate:
    """Fraction of systems in which the level-``level_k`` cube containing
    ``ref_point`` is good.

    With ``trials >= 2**L`` the offsets are enumerated exhaustively (the
    estimate is then exact and the halfwidth zero); otherwise offsets are
    sampled and a binomial 95% halfwidth is reported.
    """
    if level_k < params.r:
        raise ContractError(
            f"level_k must be >= r = {params.r} for goodness to be nontrivial"
        )
    if trials < 1:
        raise ContractError("trials must be >= 1")
    n = axis.n_cells
    ref_cell = int((ref_point % 1.0) * n) % n
    exhaustive = trials >= n
    if exhaustive:
        offsets = np.arange(n)
    else:
        offsets = np.random.default_rng(seed).integers(0, n, size=trials)
    hits = 0
    for off in offsets:
        system = DyadicSystem(axis, int(off))
        m = ((ref_cell - int(off)) % n) >> (axis.level - level_k)
        if is_good(DyadicCube(system, level_k, m), params):
            hits += 1
    count = len(offsets)
    p = hits / count
    half = 0.0 if exhaustive else 1.96 * sqrt(max(p * (1.0 - p), 0.0) / count)
    return PgoodEstimate(p, half, count, exhaustive)


# ---------------------------------------------------------------------------
# majorant check


@dataclass(frozen=True)
class MajorantReport:
    case: str            # "near" or "far"
    K: DyadicCube
    holds: bool
    lhs: float
    rhs: float


def majorant_check(I: DyadicCube, J: DyadicCube, params: GoodParams,
                   lam: float) -> MajorantReport:
    """Check the common-majorant bound for a good/disjoint cube pair.

    Requires ``I`` good, ``I`` and ``J`` disjoint, and ``side(I) <=
    side(J)``.  With ``K = join(I, J)`` and ``g = 1/(2(lam+1))``:

    * near case (``dist(I, J) <= side(J) * (side(I)/side(J))**g``): the
      bound is ``side(K) <= 2**r * side(I)``;
    * far case (otherwise): the bound is
      ``side(K) * (side(I)/side(K))**g <= 2**r * dist(I, J)``.

    Both comparisons are evaluated exactly (integer arithmetic) whenever the
    exponent is a small rational of ``lam``.
    """
    if I.system != J.system:
        raise SystemMismatchError("majorant check requires one system")
    if I.level < J.level:
        raise ContractError("requires side(I) <= side(J); swap the arguments")
    if not is_good(I, params):
        raise ContractError("majorant check requires a good smaller cube")
    dist = cube_distance_cells(I, J)
    overlap = ((J.start_cell - I.start_cell) % I.axis.n_cells < I.width_cells
               or (I.start_cell - J.start_cell) % I.axis.n_cells < J.width_cells)
    if overlap:
        raise ContractError("majorant check requires disjoint cubes")
    gamma = default_gamma(lam)
    K = join(I, J)
    L = I.axis.level
    r = params.r
    near = _within_threshold(dist, L, J.level, I.level - J.level, gamma)
    if near:
        lhs = K.side
        rhs = 2.0 ** r * I.side
        holds = I.level - K.level <= r
        return MajorantReport("near", K, holds, lhs, rhs)
    lhs = K.side * (I.side / K.side) ** gamma
    rhs = 2.0 ** r * dist * I.axis.h
    ratio = _gamma_ratio(gamma)
    if ratio is not None:
        a, b = ratio
        # 2**(-kK - (kI-kK)*a/b) <= 2**(r-L) * dist
        exp = b * (L - r - K.level) - a * (I.level - K.level)
        holds = True if exp < 0 else (1 << exp) <= int(dist) ** b
    else:
        holds = lhs <= rhs
    return MajorantReport("far", K, holds, lhs, rhs)
