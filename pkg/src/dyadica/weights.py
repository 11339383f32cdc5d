"""Positive weights and their Muckenhoupt-type bookkeeping.

Weights are strictly positive one-axis cell tables.  Characteristics are
exact maxima over a finite cube family — either every grid-aligned arc of
the axis or the cubes of chosen shifted lattices; the finite-family value
is a lower bound for the continuum supremum.  Negative powers are taken
entrywise on the cell averages, the standard discrete surrogate.  The
module also solves the smoothing-exponent relation and builds the
two-weight ratio used by the commutator experiments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .dyadic import DyadicSystem
from .errors import InfeasibleExponentError, ParameterError, ShapeError
from .grid import Axis, GridFunction, grid_function

__all__ = [
    "DerivedClassReport",
    "ExponentTriple",
    "ProductWeight",
    "Weight",
    "ap_characteristic",
    "apq_characteristic",
    "bloom_weight",
    "derived_class_check",
    "exponent_solve",
    "power_weight",
    "product_ap_characteristic",
]


# -- types ----------------------------------------------------------------


@dataclass(frozen=True)
class Weight:
    """A strictly positive one-axis cell table."""

    base: GridFunction

    def __post_init__(self):
        if len(self.base.axes) != 1:
            raise ShapeError("a weight is a one-axis function")
        if not np.all(self.base.values > 0.0):
            raise ParameterError("weight entries must be strictly positive")

    @property
    def axis(self) -> Axis:
        return self.base.axes[0]

    @property
    def values(self) -> np.ndarray:
        return self.base.values

    def power(self, exponent: float) -> "Weight":
        """Entrywise power (the discrete surrogate for pointwise powers)."""
        return Weight(self.base.with_values(self.values**exponent))


@dataclass(frozen=True)
class ProductWeight:
    """Tensor-product weight on a two-axis grid."""

    factor1: Weight
    factor2: Weight

    def evaluate(self) -> GridFunction:
        return grid_function(
            np.outer(self.factor1.values, self.factor2.values),
            self.factor1.axis,
            self.factor2.axis,
        )


@dataclass(frozen=True)
class ExponentTriple:
    """Exponent pair tied to a smoothing order: 1/q = lam - 1 + 1/p."""

    p: float
    q: float
    lam: float

    def __post_init__(self):
        if not (1.0 < self.p < self.q):
            raise ParameterError(f"need 1 < p < q, got p={self.p}, q={self.q}")
        if not 0.0 < self.lam < 1.0:
            raise ParameterError(f"lam must lie in (0, 1), got {self.lam}")
        residual = abs(1.0 / self.q + 1.0 - 1.0 / self.p - self.lam)
        if residual > 1e-12:
            raise ParameterError(
                f"exponent relation violated by {residual:.3e}: "
                "1/q + 1/p' must equal lam"
            )


def exponent_solve(p: float, lam: float) -> ExponentTriple:
    """Solve ``1/q = lam - 1 + 1/p`` for the smoothing target exponent q.

    Raises
    ------
    InfeasibleExponentError
        If the solved q is not a finite exponent larger than p.
    """
    if p <= 1.0:
        raise ParameterError(f"p must exceed 1, got {p}")
    if not 0.0 < lam < 1.0:
        raise ParameterError(f"lam must lie in (0, 1), got {lam}")
    inv_q = lam - 1.0 + 1.0 / p
    if inv_q <= 0.0:
        raise InfeasibleExponentError(
            f"no finite target exponent: 1/q = {inv_q:.6g} <= 0 at p={p}, lam={lam}"
        )
    q = 1.0 / inv_q
    if q <= p:
        raise InfeasibleExponentError(
            f"target exponent q={q:.6g} does not exceed p={p} at lam={lam}"
        )
    return ExponentTriple(p, q, lam)


# -- weight construction --------------------------------------------------


def power_weight(axis: Axis, alpha: float, center: float) -> Weight:
    """Exact cell averages of the periodic power profile d(x - center)**alpha."""
    if abs(alpha) >= 1.0:
        raise ParameterError(f"|alpha| must be below 1, got {alpha}")
    n, h = axis.n_cells, axis.h
    e = 1.0 + alpha

    def antider(u):
        # integral of d(s)**alpha over [0, u], for u in [0, 1]
        u = np.asarray(u, dtype=float)
        near = np.minimum(u, 0.5) ** e / e
        far = (2.0 * 0.5**e - (1.0 - u) ** e) / e
        return np.where(u <= 0.5, near, far)

    u1 = (np.arange(n) * h - center) % 1.0
    u2 = u1 + h
    full = 2.0 * 0.5**e / e
    vals = np.where(
        u2 > 1.0,
        full - antider(u1) + antider(np.maximum(u2 - 1.0, 0.0)),
        antider(np.minimum(u2, 1.0)) - antider(u1),
    ) / h
    return Weight(grid_function(vals, axis))


def bloom_weight(mu1: Weight, sigma1: Weight, mu2: Weight, sigma2: Weight) -> ProductWeight:
    """Entrywise two-weight ratio, one factor per axis."""
    if mu1.axis != sigma1.axis or mu2.axis != sigma2.axis:
        raise ShapeError("ratio factors must share an axis")
    f1 = Weight(mu1.base.with_values(mu1.values / sigma1.values))
    f2 = Weight(mu2.base.with_values(mu2.values / sigma2.values))
    return ProductWeight(f1, f2)


# -- cube families --------------------------------------------------------

FamilySelector = Union[str, Iterable[DyadicSystem]]


def _family_batches(axis: Axis, family: FamilySelector):
    """Yield (starts, width) batches of arcs; starts are cell indices."""
    n = axis.n_cells
    if isinstance(family, str):
        if family != "intervals":
            raise ParameterError(
                f"unknown cube family {family!r}; use 'intervals' or systems"
            )
        starts = np.arange(n)
        for width in range(1, n + 1):
            yield starts, width
        return
    seen_any = False
    for system in family:
        seen_any = True
        if system.axis != axis:
            raise ShapeError("cube-family system lives on a different axis")
        for level in range(axis.level + 1):
            width = n >> level
            starts = (system.offset_cells + np.arange(1 << level) * width) % n
            yield starts, width
    if not seen_any:
        raise ParameterError("empty cube family")


def _family_label(family: FamilySelector) -> str:
    if isinstance(family, str):
        return family
    return "dyadic[" + ",".join(str(s.offset_cells) for s in family) + "]"


def _arc_mean_batch(v: np.ndarray, starts: np.ndarray, width: int) -> np.ndarray:
    """Wrap-aware arc means, one per start, summed in cell order.

    The accumulation runs cell by cell (vectorized over the starts), so every
    arc is summed in exactly the order of a direct per-arc loop and results
    are reproducible bit for bit.  A plain ``mean(axis=1)`` would not be:
    numpy's reductions regroup sums of eight or more terms.
    """
    n = v.size
    acc = np.zeros(starts.shape, dtype=float)
    for k in range(width):
        acc = acc + v[(starts + k) % n]
    return acc / width


def _char_over_family(
    num: np.ndarray, den: np.ndarray, den_exp: float, axis: Axis, family: FamilySelector
) -> float:
    """Exact max over the family of mean(num) * mean(den)**den_exp."""
    best = -np.inf
    for starts, width in _family_batches(axis, family):
        mn = _arc_mean_batch(num, starts, width)
        md = _arc_mean_batch(den, starts, width)
        best = max(best, float(np.max(mn * md**den_exp)))
    return best


# -- characteristics ------------------------------------------------------


def ap_characteristic(w: Weight, p: float, family: FamilySelector = "intervals") -> float:
    """Exact maximum over the family of mean(w) * mean(w**(1-p'))**(p-1).

    The dual-weight exponent is evaluated as ``1 - p/(p-1)`` so that results
    are reproducible bit for bit against a direct computation written the
    textbook way (see also :func:`apq_characteristic`).
    """
    if p <= 1.0:
        raise ParameterError(f"p must exceed 1, got {p}")
    p_dual = p / (p - 1.0)
    dual = w.values ** (1.0 - p_dual)
    return _char_over_family(w.values, dual, p - 1.0, w.axis, family)


def apq_characteristic(
    w: Weight, p: float, q: float, family: FamilySelector = "intervals"
) -> float:
    """Exact maximum over the family of mean(w**q) * mean(w**(-p'))**(q/p')."""
    if p <= 1.0:
        raise ParameterError(f"p must exceed 1, got {p}")
    if q <= p:
        raise ParameterError(f"need q > p, got p={p}, q={q}")
    p_dual = p / (p - 1.0)
    num = w.values**q
    den = w.values ** (-p_dual)
    return _char_over_family(num, den, q / p_dual, w.axis, family)


def product_ap_characteristic(
    pw: ProductWeight, p: float, family: FamilySelector = "intervals"
) -> float:
    """Rectangle-family characteristic of a tensor weight.

    For tensor weights both the means and the maximum factorize exactly over
    the two axes, so this is the product of the per-factor characteristics.
    """
    return ap_characteristic(pw.factor1, p, family) * ap_characteristic(
        pw.factor2, p, family
    )


@dataclass(frozen=True)
class DerivedClassReport:
    """The three derived-class characteristics implied by a finite
    two-exponent characteristic, echoing the inputs for reproducibility."""

    p: float
    q: float
    family: str
    q_power: float        # [w**q] at exponent q
    dual_p_power: float   # [w**(-p')] at exponent p'
    dual_q_power: float   # [w**(-q')] at exponent q'


def derived_class_check(
    w: Weight, p: float, q: float, family: FamilySelector = "intervals"
) -> DerivedClassReport:
    """Characteristics of the three derived weights w**q, w**(-p'), w**(-q')."""
    if p <= 1.0:
        raise ParameterError(f"p must exceed 1, got {p}")
    if q <= p:
        raise ParameterError(f"need q > p, got p={p}, q={q}")
    p_dual = p / (p - 1.0)
    q_dual = q / (q - 1.0)
    return DerivedClassReport(
        p=p,
        q=q,
        family=_family_label(family),
        q_power=ap_characteristic(w.power(q), q, family),
        dual_p_power=ap_characteristic(w.power(-p_dual), p_dual, family),
        dual_q_power=ap_characteristic(w.power(-q_dual), q_dual, family),
    )
