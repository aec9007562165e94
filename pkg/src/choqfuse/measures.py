"""Sugeno lambda-fuzzy measures over small criteria sets.

A fuzzy measure assigns a weight in [0, 1] to every subset of criteria,
is monotone under inclusion, and is pinned to 0 on the empty set and 1 on
the full set.  The Sugeno lambda family is fully determined by the
per-criterion singleton densities m_i together with the unique parameter
lambda > -1 solving

    lambda + 1 = prod_i (1 + lambda * m_i)

after which any two disjoint subsets combine as

    m(A | B) = m(A) + m(B) + lambda * m(A) * m(B)

When the densities sum to exactly 1 the measure is additive (lambda = 0).
A density sum below 1 forces lambda > 0 (super-additive interaction), a
sum above 1 forces -1 < lambda < 0 (sub-additive, redundant criteria).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "ConvergenceError",
    "LambdaMeasure",
    "MeasureViolation",
    "TableMeasure",
    "solve_lambda",
    "subset_measure",
    "validate_measure",
]

# |sum(m_i) - 1| at or below this is treated as exactly additive (lambda = 0).
ADDITIVE_TOL = 1e-12
# Residual |f(lambda)| the solved root must satisfy.
ROOT_RESIDUAL_TOL = 1e-10
# Bisection budget; generous, the solver typically needs < 110 iterations.
_MAX_BISECT = 200
# Boundary check tolerances for measures (empty/full set, monotonicity).
BOUNDARY_TOL = 1e-9
MONOTONE_TOL = 1e-12
# Power-set tables are precomputed up to this criterion count (2^16 floats);
# larger measures evaluate subsets on demand.
_TABLE_MAX_N = 16


class ConvergenceError(RuntimeError):
    """Root refinement failed to meet its residual contract.

    Signals a solver bug or a numerically degenerate input, not a user error.
    """


def _as_densities(densities: Iterable[float]) -> tuple[float, ...]:
    vals = tuple(float(v) for v in densities)
    if len(vals) < 2:
        raise ValueError(f"need at least 2 densities, got {len(vals)}")
    for i, v in enumerate(vals):
        if not 0.0 < v < 1.0:
            raise ValueError(
                f"density {i} is {v!r}; singleton densities must lie strictly "
                f"inside (0, 1)"
            )
    return vals


def _normalized_residual(d: tuple[float, ...]):
    """Residual g(lambda) = [prod(1 + lambda*m_i) - lambda - 1] / lambda.

    g has the same nonzero root as the raw residual but stays numerically
    resolvable where the raw form cancels to noise: g -> sum(m_i) - 1 as
    lambda -> 0, and g -> -prod(1 - m_i) as lambda -> -1.  The product is
    evaluated through log1p/expm1 to keep those limits exact.  g is negative
    below the root and positive above it on both search branches.
    """

    def g(lam: float) -> float:
        log_prod = math.fsum(math.log1p(lam * m) for m in d)
        if abs(lam) >= 0.5:
            # exp(log_prod) and (1 + lam) are far apart here; direct
            # subtraction is exact enough and survives prod -> 0.
            return (math.exp(log_prod) - (1.0 + lam)) / lam
        # Near zero expm1 keeps full relative precision of prod - 1.
        return math.expm1(log_prod) / lam - 1.0

    return g


def solve_lambda(densities: Iterable[float]) -> float:
    """Solve ``lambda + 1 = prod(1 + lambda * m_i)`` for the measure parameter.

    Returns the unique root greater than -1 and distinct from the trivial
    root 0, except that density sums within ``ADDITIVE_TOL`` of 1 return
    exactly 0.0 (additive measure).  The root is bracketed on the side
    dictated by the density sum (positive when the sum is below 1, inside
    (-1, 0) when above) and refined by bisection on the lambda-normalized
    residual, which is unconditionally safe on these brackets.

    Raises ``ValueError`` for fewer than two densities or densities outside
    (0, 1), and ``ConvergenceError`` if the bracket or residual contract
    cannot be met.
    """
    d = _as_densities(densities)
    total = math.fsum(d)
    if abs(total - 1.0) <= ADDITIVE_TOL:
        return 0.0
    g = _normalized_residual(d)

    if total < 1.0:
        # Root in (0, inf): g < 0 just right of 0, g -> +inf for large lambda.
        lo = 1e-12
        while g(lo) >= 0.0 and lo > 5e-324:
            lo /= 1024.0  # root squeezed toward 0 by heavy pairwise terms
        hi, iters = 1.0, 0
        while g(hi) <= 0.0:
            hi *= 2.0
            iters += 1
            if iters > _MAX_BISECT or not math.isfinite(hi):
                raise ConvergenceError(
                    f"no sign change found while expanding the positive "
                    f"bracket (densities sum to {total})"
                )
        g_lo = g(lo)
    else:
        # Root in (-1, 0): g < 0 near -1, g -> sum(m_i) - 1 > 0 near 0.
        lo, gap = -1.0 + 1e-12, 1e-12
        while g(lo) >= 0.0 and gap > 5e-324:
            gap /= 1024.0
            lo = -1.0 + gap  # collapses to exactly -1.0 below float resolution
        hi = -1e-12
        while g(hi) <= 0.0 and hi < -5e-324:
            hi /= 1024.0
        g_lo, g_hi = g(lo), g(hi)
        if g_lo >= 0.0 or g_hi <= 0.0:
            raise ConvergenceError(
                f"could not bracket the root in (-1, 0) (densities sum "
                f"to {total})"
            )

    # Bisect to float adjacency or budget; g(lo) < 0 < g(hi) throughout.
    root = 0.5 * (lo + hi)
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        gm = g(mid)
        if gm == 0.0:
            lo = hi = mid
            break
        if gm < 0.0:
            lo = mid
        else:
            hi = mid
        root = mid
    root = min((lo, hi, root), key=lambda x: abs(g(x)))
    if root <= -1.0:
        root = math.nextafter(-1.0, 0.0)

    # Contract check on the raw residual f = lambda * g.  For extreme roots
    # (|lambda| >> 1) evaluation noise alone moves f by tens of ulps of
    # lambda, so a scale-proportional band is accepted as the best possible
    # there; it stays below the absolute tolerance for every |lambda| < ~2000.
    residual = abs(root * g(root))
    if residual > ROOT_RESIDUAL_TOL and residual > 64.0 * abs(root) * 2.3e-16 * len(d):
        raise ConvergenceError(
            f"bisection residual {residual:.3e} exceeds {ROOT_RESIDUAL_TOL} "
            f"at lambda={root!r}"
        )
    return root


def _combine(a: float, b: float, lam: float) -> float:
    return a + b + lam * a * b


def _subset_mask(subset: Iterable[int] | int, n: int) -> int:
    """Normalize a subset given as an index iterable or a bitmask."""
    if isinstance(subset, (int, np.integer)):
        mask = int(subset)
        if mask < 0 or mask >= (1 << n):
            raise IndexError(f"bitmask {mask} out of range for {n} criteria")
        return mask
    mask = 0
    for idx in subset:
        i = int(idx)
        if not 0 <= i < n:
            raise IndexError(f"criterion index {i} out of range for n={n}")
        mask |= 1 << i
    return mask


@dataclass(frozen=True)
class LambdaMeasure:
    """A Sugeno lambda-measure: singleton densities plus the solved lambda.

    Instances are immutable and safe to share across threads.  For up to
    16 criteria the full power-set table is precomputed at construction so
    subset queries are array lookups.
    """

    densities: tuple[float, ...]
    lam: float = None  # type: ignore[assignment]  # solved in __post_init__
    _table: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        densities = _as_densities(self.densities)
        object.__setattr__(self, "densities", densities)
        if self.lam is None:
            object.__setattr__(self, "lam", solve_lambda(densities))
        else:
            lam = float(self.lam)
            if lam <= -1.0:
                raise ValueError(f"lambda must exceed -1, got {lam}")
            prod = 1.0
            for m in densities:
                prod *= 1.0 + lam * m
            if abs(prod - lam - 1.0) > BOUNDARY_TOL:
                raise ValueError(
                    f"lambda {lam!r} is inconsistent with the densities: "
                    f"residual {prod - lam - 1.0:.3e}"
                )
            object.__setattr__(self, "lam", lam)
        if self.n <= _TABLE_MAX_N:
            object.__setattr__(self, "_table", self._build_table())
            full = self._table[-1]
        else:
            full = 0.0
            for m in self.densities:
                full = _combine(full, m, self.lam)
        if abs(full - 1.0) > BOUNDARY_TOL:
            raise ConvergenceError(
                f"full-set measure {full!r} deviates from 1 beyond {BOUNDARY_TOL}"
            )
        if self._table is not None:
            # Snap the normalization boundary exactly; everything else is
            # within one rounding of the lambda recursion.
            self._table[-1] = 1.0
            np.clip(self._table, 0.0, 1.0, out=self._table)
            self._table.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.densities)

    def _build_table(self) -> np.ndarray:
        """Fold the lambda recursion over the power set.

        Each subset adds its highest criterion last, so with lambda = 0 the
        table entry equals the plain left-to-right sum of its densities.
        """
        table = np.empty(1 << self.n)
        table[0] = 0.0
        lam = self.lam
        for mask in range(1, 1 << self.n):
            i = mask.bit_length() - 1
            table[mask] = _combine(table[mask ^ (1 << i)], self.densities[i], lam)
        return table

    def dense_table(self) -> np.ndarray | None:
        """Power-set table indexed by bitmask, or None above 16 criteria."""
        return self._table

    def value_of(self, subset: Iterable[int] | int) -> float:
        """Measure of a criteria subset (index iterable or bitmask)."""
        mask = _subset_mask(subset, self.n)
        if self._table is not None:
            return float(self._table[mask])
        value = 0.0
        for i in range(self.n):
            if mask >> i & 1:
                value = _combine(value, self.densities[i], self.lam)
        return min(max(value, 0.0), 1.0) if mask != (1 << self.n) - 1 else 1.0


@dataclass(frozen=True)
class TableMeasure:
    """A fuzzy measure given by an explicit power-set table.

    Covers measures outside the Sugeno family (e.g. the max- and
    min-degenerate measures).  Construction validates the boundary and
    monotonicity conditions unless ``validate=False``.
    """

    values: Mapping[frozenset[int] | tuple[int, ...] | int, float]
    validate: bool = True
    _table: np.ndarray = field(default=None, repr=False, compare=False)  # type: ignore[assignment]
    _n: int = field(default=0, repr=False, compare=False)

    def __post_init__(self):
        n, table = _dense_from_mapping(self.values)
        if self.validate:
            violations = validate_measure(self.values)
            if violations:
                raise ValueError(
                    "invalid fuzzy measure: " + "; ".join(str(v) for v in violations)
                )
        table.flags.writeable = False
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "_n", n)
        object.__setattr__(self, "values", dict(self.values))

    @property
    def n(self) -> int:
        return self._n

    def dense_table(self) -> np.ndarray:
        return self._table

    def value_of(self, subset: Iterable[int] | int) -> float:
        return float(self._table[_subset_mask(subset, self.n)])


def subset_measure(measure: LambdaMeasure | TableMeasure, subset: Iterable[int] | int) -> float:
    """Measure of ``subset``; function-style alias for ``measure.value_of``."""
    return measure.value_of(subset)


@dataclass(frozen=True)
class MeasureViolation:
    """One broken measure condition, naming the offending subset pair."""

    kind: str  # "empty", "full", or "monotonicity"
    subset: frozenset[int]
    superset: frozenset[int] | None
    detail: str

    def __str__(self) -> str:
        return self.detail


def _key_to_mask(key) -> int:
    if isinstance(key, (int, np.integer)):
        return int(key)
    mask = 0
    for idx in key:
        mask |= 1 << int(idx)
    return mask


def _mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def _dense_from_mapping(values: Mapping) -> tuple[int, np.ndarray]:
    by_mask: dict[int, float] = {}
    union = 0
    for key, val in values.items():
        mask = _key_to_mask(key)
        if mask < 0:
            raise ValueError(f"negative subset mask {mask}")
        by_mask[mask] = float(val)
        union |= mask
    n = union.bit_length()
    if n < 1:
        raise ValueError("measure table has no non-empty subset")
    if n > 12:
        raise ValueError(f"explicit tables support at most 12 criteria, got {n}")
    missing = [m for m in range(1 << n) if m not in by_mask]
    if missing:
        raise ValueError(
            f"measure table is missing {len(missing)} of {1 << n} subsets, "
            f"e.g. {sorted(_mask_to_set(missing[0]))}"
        )
    table = np.empty(1 << n)
    for mask, val in by_mask.items():
        table[mask] = val
    return n, table


def validate_measure(values: Mapping) -> list[MeasureViolation]:
    """Check boundary and monotonicity conditions of an explicit measure.

    ``values`` must map every subset of {0..n-1} (as a frozenset/tuple of
    indices or a bitmask) to its measure, for n <= 12.  Returns an empty
    list iff m(empty) = 0, m(full) = 1 and m(A) <= m(B) whenever A is a
    subset of B; otherwise one entry per violated covering pair.  Missing
    entries raise ``ValueError``.
    """
    n, table = _dense_from_mapping(values)
    violations: list[MeasureViolation] = []
    if abs(table[0]) > BOUNDARY_TOL:
        violations.append(
            MeasureViolation(
                "empty", frozenset(), None,
                f"m(empty set) = {table[0]!r}, must be 0",
            )
        )
    full = (1 << n) - 1
    if abs(table[full] - 1.0) > BOUNDARY_TOL:
        violations.append(
            MeasureViolation(
                "full", _mask_to_set(full), None,
                f"m(full set) = {table[full]!r}, must be 1",
            )
        )
    # Monotone over all covering pairs A < A + {j} implies monotone over
    # every inclusion chain, so covers are sufficient and name the
    # tightest offending pair.
    for mask in range(1 << n):
        for j in range(n):
            if mask >> j & 1:
                continue
            wider = mask | (1 << j)
            if table[mask] > table[wider] + MONOTONE_TOL:
                violations.append(
                    MeasureViolation(
                        "monotonicity", _mask_to_set(mask), _mask_to_set(wider),
                        f"m({set(_mask_to_set(mask)) or '{}'}) = {table[mask]!r} exceeds "
                        f"m({set(_mask_to_set(wider))}) = {table[wider]!r}",
                    )
                )
    return violations
