"""Finite weighted-partition model of a measure space.

A WeightedPartition is a finite list of cells with nonnegative reference
weights mu_k; densities (per-cell Radon-Nikodym values) and probability
vectors (per-cell masses) live against it.  mu-null cells are retained
rather than dropped so absolute-continuity violations stay detectable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AbsoluteContinuityError",
    "Cell",
    "WeightedPartition",
    "DensityVector",
    "ProbabilityVector",
    "uniform_partition",
    "induced_pmf",
    "radon_nikodym",
    "NORMALIZATION_TOL",
]

# tolerance on sum-to-one checks at construction time
NORMALIZATION_TOL = 1e-10


class AbsoluteContinuityError(ValueError):
    """Probability mass sits on a cell the reference measure assigns zero weight."""


@dataclass(frozen=True)
class Cell:
    """One cell of a partition: a label plus an optional interval [left, right)."""

    label: str
    left: float | None = None
    right: float | None = None

    def __post_init__(self) -> None:
        if (self.left is None) != (self.right is None):
            raise ValueError("cell interval: left and right must be given together")
        if self.left is not None and not float(self.left) < float(self.right):
            raise ValueError(
                f"cell interval: need left < right, got [{self.left}, {self.right})"
            )


@dataclass(frozen=True, eq=False)
class WeightedPartition:
    """Finite measurable partition with reference-measure weights mu_k >= 0."""

    cells: tuple[Cell, ...]
    weights: np.ndarray

    def __post_init__(self) -> None:
        cells = tuple(self.cells)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "weights", weights)
        if len(cells) == 0:
            raise ValueError("cells: a partition needs at least one cell")
        if weights.shape != (len(cells),):
            raise ValueError(
                f"weights: need one weight per cell, got {weights.shape} for {len(cells)} cells"
            )
        if np.any(~np.isfinite(weights)) or np.any(weights < 0.0):
            raise ValueError("weights: must be finite and nonnegative")
        if not np.any(weights > 0.0):
            raise ValueError("weights: at least one cell must carry positive weight")
        intervals = [c for c in cells if c.left is not None]
        for a, b in zip(intervals, intervals[1:]):
            if b.left < a.right:
                raise ValueError("cells: interval cells must be ordered and disjoint")

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))


def uniform_partition(
    n: int, mode: str = "counting", interval: tuple[float, float] | None = None
) -> WeightedPartition:
    """n equal cells under one of the three standard reference measures.

    mode "counting" gives mu_k = 1; "uniform_probability" gives mu_k = 1/n;
    "lebesgue" gives mu_k = (b - a)/n over interval=(a, b) with interval
    descriptors attached to the cells.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ValueError(f"n: need a positive integer cell count, got {n!r}")
    n = int(n)
    if mode == "counting":
        return WeightedPartition(tuple(Cell(f"c{k}") for k in range(n)), np.ones(n))
    if mode == "uniform_probability":
        return WeightedPartition(
            tuple(Cell(f"c{k}") for k in range(n)), np.full(n, 1.0 / n)
        )
    if mode == "lebesgue":
        if interval is None:
            raise ValueError("interval: mode 'lebesgue' requires interval=(a, b)")
        a, b = float(interval[0]), float(interval[1])
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError(f"interval: need finite a < b, got ({a}, {b})")
        edges = a + (b - a) * np.arange(n + 1) / n
        cells = tuple(Cell(f"c{k}", float(edges[k]), float(edges[k + 1])) for k in range(n))
        return WeightedPartition(cells, np.full(n, (b - a) / n))
    raise ValueError(f"mode: unknown partition mode {mode!r}")


def _check_vector(values: np.ndarray, what: str) -> None:
    if values.ndim != 1 or values.size == 0:
        raise ValueError(f"{what}: need a nonempty one-dimensional array")
    if np.any(~np.isfinite(values)) or np.any(values < 0.0):
        raise ValueError(f"{what}: entries must be finite and nonnegative")


@dataclass(frozen=True, eq=False)
class DensityVector:
    """Per-cell density values p_k >= 0 with sum p_k mu_k = 1.

    renormalization records the factor applied to the caller's raw values
    when the vector was built with renormalize=True (1.0 otherwise).
    """

    values: np.ndarray
    partition: WeightedPartition
    renormalization: float = 1.0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        _check_vector(values, "values")
        if values.shape != (len(self.partition),):
            raise ValueError(
                f"values: length {values.size} does not match partition size {len(self.partition)}"
            )
        total = float(np.dot(values, self.partition.weights))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(
                f"values: density must integrate to 1 against the partition "
                f"(got {total!r}); pass renormalize=True to rescale"
            )

    @classmethod
    def from_values(
        cls,
        values,
        partition: WeightedPartition,
        renormalize: bool = False,
    ) -> "DensityVector":
        values = np.asarray(values, dtype=float)
        if not renormalize:
            return cls(values, partition)
        _check_vector(values, "values")
        total = float(np.dot(values, partition.weights))
        if total <= 0.0:
            raise ValueError("values: cannot renormalize a vector with zero total mass")
        return cls(values / total, partition, renormalization=1.0 / total)


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """Per-cell probability masses P_k >= 0 summing to 1."""

    masses: np.ndarray
    renormalization: float = 1.0

    def __post_init__(self) -> None:
        masses = np.asarray(self.masses, dtype=float)
        object.__setattr__(self, "masses", masses)
        _check_vector(masses, "masses")
        total = float(np.sum(masses))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(
                f"masses: must sum to 1 (got {total!r}); pass renormalize=True to rescale"
            )

    def __len__(self) -> int:
        return int(self.masses.size)

    @classmethod
    def from_values(cls, masses, renormalize: bool = False) -> "ProbabilityVector":
        masses = np.asarray(masses, dtype=float)
        if not renormalize:
            return cls(masses)
        _check_vector(masses, "masses")
        total = float(np.sum(masses))
        if total <= 0.0:
            raise ValueError("masses: cannot renormalize a vector with zero total mass")
        return cls(masses / total, renormalization=1.0 / total)


def induced_pmf(p: DensityVector) -> ProbabilityVector:
    """Probability masses of the measure induced by the density: P_k = p_k mu_k."""
    return ProbabilityVector(p.values * p.partition.weights)


def radon_nikodym(P: ProbabilityVector, partition: WeightedPartition) -> DensityVector:
    """Per-cell derivative p_k = P_k / mu_k, zero on mu-null cells.

    Requires P to be absolutely continuous with respect to the partition
    weights; mass on a null cell raises AbsoluteContinuityError.
    """
    masses = P.masses
    if masses.shape != (len(partition),):
        raise ValueError(
            f"masses: length {masses.size} does not match partition size {len(partition)}"
        )
    w = partition.weights
    offending = (masses > 0.0) & (w == 0.0)
    if np.any(offending):
        k = int(np.argmax(offending))
        raise AbsoluteContinuityError(
            f"masses: cell {k} carries mass {masses[k]} but zero reference weight"
        )
    values = np.zeros_like(masses)
    pos = w > 0.0
    values[pos] = masses[pos] / w[pos]
    return DensityVector(values, partition)
