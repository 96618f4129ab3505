"""Dyadic mean-value approximation of densities and the convergence harness.

A density is represented at a fixed base resolution (2^B uniform cells on an
interval, values constant per cell) so that every level set of the dyadic
construction is an exact union of base cells and every integral below is a
finite sum; no quadrature enters the convergence claim.

The approximation at level n groups base cells by which dyadic bin
[k/2^n, (k+1)/2^n), k = 0..n*2^n - 1, their density value falls in, with one
overflow cell for values >= n.  The simple function f_n takes the mu-mean of
the density on each nonempty group; the masses of those groups form the
approximating pmf whose discrete Renyi/Tsallis divergences converge to the
measure-theoretic value as n grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .entropy import (
    measure_entropy,
    renyi_divergence,
    shannon_entropy,
    tsallis_divergence,
)
from .measure import DensityVector, ProbabilityVector, uniform_partition
from .qcalc import DeformationIndex, as_index

__all__ = [
    "ResolutionError",
    "BaseGridDensity",
    "DyadicApproximation",
    "CommonRefinement",
    "ConvergenceRow",
    "DemoRow",
    "DemoReport",
    "dyadic_approximation",
    "approximating_pmf",
    "common_refinement",
    "convergence_table",
    "table_to_csv",
    "entropy_nonextension_demo",
    "demo_to_csv",
]

CSV_HEADER = "level,discrete_divergence,reference_divergence,abs_error"

# base-resolution defaults: acceptance runs use 20, property tests 16
DEFAULT_BASE_EXPONENT = 16


class ResolutionError(ValueError):
    """Requested dyadic level is finer than the base grid can resolve."""


@dataclass(frozen=True, eq=False)
class BaseGridDensity:
    """Simple-function density on 2^B uniform cells of [a, b].

    bound is the known finite sup of the density; renormalization records
    the factor applied to the raw inputs (1.0 when none was needed).
    """

    interval: tuple[float, float]
    values: np.ndarray
    bound: float
    renormalization: float = 1.0

    def __post_init__(self) -> None:
        a, b = float(self.interval[0]), float(self.interval[1])
        object.__setattr__(self, "interval", (a, b))
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError(f"interval: need finite a < b, got ({a}, {b})")
        n = values.size
        if values.ndim != 1 or n == 0 or (n & (n - 1)) != 0:
            raise ValueError(
                f"values: need a power-of-two number of base cells, got {values.shape}"
            )
        if np.any(~np.isfinite(values)) or np.any(values < 0.0):
            raise ValueError("values: must be finite and nonnegative")
        total = float(np.sum(values)) * self.delta
        if abs(total - 1.0) > 1e-10:
            raise ValueError(
                f"values: density must integrate to 1 over the interval (got {total!r})"
            )
        if not np.isfinite(self.bound) or float(np.max(values)) > self.bound:
            raise ValueError(
                f"bound: must be a finite sup of the values, got {self.bound!r} "
                f"against max value {float(np.max(values))!r}"
            )

    @property
    def base_cells(self) -> int:
        return int(self.values.size)

    @property
    def delta(self) -> float:
        a, b = self.interval
        return (b - a) / self.values.size

    @property
    def midpoints(self) -> np.ndarray:
        a, b = self.interval
        return a + (b - a) * (np.arange(self.values.size) + 0.5) / self.values.size

    @classmethod
    def from_function(
        cls,
        fn: Callable[[np.ndarray], np.ndarray],
        interval: tuple[float, float],
        base_exponent: int = DEFAULT_BASE_EXPONENT,
        bound: float | None = None,
    ) -> "BaseGridDensity":
        """Evaluate fn at base-cell midpoints and renormalize to unit mass."""
        if not isinstance(base_exponent, (int, np.integer)) or base_exponent < 1:
            raise ValueError(f"base_exponent: need an integer >= 1, got {base_exponent!r}")
        a, b = float(interval[0]), float(interval[1])
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError(f"interval: need finite a < b, got ({a}, {b})")
        n = 2 ** int(base_exponent)
        x = a + (b - a) * (np.arange(n) + 0.5) / n
        raw = np.asarray(fn(x), dtype=float)
        raw = np.broadcast_to(raw, x.shape).astype(float)
        if np.any(~np.isfinite(raw)) or np.any(raw < 0.0):
            raise ValueError("fn: density values must be finite and nonnegative")
        total = float(np.sum(raw)) * ((b - a) / n)
        if total <= 0.0:
            raise ValueError("fn: density integrates to zero; cannot renormalize")
        values = raw / total
        return cls(
            (a, b),
            values,
            bound=float(np.max(values)) if bound is None else float(bound),
            renormalization=1.0 / total,
        )

    @classmethod
    def from_values(
        cls,
        values,
        interval: tuple[float, float],
        renormalize: bool = False,
        bound: float | None = None,
    ) -> "BaseGridDensity":
        values = np.asarray(values, dtype=float)
        factor = 1.0
        if renormalize:
            if np.any(~np.isfinite(values)) or np.any(values < 0.0):
                raise ValueError("values: must be finite and nonnegative")
            a, b = float(interval[0]), float(interval[1])
            total = float(np.sum(values)) * ((b - a) / max(values.size, 1))
            if total <= 0.0:
                raise ValueError("values: cannot renormalize zero total mass")
            values = values / total
            factor = 1.0 / total
        return cls(
            tuple(interval),
            values,
            bound=float(np.max(values)) if bound is None else float(bound),
            renormalization=factor,
        )


@dataclass(frozen=True, eq=False)
class DyadicApproximation:
    """Level-n simple function: nonempty dyadic level sets of the density.

    bin_ids holds the retained dyadic indices k (empty bins are dropped;
    the id level*2^level marks the overflow cell for values >= level).
    members[i] lists the base-cell indices of cell i; mean_values[i] is the
    mu-mean of the density there and masses[i] its integral, so the simple
    function equals mean_values[i] on every base cell of members[i].
    """

    grid: BaseGridDensity
    level: int
    bin_ids: np.ndarray
    members: tuple[np.ndarray, ...]
    mean_values: np.ndarray
    masses: np.ndarray
    mu_masses: np.ndarray

    @property
    def cell_count(self) -> int:
        return int(self.bin_ids.size)

    @property
    def overflow_id(self) -> int:
        return self.level * 2 ** self.level

    @property
    def has_overflow(self) -> bool:
        return bool(self.bin_ids.size and self.bin_ids[-1] == self.overflow_id)

    def simple_function(self) -> np.ndarray:
        """The approximation as per-base-cell values (for sup-norm checks)."""
        out = np.empty(self.grid.base_cells, dtype=float)
        for i, idx in enumerate(self.members):
            out[idx] = self.mean_values[i]
        return out


def dyadic_approximation(p: BaseGridDensity, level: int) -> DyadicApproximation:
    """Group base cells by dyadic bin of their density value at the given level.

    Bins are [k/2^n, (k+1)/2^n) for k = 0..n*2^n - 1 plus the overflow set
    {density >= n}.  Binning is exact: multiplying by 2^n only shifts the
    float exponent, so no boundary cell can land on the wrong side.
    """
    if not isinstance(level, (int, np.integer)) or isinstance(level, bool) or level < 1:
        raise ValueError(f"level: need an integer >= 1, got {level!r}")
    level = int(level)
    if 2 ** level > p.base_cells:
        raise ResolutionError(
            f"level: 2^{level} dyadic bins exceed the {p.base_cells}-cell base grid; "
            f"rebuild the density with a larger base exponent"
        )
    overflow_id = level * 2 ** level
    codes = np.floor(p.values * float(2 ** level)).astype(np.int64)
    codes[p.values >= level] = overflow_id

    order = np.argsort(codes, kind="stable")
    sorted_codes = codes[order]
    bin_ids, starts = np.unique(sorted_codes, return_index=True)
    counts = np.diff(np.append(starts, sorted_codes.size))
    sums = np.add.reduceat(p.values[order], starts)
    delta = p.delta
    return DyadicApproximation(
        grid=p,
        level=level,
        bin_ids=bin_ids,
        members=tuple(np.split(order, starts[1:])),
        mean_values=sums / counts,
        masses=sums * delta,
        mu_masses=counts * delta,
    )


def approximating_pmf(approx: DyadicApproximation) -> ProbabilityVector:
    """Masses of the level sets as a pmf (they telescope to total mass 1)."""
    return ProbabilityVector(approx.masses)


@dataclass(frozen=True, eq=False)
class CommonRefinement:
    """Nonempty pairwise intersections of two approximations' level sets.

    Both simple functions are constant per refinement cell: f_means[i] and
    g_means[i] carry those values, mu_masses[i] the reference mass.
    """

    members: tuple[np.ndarray, ...]
    mu_masses: np.ndarray
    f_means: np.ndarray
    g_means: np.ndarray

    @property
    def cell_count(self) -> int:
        return int(self.mu_masses.size)

    @property
    def f_masses(self) -> np.ndarray:
        return self.f_means * self.mu_masses

    @property
    def g_masses(self) -> np.ndarray:
        return self.g_means * self.mu_masses


def _cell_assignment(approx: DyadicApproximation) -> np.ndarray:
    out = np.empty(approx.grid.base_cells, dtype=np.int64)
    for i, idx in enumerate(approx.members):
        out[idx] = i
    return out


def common_refinement(
    f: DyadicApproximation, g: DyadicApproximation
) -> CommonRefinement:
    """Shared partition on which both simple functions are constant."""
    if f.grid.interval != g.grid.interval or f.grid.base_cells != g.grid.base_cells:
        raise ValueError(
            "g: approximations live on different base grids "
            f"({f.grid.interval} x {f.grid.base_cells} vs {g.grid.interval} x {g.grid.base_cells})"
        )
    g_count = g.cell_count
    pair_codes = _cell_assignment(f) * g_count + _cell_assignment(g)
    order = np.argsort(pair_codes, kind="stable")
    sorted_codes = pair_codes[order]
    uniq, starts = np.unique(sorted_codes, return_index=True)
    counts = np.diff(np.append(starts, sorted_codes.size))
    return CommonRefinement(
        members=tuple(np.split(order, starts[1:])),
        mu_masses=counts * f.grid.delta,
        f_means=f.mean_values[uniq // g_count],
        g_means=g.mean_values[uniq % g_count],
    )


@dataclass(frozen=True)
class ConvergenceRow:
    level: int
    discrete_divergence: float
    reference_divergence: float
    abs_error: float


def _check_shared_grid(p: BaseGridDensity, r: BaseGridDensity) -> None:
    if p.interval != r.interval or p.base_cells != r.base_cells:
        raise ValueError(
            "r: densities live on different base grids "
            f"({p.interval} x {p.base_cells} vs {r.interval} x {r.base_cells})"
        )


def reference_divergence(
    p: BaseGridDensity,
    r: BaseGridDensity,
    index: DeformationIndex | float,
    kind: str,
) -> float:
    """Measure-theoretic divergence at full base resolution (exact sum)."""
    _check_shared_grid(p, r)
    idx = as_index(index)
    if kind not in ("renyi", "tsallis"):
        raise ValueError(f"kind: expected 'renyi' or 'tsallis', got {kind!r}")
    pv, rv, delta = p.values, r.values, p.delta
    live = pv > 0.0
    if np.any(rv[live] == 0.0):
        return math.inf
    if idx.is_classical:
        return float(np.sum(pv[live] * np.log(pv[live] / rv[live])) * delta)
    a = idx.q
    if kind == "renyi":
        log_sum = logsumexp(a * np.log(pv[live]) + (1.0 - a) * np.log(rv[live]))
        return float((log_sum + math.log(delta)) / (a - 1.0))
    power = float(np.sum(pv[live] ** a * rv[live] ** (1.0 - a)) * delta)
    return (power - 1.0) / (a - 1.0)


def convergence_table(
    p: BaseGridDensity,
    r: BaseGridDensity,
    index: DeformationIndex | float,
    kind: str,
    levels: Sequence[int],
) -> list[ConvergenceRow]:
    """Discrete divergence of the approximating pmfs per level vs the reference.

    Levels are independent of each other (they could run in parallel); rows
    are emitted in ascending level order either way.
    """
    _check_shared_grid(p, r)
    idx = as_index(index)
    if kind not in ("renyi", "tsallis"):
        raise ValueError(f"kind: expected 'renyi' or 'tsallis', got {kind!r}")
    if len(levels) == 0:
        raise ValueError("levels: need at least one level")
    reference = reference_divergence(p, r, idx, kind)
    rows = []
    for level in sorted(set(int(n) for n in levels)):
        refinement = common_refinement(
            dyadic_approximation(p, level), dyadic_approximation(r, level)
        )
        P = ProbabilityVector(refinement.f_masses)
        R = ProbabilityVector(refinement.g_masses)
        if kind == "renyi":
            discrete = renyi_divergence(P, R, None, idx)
        else:
            discrete = tsallis_divergence(P, R, None, idx)
        if math.isinf(discrete) or math.isinf(reference):
            err = 0.0 if discrete == reference else math.inf
        else:
            err = abs(discrete - reference)
        rows.append(ConvergenceRow(level, discrete, reference, err))
    return rows


def table_to_csv(rows: Sequence[ConvergenceRow]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.level},{row.discrete_divergence!r},"
            f"{row.reference_divergence!r},{row.abs_error!r}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DemoRow:
    n: int
    discrete_entropy: float
    continuous_entropy: float


@dataclass(frozen=True)
class DemoReport:
    """Discrete entropies ln n diverging while the continuous entropy stays put."""

    rows: tuple[DemoRow, ...]
    continuous_entropy: float
    continuous_negative: bool


def entropy_nonextension_demo(
    n_list: Sequence[int],
    interval: tuple[float, float] = (0.0, 1.0),
    continuous_exponent: int = 16,
) -> DemoReport:
    """Uniform density on [a, b]: S_n(P) = ln n grows without bound, yet the
    measure-theoretic entropy is the constant ln(b - a), negative when
    b - a < 1.  Discrete entropy is not the n -> inf limit of anything here.
    """
    a, b = float(interval[0]), float(interval[1])
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise ValueError(f"interval: need finite a < b, got ({a}, {b})")
    if len(n_list) == 0:
        raise ValueError("n_list: need at least one cell count")
    grid_cells = 2 ** int(continuous_exponent)
    lebesgue = uniform_partition(grid_cells, "lebesgue", (a, b))
    uniform_density = DensityVector.from_values(
        np.full(grid_cells, 1.0 / (b - a)), lebesgue, renormalize=True
    )
    continuous = shannon_entropy(uniform_density)
    rows = []
    for n in n_list:
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"n_list: entries must be positive integers, got {n!r}")
        n = int(n)
        counting = uniform_partition(n, "counting")
        discrete = measure_entropy(ProbabilityVector(np.full(n, 1.0 / n)), counting)
        rows.append(DemoRow(n, discrete, continuous))
    return DemoReport(tuple(rows), continuous, continuous < 0.0)


def demo_to_csv(report: DemoReport) -> str:
    lines = ["n,discrete_entropy,continuous_entropy"]
    for row in report.rows:
        lines.append(f"{row.n},{row.discrete_entropy!r},{row.continuous_entropy!r}")
    return "\n".join(lines) + "\n"
